#include "tbm/json_io.hpp"

#include <cstdint>
#include <cstdio>

namespace tbm {

Json to_json(cplx z) { return Json::array({z.real(), z.imag()}); }

Json to_json(const MassTriple& m) { return Json::array({m.m1, m.m2, m.m3}); }

Json to_json(const LagrangeParam& p) {
  const auto [lo, hi] = p.roots();
  Json j;
  j["masses"] = to_json(p.masses);
  j["orientation"] = p.orientation;
  j["k"] = p.k;
  j["alpha"] = p.alpha;
  j["beta"] = p.beta;
  j["gamma"] = p.gamma;
  j["delta"] = p.delta;
  j["e1"] = p.e1;
  j["e2"] = p.e2;
  j["e3"] = p.e3;
  j["time_scale"] = p.time_scale;
  j["w0"] = p.w0;
  j["roots"] = Json::array({to_json(lo), to_json(hi)});
  return j;
}

Json to_json(const FuchsianSystem& fs) {
  Json j;
  j["chart"] = {{"type", fs.chart.type},
                {"gauge", fs.chart.gauge},
                {"w0", fs.chart.w0},
                {"k", fs.chart.k},
                {"conjugation", matrix_json(fs.chart.conjugation)}};
  Json pts = Json::array();
  for (cplx z : fs.points) pts.push_back(to_json(z));
  j["singular_points"] = pts;
  Json res = Json::array();
  for (const auto& r : fs.residues) res.push_back(matrix_json(r));
  j["residues"] = res;
  j["basepoint"] = to_json(fs.basepoint);
  j["residue_at_infinity"] = matrix_json(fs.residue_at_infinity());
  Json ex = Json::array();
  for (int i = 0; i < fs.infinity_exponents.size(); ++i) ex.push_back(to_json(fs.infinity_exponents(i)));
  j["infinity_exponents"] = ex;
  j["infinity_shift"] = fs.infinity_shift;
  j["infinity_c"] = fs.infinity_c;
  j["diagnostics"] = {{"residue_agreement", fs.residue_agreement},
                      {"fuchsian_remainder", fs.fuchsian_remainder},
                      {"tau0_integer_defect", fs.tau0_integer_defect},
                      {"residue_sum_defect", fs.residue_sum_defect},
                      {"infinity_exponent_defect", fs.infinity_exponent_defect}};
  return j;
}

Json to_json(const MonodromySet& ms) {
  Json j;
  j["T0"] = matrix_json(ms.T0);
  j["T1"] = matrix_json(ms.T1);
  j["T2"] = matrix_json(ms.T2);
  j["Tinf"] = matrix_json(ms.Tinf);
  j["Tinf_product"] = matrix_json(ms.Tinf_product);
  j["relation"] = ms.relation;
  j["ccw_order"] = ms.ccw_order;
  j["tol"] = ms.tol;
  Json loops = Json::array();
  for (const auto& l : ms.loops) {
    Json pts = Json::array();
    for (cplx z : l.waypoints) pts.push_back(to_json(z));
    loops.push_back({{"encircled", l.encircled}, {"waypoints", pts}});
  }
  j["loops"] = loops;
  j["diagnostics"] = {{"relation_residual", ms.relation_residual},
                      {"direct_vs_product", ms.direct_vs_product},
                      {"det_defects", ms.det_defects},
                      {"steps", ms.stats.steps},
                      {"rejected", ms.stats.rejected},
                      {"evaluations", ms.stats.evaluations}};
  return j;
}

Json to_json(const CertifyConfig& c) {
  Json j;
  j["tol_transport"] = c.transport.tol;
  j["tol_residue"] = c.fuchsian.residue_tol;
  j["tol_remainder"] = c.fuchsian.remainder_tol;
  j["tol_rank"] = c.spectral.rank_tol;
  j["cluster_tol"] = c.spectral.cluster_tol;
  j["max_degree"] = c.max_degree;
  j["orientation"] = c.orientation;
  j["relabel_ratio"] = c.relabel_ratio;
  j["precision_ladder"] = c.precision_ladder;
  j["clearance_factor"] = c.transport.clearance_factor;
  j["circle_vertices"] = c.transport.circle_vertices;
  j["contour_points"] = c.fuchsian.contour_points;
  j["richardson_levels"] = c.fuchsian.richardson_levels;
  return j;
}

Json to_json(const Certificate& c) {
  Json j;
  j["schema"] = kCertificateSchema;
  j["masses"] = to_json(c.masses);
  j["theta"] = c.theta;
  j["lambda1"] = c.lambda1;
  j["lambda2"] = c.lambda2;
  j["verdict"] = c.verdict;
  if (!c.failed_stage.empty()) {
    j["failed_stage"] = c.failed_stage;
    j["error"] = c.error;
  }
  j["digests"] = {{"orbit", c.orbit_digest}, {"fuchsian", c.fuchsian_digest}, {"monodromy", c.monodromy_digest}};
  Json checks = Json::array();
  for (const auto& k : c.checks)
    checks.push_back(
        {{"name", k.name}, {"pass", k.pass}, {"residual", k.residual}, {"relation", k.relation}, {"tolerance", k.tolerance}});
  j["checks"] = checks;
  j["invariant_dimensions"] = c.invariant_dimensions;
  j["invariant_dimensions_extended"] = c.invariant_dimensions_extended;
  j["independent_invariants"] = c.independent_invariants;
  j["spectral"] = {{"tinf_distance_to_ones", c.tinf_distance_to_ones},
                   {"product_distance_to_ones", c.product_distance_to_ones},
                   {"lambda1_distance_to_one", c.lambda1_distance_to_one}};
  j["environment"] = {{"software", kSoftwareVersion},
                      {"config", to_json(c.config)},
                      {"body_order", c.body_order},
                      {"transport_tol_used", c.transport_tol_used},
                      {"precision_escalated", c.precision_escalated},
                      {"chart", c.chart},
                      {"gauge", c.gauge},
                      {"basepoint", to_json(c.basepoint)},
                      {"loop_relation", c.relation},
                      {"ccw_order", c.ccw_order},
                      {"induced_action", "pullback J -> J o T"}};
  return j;
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string digest(const Json& j) { return fnv1a_hex(j.dump()); }

}  // namespace tbm
