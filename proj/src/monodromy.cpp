#include "tbm/monodromy.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "tbm/dop853.hpp"
#include "tbm/errors.hpp"

namespace tbm {

namespace {

double segment_distance(cplx a, cplx b, cplx z) {
  const cplx d = b - a;
  const double len2 = std::norm(d);
  double t = len2 > 0 ? std::real(std::conj(d) * (z - a)) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return std::abs(a + t * d - z);
}

double min_pairwise(const std::vector<cplx>& pts) {
  double d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) d = std::min(d, std::abs(pts[i] - pts[j]));
  return d;
}

double min_distance_from(const std::vector<cplx>& pts, std::size_t i) {
  double d = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < pts.size(); ++j)
    if (j != i) d = std::min(d, std::abs(pts[i] - pts[j]));
  return d;
}

}  // namespace

Eigen::MatrixXcd PoleSystem::operator()(cplx tau) const {
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(dim(), dim());
  for (std::size_t i = 0; i < points.size(); ++i) a += residues[i] / (tau - points[i]);
  return a;
}

PoleSystem pole_system(const FuchsianSystem& fs) {
  PoleSystem s;
  s.points = fs.points;
  for (const auto& r : fs.residues) s.residues.emplace_back(r);
  return s;
}

LoopPath keyhole_loop(const std::vector<cplx>& points, cplx basepoint, int index, int vertices) {
  const cplx c = points.at(index);
  const double radius = 0.3 * (points.size() > 1 ? min_distance_from(points, index) : std::abs(basepoint - c));
  const double a0 = std::arg(basepoint - c);
  LoopPath loop{basepoint, {basepoint}, {index}};
  for (int k = 0; k <= vertices; ++k) loop.waypoints.push_back(c + std::polar(radius, a0 + 2 * M_PI * k / vertices));
  loop.waypoints.push_back(basepoint);
  return loop;
}

LoopPath enclosing_loop(const std::vector<cplx>& points, cplx basepoint, int vertices) {
  const cplx c = std::accumulate(points.begin(), points.end(), cplx(0)) / static_cast<double>(points.size());
  double reach = std::abs(basepoint - c);
  for (cplx p : points) reach = std::max(reach, std::abs(p - c));
  const double radius = 2.0 * reach;
  const double a0 = std::arg(basepoint - c);
  LoopPath loop{basepoint, {basepoint}, {}};
  for (std::size_t i = 0; i < points.size(); ++i) loop.encircled.push_back(static_cast<int>(i));
  for (int k = 0; k <= vertices; ++k) loop.waypoints.push_back(c + std::polar(radius, a0 + 2 * M_PI * k / vertices));
  loop.waypoints.push_back(basepoint);
  return loop;
}

LoopPath reversed(const LoopPath& loop) {
  LoopPath r = loop;
  std::reverse(r.waypoints.begin(), r.waypoints.end());
  return r;
}

double path_clearance(const std::vector<cplx>& points, const LoopPath& loop) {
  double d = std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s + 1 < loop.waypoints.size(); ++s)
    for (cplx z : points) d = std::min(d, segment_distance(loop.waypoints[s], loop.waypoints[s + 1], z));
  return d;
}

Eigen::MatrixXcd transport(const CoefficientFn& A, int dim, const std::vector<cplx>& points, const LoopPath& loop,
                           const TransportOptions& opt, TransportStats* stats) {
  if (loop.waypoints.size() < 2) throw transport_error("loop needs at least two waypoints");
  if (points.size() > 1) {
    const double need = opt.clearance_factor * min_pairwise(points);
    const double have = path_clearance(points, loop);
    if (!(have >= need))
      throw transport_error("path clearance " + std::to_string(have) + " below " + std::to_string(need));
  }
  Eigen::MatrixXcd X = Eigen::MatrixXcd::Identity(dim, dim);
  Dop853Options o;
  o.rtol = o.atol = opt.tol;
  for (std::size_t s = 0; s + 1 < loop.waypoints.size(); ++s) {
    const cplx a = loop.waypoints[s], d = loop.waypoints[s + 1] - a;
    if (d == cplx(0)) continue;
    auto rhs = [&](double t, const Eigen::MatrixXcd& Y) -> Eigen::MatrixXcd { return d * (A(a + t * d) * Y); };
    const OdeStats st = dop853(rhs, 0.0, X, 1.0, o);
    if (st.status != OdeStatus::completed)
      throw transport_error(std::string("segment integration ended with ") + to_string(st.status));
    if (stats) {
      stats->steps += st.accepted;
      stats->rejected += st.rejected;
      stats->evaluations += st.evaluations;
    }
  }
  return X;
}

Eigen::MatrixXcd transport(const PoleSystem& sys, const LoopPath& loop, const TransportOptions& opt,
                           TransportStats* stats) {
  return transport([&sys](cplx tau) { return sys(tau); }, sys.dim(), sys.points, loop, opt, stats);
}

MonodromySet generators(const FuchsianSystem& fs, const TransportOptions& opt) {
  const PoleSystem sys = pole_system(fs);
  MonodromySet ms;
  ms.tol = opt.tol;
  Mat4c T[3];
  for (int i = 0; i < 3; ++i) {
    ms.loops.push_back(keyhole_loop(fs.points, fs.basepoint, i, opt.circle_vertices));
    T[i] = transport(sys, ms.loops.back(), opt, &ms.stats);
    const cplx expect = std::exp(cplx(0, 2 * M_PI) * fs.residues[i].trace());
    ms.det_defects[i] = std::abs(T[i].determinant() - expect);
  }
  ms.T0 = T[0];
  ms.T1 = T[1];
  ms.T2 = T[2];
  ms.loops.push_back(enclosing_loop(fs.points, fs.basepoint, 2 * opt.circle_vertices));
  const Mat4c big = transport(sys, ms.loops.back(), opt, &ms.stats);
  ms.Tinf = big.inverse();

  // Counterclockwise order seen from the basepoint, starting at the outward direction.
  const cplx centroid = (fs.points[0] + fs.points[1] + fs.points[2]) / 3.0;
  const double cut = std::arg(fs.basepoint - centroid);
  std::vector<std::pair<double, int>> ang;
  for (int i = 0; i < 3; ++i) {
    double a = std::arg(fs.points[i] - fs.basepoint) - cut;
    while (a < 0) a += 2 * M_PI;
    while (a >= 2 * M_PI) a -= 2 * M_PI;
    ang.emplace_back(a, i);
  }
  std::sort(ang.begin(), ang.end());
  for (const auto& [a, i] : ang) ms.ccw_order.push_back(i);
  // Traversing loops a, b, c in turn continues by T_c T_b T_a; the enclosing loop equals that composite.
  const Mat4c composite = T[ms.ccw_order[2]] * T[ms.ccw_order[1]] * T[ms.ccw_order[0]];
  ms.Tinf_product = composite.inverse();
  ms.relation = "T" + std::to_string(ms.ccw_order[2]) + "*T" + std::to_string(ms.ccw_order[1]) + "*T" +
                std::to_string(ms.ccw_order[0]) + "*Tinf = I";
  ms.relation_residual = (composite * ms.Tinf - Mat4c::Identity()).norm();
  ms.direct_vs_product = (ms.Tinf - ms.Tinf_product).norm();
  return ms;
}

}  // namespace tbm
