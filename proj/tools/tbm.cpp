// Command-line front end: certify, sweep and stage inspection.
#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "tbm/errors.hpp"
#include "tbm/json_io.hpp"
#include "tbm/sweep.hpp"

using namespace tbm;

namespace {

enum Exit { kPass = 0, kCheckFailure = 1, kPipelineError = 2, kUsage = 64 };

struct usage_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Flags {
  std::string masses;
  std::optional<double> tol_transport, tol_residue, tol_rank;
  std::optional<int> max_degree, samples, jobs, orientation;
  std::optional<std::uint64_t> seed;
  std::string out, format, plot, config;
};

struct RunConfig {
  MassTriple masses;
  bool has_masses = false;
  CertifyConfig certify;
  int samples = 100;
  std::uint64_t seed = 1;
  int jobs = 0;
  std::string out, format, plot;
};

MassTriple parse_masses(const std::string& s) {
  std::vector<double> v;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double x = 0;
    try {
      x = std::stod(item, &used);
    } catch (const std::exception&) {
      throw usage_error("--masses: cannot parse '" + item + "'");
    }
    if (used != item.size()) throw usage_error("--masses: cannot parse '" + item + "'");
    v.push_back(x);
  }
  if (v.size() != 3) throw usage_error("--masses expects three comma-separated values");
  try {
    return MassTriple::make(v[0], v[1], v[2]);
  } catch (const std::invalid_argument& e) {
    throw usage_error(e.what());
  }
}

std::optional<double> env_double(const char* name) {
  const char* s = std::getenv(name);
  if (!s || !*s) return std::nullopt;
  char* end = nullptr;
  const double v = std::strtod(s, &end);
  if (*end != '\0') throw usage_error(std::string(name) + ": not a number");
  return v;
}

std::optional<int> env_int(const char* name) {
  const auto v = env_double(name);
  if (!v) return std::nullopt;
  if (*v != static_cast<int>(*v)) throw usage_error(std::string(name) + ": not an integer");
  return static_cast<int>(*v);
}

// Precedence: flags > environment > config file > defaults.
RunConfig resolve(const Flags& f) {
  RunConfig rc;
  if (!f.config.empty()) {
    std::ifstream in(f.config);
    if (!in) throw usage_error("cannot read config file " + f.config);
    Json j;
    try {
      j = Json::parse(in);
    } catch (const std::exception& e) {
      throw usage_error(std::string("config file: ") + e.what());
    }
    static const std::vector<std::string> known{"masses", "tol_transport", "tol_residue", "tol_rank", "max_degree",
                                                "samples", "seed", "jobs", "orientation", "relabel_ratio"};
    try {
      for (auto it = j.begin(); it != j.end(); ++it)
        if (std::find(known.begin(), known.end(), it.key()) == known.end())
          throw usage_error("config file: unknown key '" + it.key() + "'");
      if (j.contains("masses")) {
        const auto m = j["masses"].get<std::vector<double>>();
        if (m.size() != 3) throw usage_error("config file: masses needs three values");
        rc.masses = MassTriple::make(m[0], m[1], m[2]);
        rc.has_masses = true;
      }
      if (j.contains("tol_transport")) rc.certify.transport.tol = j["tol_transport"].get<double>();
      if (j.contains("tol_residue")) rc.certify.fuchsian.residue_tol = j["tol_residue"].get<double>();
      if (j.contains("tol_rank")) rc.certify.spectral.rank_tol = j["tol_rank"].get<double>();
      if (j.contains("max_degree")) rc.certify.max_degree = j["max_degree"].get<int>();
      if (j.contains("samples")) rc.samples = j["samples"].get<int>();
      if (j.contains("seed")) rc.seed = j["seed"].get<std::uint64_t>();
      if (j.contains("jobs")) rc.jobs = j["jobs"].get<int>();
      if (j.contains("orientation")) rc.certify.orientation = j["orientation"].get<int>();
      if (j.contains("relabel_ratio")) rc.certify.relabel_ratio = j["relabel_ratio"].get<double>();
    } catch (const usage_error&) {
      throw;
    } catch (const std::exception& e) {
      throw usage_error(std::string("config file: ") + e.what());
    }
  }

  if (auto v = env_double("TBM_TOL_TRANSPORT")) rc.certify.transport.tol = *v;
  if (auto v = env_double("TBM_TOL_RESIDUE")) rc.certify.fuchsian.residue_tol = *v;
  if (auto v = env_double("TBM_TOL_RANK")) rc.certify.spectral.rank_tol = *v;
  if (auto v = env_int("TBM_MAX_DEGREE")) rc.certify.max_degree = *v;

  if (!f.masses.empty()) {
    rc.masses = parse_masses(f.masses);
    rc.has_masses = true;
  }
  if (f.tol_transport) rc.certify.transport.tol = *f.tol_transport;
  if (f.tol_residue) rc.certify.fuchsian.residue_tol = *f.tol_residue;
  if (f.tol_rank) rc.certify.spectral.rank_tol = *f.tol_rank;
  if (f.max_degree) rc.certify.max_degree = *f.max_degree;
  if (f.samples) rc.samples = *f.samples;
  if (f.seed) rc.seed = *f.seed;
  if (f.jobs) rc.jobs = *f.jobs;
  if (f.orientation) rc.certify.orientation = *f.orientation;
  rc.out = f.out;
  rc.format = f.format;
  rc.plot = f.plot;

  try {
    rc.certify.validate();
  } catch (const std::invalid_argument& e) {
    throw usage_error(e.what());
  }
  if (rc.samples < 1) throw usage_error("samples must be >= 1");
  if (rc.jobs < 0) throw usage_error("jobs must be >= 0");
  return rc;
}

Json effective_config(const RunConfig& rc, bool sweep) {
  Json j = to_json(rc.certify);
  if (rc.has_masses) j["masses"] = to_json(rc.masses);
  if (sweep) {
    j["samples"] = rc.samples;
    j["seed"] = rc.seed;
  }
  return j;
}

void emit(const RunConfig& rc, const std::string& text) {
  if (rc.out.empty() || rc.out == "-") {
    std::cout << text;
    return;
  }
  std::ofstream os(rc.out, std::ios::binary);
  if (!os) throw usage_error("cannot write " + rc.out);
  os << text;
}

void write_plot(const std::string& path, const Json& data, const std::string& body) {
  std::ofstream os(path);
  if (!os) throw usage_error("cannot write " + path);
  os << "import json\nimport matplotlib\nmatplotlib.use('Agg')\nimport matplotlib.pyplot as plt\n\n"
     << "data = json.loads(r'''" << data.dump() << "''')\n\n"
     << body;
}

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v;
  for (int i = 0; i < n; ++i) v.push_back(a + (b - a) * i / (n - 1));
  return v;
}

Json orbit_track(const LagrangeParam& p) {
  Json t = Json::array();
  for (double w : linspace(p.w0 - 4, p.w0 + 4, 161)) {
    const auto s = orbit_reduced_state(p, cplx(w, 0));
    t.push_back({w, s.q(0).real(), s.q(1).real(), s.q(2).real()});
  }
  return t;
}

const char* kOrbitPlot = R"(w, q1, q2, q3 = zip(*data['track'])
fig, ax = plt.subplots(1, 2, figsize=(11, 5))
ax[0].plot(q1, [0] * len(q1), label='body 1')
ax[0].plot(q2, q3, label='body 2')
ax[0].plot([0], [0], 'k*', label='body 3 (reference)')
ax[0].set_aspect('equal')
ax[0].set_title('reduced frame, body 3 at the origin, real w')
ax[0].legend()
pts = data['singular_points']
ax[1].plot([z[0] for z in pts], [z[1] for z in pts], 'rx', ms=10)
ax[1].set_title('singular points in the w plane')
ax[1].axhline(0, color='grey', lw=0.5)
fig.savefig(__file__.replace('.py', '.png'), dpi=120)
)";

const char* kFuchsianPlot = R"(pts = data['singular_points']
fig, ax = plt.subplots(figsize=(6, 6))
for i, z in enumerate(pts):
    ax.plot(z[0], z[1], 'rx', ms=10)
    ax.annotate('tau%d' % i, (z[0], z[1]), textcoords='offset points', xytext=(6, 6))
b = data['basepoint']
ax.plot(b[0], b[1], 'ko')
ax.annotate('basepoint', (b[0], b[1]), textcoords='offset points', xytext=(6, -12))
ax.set_aspect('equal')
ax.set_title('singular points and basepoint')
fig.savefig(__file__.replace('.py', '.png'), dpi=120)
)";

const char* kMonodromyPlot = R"(import math
fig, ax = plt.subplots(1, 2, figsize=(12, 6))
t = [2 * math.pi * k / 256 for k in range(257)]
ax[0].plot([math.cos(a) for a in t], [math.sin(a) for a in t], color='grey', lw=0.5)
ax[0].plot([z[0] for z in data['tinf_eigenvalues']], [z[1] for z in data['tinf_eigenvalues']], 'bo', label='computed')
ax[0].plot([z[0] for z in data['predicted']], [z[1] for z in data['predicted']], 'r+', ms=14, label='predicted')
ax[0].plot([1], [0], 'k*', label='1')
ax[0].set_aspect('equal')
ax[0].legend()
ax[0].set_title('spectrum of Tinf')
for loop in data['loops']:
    ax[1].plot([z[0] for z in loop['waypoints']], [z[1] for z in loop['waypoints']], lw=0.8)
pts = data['singular_points']
ax[1].plot([z[0] for z in pts], [z[1] for z in pts], 'rx', ms=10)
ax[1].set_aspect('equal')
ax[1].set_title('continuation loops')
fig.savefig(__file__.replace('.py', '.png'), dpi=120)
)";

void require_masses(const RunConfig& rc) {
  if (!rc.has_masses) throw usage_error("--masses is required");
}

int cmd_certify(const RunConfig& rc) {
  require_masses(rc);
  const Certificate c = certify(rc.masses, rc.certify);
  if (rc.format == "csv") {
    std::ostringstream os;
    os.precision(17);
    os << "name,pass,residual,relation,tolerance\n";
    for (const auto& k : c.checks)
      os << k.name << ',' << (k.pass ? "true" : "false") << ',' << k.residual << ',' << k.relation << ','
         << k.tolerance << '\n';
    os << "# verdict " << c.verdict << "\n# config " << effective_config(rc, false).dump() << "\n";
    emit(rc, os.str());
  } else {
    Json j = to_json(c);
    j["effective_config"] = effective_config(rc, false);
    emit(rc, j.dump(2) + "\n");
  }
  if (c.verdict == "no verdict") {
    Json e{{"error", "pipeline"}, {"stage", c.failed_stage}, {"message", c.error}, {"exit_code", kPipelineError}};
    std::cerr << e.dump() << "\n";
    return kPipelineError;
  }
  return c.verdict == "pass" ? kPass : kCheckFailure;
}

int cmd_sweep(const RunConfig& rc) {
  SweepConfig sc;
  sc.samples = rc.samples;
  sc.seed = rc.seed;
  sc.jobs = rc.jobs;
  sc.certify = rc.certify;
  const auto rows = run_sweep(sc);
  const auto s = summarize(rows);
  Json summary{{"samples", s.samples},
               {"passed", s.passed},
               {"no_verdict", s.errors},
               {"min_tinf_distance_to_ones", s.min_tinf_distance_to_ones},
               {"min_lambda1_distance_to_one", s.min_lambda1_distance_to_one},
               {"guard_holds", s.guard_holds}};
  if (rc.format == "json") {
    Json arr = Json::array();
    for (const auto& r : rows)
      arr.push_back({{"index", r.index},
                     {"masses", to_json(r.masses)},
                     {"theta", r.theta},
                     {"lambda1", r.lambda1},
                     {"lambda2", r.lambda2},
                     {"tinf_distance_to_ones", r.tinf_distance_to_ones},
                     {"product_distance_to_ones", r.product_distance_to_ones},
                     {"lambda1_distance_to_one", r.lambda1_distance_to_one},
                     {"guard", r.guard},
                     {"verdict", r.verdict},
                     {"failed_checks", r.failed_checks},
                     {"error", r.error}});
    Json j{{"effective_config", effective_config(rc, true)}, {"summary", summary}, {"rows", arr}};
    emit(rc, j.dump(2) + "\n");
  } else {
    std::ostringstream os;
    write_csv(os, rows);
    os << "# summary " << summary.dump() << "\n# config " << effective_config(rc, true).dump() << "\n";
    emit(rc, os.str());
    if (!rc.out.empty() && rc.out != "-") std::cout << "summary " << summary.dump() << "\n";
  }
  return s.passed == s.samples ? kPass : kCheckFailure;
}

// Stage failures carry the stage name for the error object.
template <typename F>
auto stage(const char* name, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const std::exception& e) {
    throw pipeline_error(name, e.what());
  }
}

int cmd_orbit(const RunConfig& rc) {
  require_masses(rc);
  const auto p = stage("orbit", [&] { return solve_parametrization(rc.masses, rc.certify.orientation); });
  const auto grid = orbit_test_grid(p);
  Json j{{"effective_config", effective_config(rc, false)}, {"orbit", to_json(p)}};
  j["residual"] = orbit_residual(p, grid);
  j["energy_defect"] = orbit_energy_defect(p, grid);
  j["grid_size"] = grid.size();
  emit(rc, j.dump(2) + "\n");
  if (!rc.plot.empty()) {
    const auto [lo, hi] = p.roots();
    write_plot(rc.plot,
               {{"track", orbit_track(p)}, {"singular_points", {to_json(cplx(p.w0, 0)), to_json(lo), to_json(hi)}}},
               kOrbitPlot);
  }
  return kPass;
}

int cmd_fuchsian(const RunConfig& rc) {
  require_masses(rc);
  const auto p = stage("orbit", [&] { return solve_parametrization(rc.masses, rc.certify.orientation); });
  const auto fs = stage("fuchsian", [&] { return build_fuchsian(p, rc.certify.fuchsian); });
  Json j{{"effective_config", effective_config(rc, false)}, {"fuchsian", to_json(fs)}};
  emit(rc, j.dump(2) + "\n");
  if (!rc.plot.empty()) {
    Json pts = Json::array();
    for (cplx z : fs.points) pts.push_back(to_json(z));
    write_plot(rc.plot, {{"singular_points", pts}, {"basepoint", to_json(fs.basepoint)}}, kFuchsianPlot);
  }
  return kPass;
}

int cmd_monodromy(const RunConfig& rc) {
  require_masses(rc);
  const auto p = stage("orbit", [&] { return solve_parametrization(rc.masses, rc.certify.orientation); });
  const auto fs = stage("fuchsian", [&] { return build_fuchsian(p, rc.certify.fuchsian); });
  const auto ms = stage("monodromy", [&] { return generators(fs, rc.certify.transport); });
  const auto sd = spectral_analysis(ms.Tinf, rc.certify.spectral);
  const auto pred = theoretical_spectrum(rc.masses);
  Json ev = Json::array(), pr = Json::array();
  for (int i = 0; i < 4; ++i) {
    ev.push_back(to_json(sd.eigenvalues(i)));
    pr.push_back(to_json(pred(i)));
  }
  Json j{{"effective_config", effective_config(rc, false)}, {"monodromy", to_json(ms)}};
  j["tinf_eigenvalues"] = ev;
  j["predicted_spectrum"] = pr;
  j["spectrum_match"] = matching_distance(sd.eigenvalues, pred);
  j["T0_identity_defect"] = (ms.T0 - Mat4c::Identity()).norm();
  emit(rc, j.dump(2) + "\n");
  if (!rc.plot.empty()) {
    Json pts = Json::array();
    for (cplx z : fs.points) pts.push_back(to_json(z));
    write_plot(rc.plot,
               {{"tinf_eigenvalues", ev}, {"predicted", pr}, {"loops", to_json(ms)["loops"]}, {"singular_points", pts}},
               kMonodromyPlot);
  }
  return kPass;
}

void error_json(const std::string& kind, const std::string& message, int code, const std::string& stage_name = "") {
  Json e{{"error", kind}, {"message", message}, {"exit_code", code}};
  if (!stage_name.empty()) e["stage"] = stage_name;
  std::cerr << e.dump() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical non-integrability certificates for the planar three-body problem near the parabolic "
               "Lagrange solution"};
  app.require_subcommand(1);
  Flags f;

  auto common = [&f](CLI::App* c) {
    c->add_option("--config", f.config, "JSON config file");
    c->add_option("--tol-transport", f.tol_transport, "transport (continuation) tolerance");
    c->add_option("--tol-residue", f.tol_residue, "residue agreement tolerance");
    c->add_option("--tol-rank", f.tol_rank, "relative rank threshold");
    c->add_option("--max-degree", f.max_degree, "degree bound of the invariant search (1..4)");
    c->add_option("--orientation", f.orientation, "+1 or -1");
    c->add_option("--out", f.out, "output path (default stdout)");
  };
  auto* certify_cmd = app.add_subcommand("certify", "run the full pipeline and write a certificate");
  common(certify_cmd);
  certify_cmd->add_option("--masses", f.masses, "m1,m2,m3");
  certify_cmd->add_option("--format", f.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));

  auto* sweep_cmd = app.add_subcommand("sweep", "certify seeded samples of the mass simplex");
  common(sweep_cmd);
  sweep_cmd->add_option("--samples", f.samples, "number of samples");
  sweep_cmd->add_option("--seed", f.seed, "sweep seed");
  sweep_cmd->add_option("--jobs", f.jobs, "worker threads (0: all cores)");
  sweep_cmd->add_option("--format", f.format, "csv or json")->check(CLI::IsMember({"json", "csv"}));

  std::vector<CLI::App*> stages;
  for (const char* name : {"orbit", "fuchsian", "monodromy"}) {
    auto* c = app.add_subcommand(name, std::string("write the ") + name + " stage output");
    common(c);
    c->add_option("--masses", f.masses, "m1,m2,m3");
    c->add_option("--plot", f.plot, "also write a matplotlib script to this path");
    stages.push_back(c);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    error_json("usage", e.what(), kUsage);
    return kUsage;
  }

  try {
    const RunConfig rc = resolve(f);
    if (*certify_cmd) return cmd_certify(rc);
    if (*sweep_cmd) return cmd_sweep(rc);
    if (*stages[0]) return cmd_orbit(rc);
    if (*stages[1]) return cmd_fuchsian(rc);
    return cmd_monodromy(rc);
  } catch (const usage_error& e) {
    error_json("usage", e.what(), kUsage);
    return kUsage;
  } catch (const pipeline_error& e) {
    error_json("pipeline", e.what(), kPipelineError, e.stage());
    return kPipelineError;
  } catch (const std::exception& e) {
    error_json("pipeline", e.what(), kPipelineError);
    return kPipelineError;
  }
}
