#include "tbm/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iomanip>
#include <limits>
#include <random>
#include <sstream>
#include <thread>

namespace tbm {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

namespace {

// (0, 1], from the top 53 bits; std::uniform_real_distribution is not portable across libraries.
double open_unit(std::mt19937_64& g) { return (static_cast<double>(g() >> 11) + 1.0) * 0x1.0p-53; }

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}

}  // namespace

MassTriple simplex_sample(std::uint64_t seed, int i, double floor, double total) {
  if (!(floor >= 0) || !(total > 3 * floor)) throw std::invalid_argument("simplex_sample: empty simplex");
  std::mt19937_64 g(splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(i))));
  // Normalized exponentials are uniform on the simplex.
  double e[3], s = 0;
  for (double& x : e) s += (x = -std::log(open_unit(g)));
  const double room = total - 3 * floor;
  return MassTriple::make(floor + room * e[0] / s, floor + room * e[1] / s, floor + room * e[2] / s);
}

SweepRow sweep_row(int index, const MassTriple& m, const CertifyConfig& cfg) {
  SweepRow r;
  r.index = index;
  r.masses = m;
  r.theta = m.theta();
  r.lambda1 = m.lambda1();
  r.lambda2 = m.lambda2();
  r.lambda1_distance_to_one = std::abs(std::exp(cplx(0, 2 * M_PI * r.lambda1)) - 1.0);
  r.guard = !lambda1_resonant(r.theta);
  try {
    const Certificate c = certify(m, cfg);
    r.verdict = c.verdict;
    r.tinf_distance_to_ones = c.tinf_distance_to_ones;
    r.product_distance_to_ones = c.product_distance_to_ones;
    for (const auto& k : c.checks)
      if (!k.pass) r.failed_checks += (r.failed_checks.empty() ? "" : ";") + k.name;
    if (!c.failed_stage.empty()) r.error = c.failed_stage + ": " + c.error;
  } catch (const std::exception& e) {
    r.verdict = "no verdict";
    r.error = e.what();
  }
  return r;
}

std::vector<SweepRow> run_sweep(const SweepConfig& cfg) {
  if (cfg.samples < 1) throw std::invalid_argument("samples must be >= 1");
  cfg.certify.validate();
  std::vector<SweepRow> rows(cfg.samples);
  int jobs = cfg.jobs > 0 ? cfg.jobs : static_cast<int>(std::thread::hardware_concurrency());
  jobs = std::clamp(jobs, 1, cfg.samples);
  std::atomic<int> next{0};
  auto work = [&] {
    for (int i = next++; i < cfg.samples; i = next++)
      rows[i] = sweep_row(i, simplex_sample(cfg.seed, i, cfg.floor, cfg.total), cfg.certify);
  };
  std::vector<std::thread> pool;
  for (int t = 1; t < jobs; ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  return rows;
}

void write_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
  os << "index,m1,m2,m3,theta,lambda1,lambda2,tinf_distance_to_ones,product_distance_to_ones,"
        "lambda1_distance_to_one,guard,verdict,failed_checks,error\n";
  std::ostringstream line;
  line << std::setprecision(17);
  for (const auto& r : rows) {
    line.str("");
    line << r.index << ',' << r.masses.m1 << ',' << r.masses.m2 << ',' << r.masses.m3 << ',' << r.theta << ','
         << r.lambda1 << ',' << r.lambda2 << ',' << r.tinf_distance_to_ones << ',' << r.product_distance_to_ones << ','
         << r.lambda1_distance_to_one << ',' << (r.guard ? "true" : "false") << ',' << r.verdict << ','
         << csv_escape(r.failed_checks) << ',' << csv_escape(r.error) << '\n';
    os << line.str();
  }
}

SweepSummary summarize(const std::vector<SweepRow>& rows) {
  SweepSummary s;
  s.samples = static_cast<int>(rows.size());
  s.min_tinf_distance_to_ones = std::numeric_limits<double>::infinity();
  s.min_lambda1_distance_to_one = std::numeric_limits<double>::infinity();
  for (const auto& r : rows) {
    s.passed += r.verdict == "pass";
    s.errors += r.verdict == "no verdict";
    if (r.verdict != "no verdict") s.min_tinf_distance_to_ones = std::min(s.min_tinf_distance_to_ones, r.tinf_distance_to_ones);
    s.min_lambda1_distance_to_one = std::min(s.min_lambda1_distance_to_one, r.lambda1_distance_to_one);
    s.guard_holds = s.guard_holds && r.guard;
  }
  return s;
}

}  // namespace tbm
