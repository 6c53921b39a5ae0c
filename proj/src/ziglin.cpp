#include "tbm/ziglin.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include "tbm/errors.hpp"
#include "tbm/json_io.hpp"

namespace tbm {

Mat4cd nilpotent_D() {
  Mat4cd D = Mat4cd::Zero();
  D(0, 1) = 1;
  D(2, 3) = 1;
  return D;
}

NilpotentPair make_nilpotent_pair(const Mat4cd& V) {
  NilpotentPair p;
  p.D = nilpotent_D();
  p.V = V;
  p.R = V.inverse() * p.D * V;
  return p;
}

Mat4cd jordan_basis(const Mat4cd& N) {
  Eigen::JacobiSVD<Mat4cd> svd(N, Eigen::ComputeFullV);
  const Eigen::Vector4cd u1 = svd.matrixV().col(0), u2 = svd.matrixV().col(1);
  Mat4cd V;
  V << N * u1, u1, N * u2, u2;
  return V;
}

// ---------------------------------------------------------------------------
// SparsePoly

SparsePoly SparsePoly::constant(std::int64_t c) {
  SparsePoly p;
  if (c != 0) p.terms_[Monomial{}] = c;
  return p;
}

SparsePoly SparsePoly::symbol(int row, int col) {
  SparsePoly p;
  Monomial m{};
  m[4 * row + col] = 1;
  p.terms_[m] = 1;
  return p;
}

SparsePoly& SparsePoly::operator+=(const SparsePoly& o) {
  for (const auto& [m, c] : o.terms_) {
    auto it = terms_.find(m);
    if (it == terms_.end()) {
      terms_.emplace(m, c);
    } else if ((it->second += c) == 0) {
      terms_.erase(it);
    }
  }
  return *this;
}

SparsePoly& SparsePoly::operator-=(const SparsePoly& o) { return *this += o * -1; }

SparsePoly SparsePoly::operator*(const SparsePoly& o) const {
  SparsePoly out;
  for (const auto& [ma, ca] : terms_)
    for (const auto& [mb, cb] : o.terms_) {
      Monomial m;
      for (int i = 0; i < 16; ++i) m[i] = static_cast<std::uint8_t>(ma[i] + mb[i]);
      SparsePoly t;
      t.terms_[m] = ca * cb;
      out += t;
    }
  return out;
}

SparsePoly SparsePoly::operator*(std::int64_t c) const {
  SparsePoly out;
  if (c == 0) return out;
  for (const auto& [m, v] : terms_) out.terms_[m] = v * c;
  return out;
}

int SparsePoly::degree() const {
  int d = 0;
  for (const auto& [m, c] : terms_) {
    int s = 0;
    for (auto e : m) s += e;
    d = std::max(d, s);
  }
  return d;
}

cplx SparsePoly::evaluate(const Mat4cd& R) const {
  cplx sum = 0;
  for (const auto& [m, c] : terms_) {
    cplx t = static_cast<double>(c);
    for (int i = 0; i < 16; ++i)
      for (int e = 0; e < m[i]; ++e) t *= R(i / 4, i % 4);
    sum += t;
  }
  return sum;
}

std::string SparsePoly::symbol_name(int index) {
  return std::string(1, "abcd"[index / 4]) + std::to_string(index % 4 + 1);
}

std::string SparsePoly::render() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  // Reverse map order puts higher powers of a1 first, which reads naturally.
  for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
    const auto& [m, c] = *it;
    std::string mono;
    for (int i = 0; i < 16; ++i)
      for (int e = 0; e < m[i]; ++e) mono += (mono.empty() ? "" : "*") + symbol_name(i);
    const std::int64_t a = c < 0 ? -c : c;
    if (first)
      os << (c < 0 ? "-" : "");
    else
      os << (c < 0 ? " - " : " + ");
    first = false;
    if (mono.empty())
      os << a;
    else if (a == 1)
      os << mono;
    else
      os << a << "*" << mono;
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Constraint systems

namespace {

using SymMatrix = std::vector<std::vector<SparsePoly>>;

SparsePoly symbolic_det(const SymMatrix& A) {
  const std::size_t n = A.size();
  if (n == 1) return A[0][0];
  SparsePoly det;
  for (std::size_t j = 0; j < n; ++j) {
    if (A[0][j].is_zero()) continue;
    SymMatrix minor;
    for (std::size_t r = 1; r < n; ++r) {
      std::vector<SparsePoly> row;
      for (std::size_t c = 0; c < n; ++c)
        if (c != j) row.push_back(A[r][c]);
      minor.push_back(row);
    }
    const SparsePoly term = A[0][j] * symbolic_det(minor);
    if (j % 2 == 0)
      det += term;
    else
      det -= term;
  }
  return det;
}

SparsePoly principal_minor_sum(int k) {
  SparsePoly sum;
  for (int mask = 0; mask < 16; ++mask) {
    if (__builtin_popcount(mask) != k) continue;
    std::vector<int> idx;
    for (int i = 0; i < 4; ++i)
      if (mask & (1 << i)) idx.push_back(i);
    SymMatrix A;
    for (int r : idx) {
      std::vector<SparsePoly> row;
      for (int c : idx) row.push_back(SparsePoly::symbol(r, c));
      A.push_back(row);
    }
    sum += symbolic_det(A);
  }
  return sum;
}

using IntPoly = std::map<Exponent, std::int64_t>;

IntPoly multiply(const IntPoly& a, const IntPoly& b) {
  IntPoly out;
  for (const auto& [ea, ca] : a)
    for (const auto& [eb, cb] : b) {
      Exponent e;
      for (int i = 0; i < 4; ++i) e[i] = ea[i] + eb[i];
      out[e] += ca * cb;
    }
  std::erase_if(out, [](const auto& kv) { return kv.second == 0; });
  return out;
}

IntPoly power(const IntPoly& p, int n) {
  IntPoly out{{Exponent{0, 0, 0, 0}, 1}};
  for (int i = 0; i < n; ++i) out = multiply(out, p);
  return out;
}

InvarianceBlock invariance_block(int e) {
  const PolySpace space(e);
  InvarianceBlock b;
  b.degree = e;
  const IntPoly x2{{Exponent{0, 1, 0, 0}, 1}}, x4{{Exponent{0, 0, 0, 1}, 1}};
  const IntPoly Q{{Exponent{1, 0, 0, 1}, 1}, {Exponent{0, 1, 1, 0}, -1}};
  std::vector<IntPoly> basis;
  for (int c = e / 2; c >= 0; --c)
    for (int a = e - 2 * c; a >= 0; --a) {
      const int bb = e - 2 * c - a;
      basis.push_back(multiply(multiply(power(x2, a), power(x4, bb)), power(Q, c)));
      std::string name;
      auto add = [&name](const std::string& f, int n) {
        if (n == 0) return;
        if (!name.empty()) name += "*";
        name += f + (n > 1 ? "^" + std::to_string(n) : "");
      };
      add("x2", a);
      add("x4", bb);
      add("(x1*x4 - x2*x3)", c);
      b.kernel_names.push_back(name);
    }
  b.kernel = Eigen::MatrixXi::Zero(space.dim(), static_cast<int>(basis.size()));
  for (std::size_t j = 0; j < basis.size(); ++j)
    for (const auto& [ex, c] : basis[j]) b.kernel(space.index(ex), static_cast<int>(j)) = static_cast<int>(c);

  // Symbolic derivation of R on degree-e monomials.
  std::vector<std::vector<SparsePoly>> der(space.dim(), std::vector<SparsePoly>(space.dim()));
  for (int j = 0; j < space.dim(); ++j) {
    const Exponent& ex = space.monomial(j);
    for (int i = 0; i < 4; ++i) {
      if (ex[i] == 0) continue;
      for (int k = 0; k < 4; ++k) {
        Exponent f = ex;
        --f[i];
        ++f[k];
        der[space.index(f)][j] += SparsePoly::symbol(i, k) * ex[i];
      }
    }
  }
  b.rows = space.dim();
  b.cols = static_cast<int>(basis.size());
  for (int r = 0; r < b.rows; ++r)
    for (int c = 0; c < b.cols; ++c) {
      SparsePoly entry;
      for (int j = 0; j < space.dim(); ++j)
        if (b.kernel(j, c) != 0) entry += der[r][j] * b.kernel(j, c);
      b.entries.push_back(entry);
    }
  return b;
}

}  // namespace

ConstraintSystems generate_constraints(int d) {
  if (d < 1 || d > 4) throw std::invalid_argument("generate_constraints: degree must be in 1..4");
  ConstraintSystems s;
  s.max_degree = d;
  for (int k = 1; k <= 4; ++k) s.nilpotency[k - 1] = principal_minor_sum(k);
  for (int e = 1; e <= d; ++e) s.invariance.push_back(invariance_block(e));
  return s;
}

std::string ConstraintSystems::render() const {
  static const char* names[] = {"trace", "principal 2-minors", "principal 3-minors", "determinant"};
  std::ostringstream os;
  os << "# nilpotency of R: characteristic polynomial equals lambda^4\n";
  for (int k = 0; k < 4; ++k) os << names[k] << ": " << nilpotency[k].render() << " = 0\n";
  os << "# invariance: M_e = Der(R) K_e, need sum_e nullity(M_e) >= 2 for e <= " << max_degree << "\n";
  for (const auto& b : invariance) {
    os << "degree " << b.degree << ": K = [";
    for (std::size_t i = 0; i < b.kernel_names.size(); ++i) os << (i ? ", " : "") << b.kernel_names[i];
    os << "], M is " << b.rows << "x" << b.cols << "\n";
    const PolySpace space(b.degree);
    for (int r = 0; r < b.rows; ++r)
      for (int c = 0; c < b.cols; ++c) {
        const auto& p = b.entries[r * b.cols + c];
        if (!p.is_zero()) os << "  [" << space.name(r) << ", " << b.kernel_names[c] << "] " << p.render() << "\n";
      }
  }
  return os.str();
}

std::array<double, 4> evaluate_nilpotency(const ConstraintSystems& sys, const Mat4cd& R) {
  const double scale = std::max(1.0, R.norm());
  std::array<double, 4> out{};
  for (int k = 0; k < 4; ++k) out[k] = std::abs(sys.nilpotency[k].evaluate(R)) / std::pow(scale, k + 1);
  return out;
}

InvarianceEvaluation evaluate_invariance(const ConstraintSystems& sys, const Mat4cd& R, double rel_tol) {
  InvarianceEvaluation ev;
  std::vector<std::pair<int, VecXcd>> found;
  for (const auto& b : sys.invariance) {
    Eigen::MatrixXcd M(b.rows, b.cols);
    for (int r = 0; r < b.rows; ++r)
      for (int c = 0; c < b.cols; ++c) M(r, c) = b.entries[r * b.cols + c].evaluate(R);
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(M, Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    int rank = 0;
    if (s.size() > 0 && s(0) > 0)
      for (int i = 0; i < s.size(); ++i) rank += s(i) > rel_tol * s(0);
    ev.nullity.push_back(b.cols - rank);
    ev.total += b.cols - rank;
    const Eigen::MatrixXcd K = b.kernel.cast<cplx>();
    for (int c = rank; c < b.cols; ++c) found.emplace_back(b.degree, K * svd.matrixV().col(c));
  }
  ev.independent = functional_rank(found);
  return ev;
}

// ---------------------------------------------------------------------------
// Certificate

void CertifyConfig::validate() const {
  auto positive = [](double v, const char* what) {
    if (!(v > 0) || !std::isfinite(v)) throw std::invalid_argument(std::string(what) + " must be positive");
  };
  positive(transport.tol, "transport tolerance");
  positive(fuchsian.residue_tol, "residue tolerance");
  positive(fuchsian.remainder_tol, "remainder tolerance");
  positive(spectral.rank_tol, "rank tolerance");
  positive(spectral.cluster_tol, "cluster tolerance");
  if (!(relabel_ratio >= 0 && relabel_ratio <= 1)) throw std::invalid_argument("relabel ratio must be in [0, 1]");
  if (max_degree < 1 || max_degree > 4) throw std::invalid_argument("max degree must be in 1..4");
  if (orientation != 1 && orientation != -1) throw std::invalid_argument("orientation must be +1 or -1");
}

const CheckResult* Certificate::find(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

std::array<int, 3> body_order(const MassTriple& m, double relabel_ratio) {
  const double v[3] = {m.m1, m.m2, m.m3};
  const int lo = static_cast<int>(std::min_element(v, v + 3) - v);
  const double hi = *std::max_element(v, v + 3);
  if (lo == 1 || !(v[lo] < relabel_ratio * hi)) return {0, 1, 2};
  return lo == 0 ? std::array<int, 3>{1, 0, 2} : std::array<int, 3>{0, 2, 1};
}

bool lambda1_resonant(double theta) {
  const double x = 13 + std::sqrt(theta);
  const double n = std::round(std::sqrt(x));
  return static_cast<long>(n) % 2 == 1 && std::abs(x - n * n) <= 1e-12 * x;
}

namespace {

CheckResult below(std::string name, double residual, double tol) {
  return {std::move(name), residual < tol, residual, tol, "<"};
}

CheckResult above(std::string name, double residual, double tol) {
  return {std::move(name), residual > tol, residual, tol, ">"};
}

bool near_miss(const Certificate& c) {
  for (const auto& k : c.checks) {
    if (k.pass) continue;
    if (k.relation == "<" && k.residual <= 10 * k.tolerance) return true;
    if (k.relation == ">" && k.residual >= 0.1 * k.tolerance) return true;
  }
  return false;
}

Certificate attempt(const MassTriple& m, const CertifyConfig& cfg, double transport_tol) {
  Certificate c;
  c.masses = m;
  c.config = cfg;
  c.theta = m.theta();
  c.lambda1 = m.lambda1();
  c.lambda2 = m.lambda2();
  c.lambda1_distance_to_one = std::abs(std::exp(cplx(0, 2 * M_PI * c.lambda1)) - 1.0);
  c.transport_tol_used = transport_tol;

  std::string stage;
  try {
    stage = "orbit";
    c.body_order = body_order(m, cfg.relabel_ratio);
    const double v[3] = {m.m1, m.m2, m.m3};
    const MassTriple used = MassTriple::make(v[c.body_order[0]], v[c.body_order[1]], v[c.body_order[2]]);
    const LagrangeParam p = solve_parametrization(used, cfg.orientation);
    const auto grid = orbit_test_grid(p);
    c.orbit_digest = digest(to_json(p));
    c.checks.push_back(below("orbit_residual", orbit_residual(p, grid), cfg.orbit_tol));
    c.checks.push_back(below("orbit_energy", orbit_energy_defect(p, grid), cfg.orbit_tol));

    stage = "fuchsian";
    const FuchsianSystem fs = build_fuchsian(p, cfg.fuchsian);
    c.fuchsian_digest = digest(to_json(fs));
    c.chart = fs.chart.type;
    c.gauge = fs.chart.gauge;
    c.basepoint = fs.basepoint;
    c.checks.push_back(below("fuchsian_residue_agreement", fs.residue_agreement, cfg.fuchsian.residue_tol));
    c.checks.push_back(below("fuchsian_remainder", fs.fuchsian_remainder, cfg.fuchsian.remainder_tol));
    c.checks.push_back(below("tau0_integer_exponents", fs.tau0_integer_defect, cfg.fuchsian.integer_tol));
    c.checks.push_back(below("infinity_exponents", fs.infinity_exponent_defect, cfg.fuchsian.integer_tol));

    stage = "monodromy";
    TransportOptions topt = cfg.transport;
    topt.tol = transport_tol;
    const MonodromySet ms = generators(fs, topt);
    c.monodromy_digest = digest(to_json(ms));
    c.relation = ms.relation;
    c.ccw_order = ms.ccw_order;

    stage = "spectral";
    c.checks.push_back(below("T0_identity", (ms.T0 - Mat4c::Identity()).norm(), cfg.identity_tol));
    for (int i : {1, 2}) {
      const auto u = unipotency(ms.generator(i), cfg.spectral.rank_tol);
      auto chk = below("T" + std::to_string(i) + "_unipotent", u.square_residual, cfg.unipotent_tol);
      // Jordan type (2,2) means rank(T - I) = 2.
      chk.pass = chk.pass && u.rank == 2;
      c.checks.push_back(chk);
    }
    const Mat4c product = ms.T1 * ms.T2;
    c.checks.push_back(below("product_relation", (product - ms.Tinf.inverse()).norm(), cfg.relation_tol));
    const auto sinf = spectral_analysis(ms.Tinf, cfg.spectral);
    c.checks.push_back(
        below("spectrum_match", matching_distance(sinf.eigenvalues, theoretical_spectrum(m)), cfg.spectrum_tol));
    c.tinf_distance_to_ones = distance_to_ones(sinf.eigenvalues);
    c.product_distance_to_ones = distance_to_ones(spectral_analysis(product, cfg.spectral).eigenvalues);
    c.checks.push_back(above("spectrum_not_all_ones", c.tinf_distance_to_ones, cfg.not_ones_threshold()));
    c.checks.push_back(
        above("product_spectrum_not_all_ones", c.product_distance_to_ones, cfg.not_ones_threshold()));
    {
      // Residual: distance from 13 + sqrt(theta) to the nearest odd square.
      const double x = 13 + std::sqrt(c.theta);
      double lo = std::floor(std::sqrt(x));
      if (std::fmod(lo, 2) == 0) lo -= 1;
      auto chk = above("lambda1_guard", std::min(x - lo * lo, (lo + 2) * (lo + 2) - x), 0.0);
      chk.pass = !lambda1_resonant(c.theta);
      c.checks.push_back(chk);
    }

    stage = "invariants";
    // Balanced generators; dimensions and the derivation template are conjugation invariant.
    const Mat4c B = minimal_norm_conjugation({ms.T1 - Mat4c::Identity(), ms.T2 - Mat4c::Identity()});
    const Mat4c Bi = B.inverse();
    const std::vector<Mat4cd> gens{Bi * ms.T1 * B, Bi * ms.T2 * B};
    const Mat4cd V = jordan_basis(gens[0] - Mat4c::Identity());
    const Mat4cd R = V.inverse() * (gens[1] - Mat4c::Identity()) * V;
    const ConstraintSystems sys = generate_constraints(cfg.max_degree);
    const auto nil = evaluate_nilpotency(sys, R);
    c.checks.push_back(below("nilpotency_system", *std::max_element(nil.begin(), nil.end()), cfg.nilpotency_tol));
    const auto inv = evaluate_invariance(sys, R, cfg.spectral.rank_tol);
    c.checks.push_back(below("invariance_system", inv.independent, 2.0));

    int mismatch = 0;
    std::vector<std::pair<int, VecXcd>> found;
    for (int d = 1; d <= cfg.max_degree; ++d) {
      const auto space = invariant_dimension(gens, d, cfg.spectral.rank_tol);
      const int ext = invariant_dimension_extended(gens, d, cfg.spectral.rank_tol);
      c.invariant_dimensions.push_back(space.dimension);
      c.invariant_dimensions_extended.push_back(ext);
      mismatch += std::abs(space.dimension - ext);
      for (int k = 0; k < space.dimension; ++k) found.emplace_back(d, space.basis.col(k));
    }
    c.independent_invariants = functional_rank(found);
    c.checks.push_back(below("invariant_dimensions", c.independent_invariants, 2.0));
    c.checks.push_back(below("invariant_dimensions_precision", mismatch, 1.0));
  } catch (const std::exception& e) {
    c.verdict = "no verdict";
    c.failed_stage = stage;
    c.error = e.what();
    return c;
  }
  const bool all = std::all_of(c.checks.begin(), c.checks.end(), [](const CheckResult& k) { return k.pass; });
  c.verdict = all ? "pass" : "fail";
  return c;
}

}  // namespace

Certificate certify(const MassTriple& m, const CertifyConfig& config) {
  m.validate();
  config.validate();
  Certificate c = attempt(m, config, config.transport.tol);
  if (config.precision_ladder && c.verdict == "fail" && near_miss(c)) {
    const double finer = std::max(config.transport.tol / 100, 1e-14);
    if (finer < config.transport.tol) {
      c = attempt(m, config, finer);
      c.precision_escalated = true;
    }
  }
  return c;
}

}  // namespace tbm
