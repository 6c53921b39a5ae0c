#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tbm/monodromy.hpp"
#include "tbm/polynomial.hpp"
#include "tbm/spectral.hpp"

namespace tbm {

// D has ones at (1,2) and (3,4); R = V^-1 D V.
struct NilpotentPair {
  Mat4cd D;
  Mat4cd R;
  Mat4cd V;
};
Mat4cd nilpotent_D();
NilpotentPair make_nilpotent_pair(const Mat4cd& V);

// V with V^-1 N V = D for N of rank 2 and N^2 = 0: columns (N u1, u1, N u2, u2) with u1, u2 the
// top right singular vectors of N.
Mat4cd jordan_basis(const Mat4cd& N);

// Polynomial with integer coefficients in the 16 entries of R, named a1..a4, b1..b4, c1..c4, d1..d4
// by row: R = [a; b; c; d].
class SparsePoly {
 public:
  using Monomial = std::array<std::uint8_t, 16>;

  SparsePoly() = default;
  static SparsePoly constant(std::int64_t c);
  static SparsePoly symbol(int row, int col);

  SparsePoly& operator+=(const SparsePoly& o);
  SparsePoly& operator-=(const SparsePoly& o);
  SparsePoly operator*(const SparsePoly& o) const;
  SparsePoly operator*(std::int64_t c) const;
  SparsePoly operator+(const SparsePoly& o) const { return SparsePoly(*this) += o; }
  SparsePoly operator-(const SparsePoly& o) const { return SparsePoly(*this) -= o; }

  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }
  int degree() const;
  const std::map<Monomial, std::int64_t>& terms() const { return terms_; }

  cplx evaluate(const Mat4cd& R) const;
  std::string render() const;
  static std::string symbol_name(int index);

 private:
  std::map<Monomial, std::int64_t> terms_;
};

struct InvarianceBlock {
  int degree = 0;
  int rows = 0, cols = 0;
  // M = Der(R) K, row-major; each entry is linear in the symbols.
  std::vector<SparsePoly> entries;
  // Columns span the degree-e invariants of D: x2^a x4^b (x1 x4 - x2 x3)^c.
  Eigen::MatrixXi kernel;
  std::vector<std::string> kernel_names;
};

struct ConstraintSystems {
  int max_degree = 0;
  // Coefficients of the characteristic polynomial of R below the leading term:
  // trace, principal 2-minors, principal 3-minors, determinant. All vanish iff R is nilpotent.
  std::array<SparsePoly, 4> nilpotency;
  // Some pair of independent invariants of D of degree <= max_degree is also killed by the
  // derivation of R iff the nullities of the blocks add up to at least 2.
  std::vector<InvarianceBlock> invariance;

  std::string render() const;
};

ConstraintSystems generate_constraints(int d);

// |c_k(R)| / max(1, ||R||)^k for the four nilpotency equations.
std::array<double, 4> evaluate_nilpotency(const ConstraintSystems& sys, const Mat4cd& R);

struct InvarianceEvaluation {
  std::vector<int> nullity;  // per degree 1..max_degree
  int total = 0;
  int independent = 0;  // functionally independent among all kernel polynomials
  bool satisfiable() const { return independent >= 2; }
};
InvarianceEvaluation evaluate_invariance(const ConstraintSystems& sys, const Mat4cd& R, double rel_tol = 1e-6);

struct CertifyConfig {
  TransportOptions transport;
  FuchsianOptions fuchsian;
  SpectralOptions spectral;
  int max_degree = 4;
  int orientation = 1;
  // Relabel the bodies so the smallest mass is body 2 when min/max mass < relabel_ratio.
  // Body 3 is the reference of the reduced coordinates and a light reference body makes the
  // kinetic terms scale like 1/m3. Set relabel_ratio = 0 to keep the given labels.
  double relabel_ratio = 0.1;
  bool precision_ladder = true;
  double identity_tol = 1e-7;     // ||T0 - I||
  double unipotent_tol = 1e-7;    // ||(T - I)^2|| / max(1, ||T - I||^2)
  double relation_tol = 1e-7;     // ||T1 T2 - Tinf^-1||
  double spectrum_tol = 1e-6;     // matching distance to the predicted spectrum
  double orbit_tol = 1e-10;
  double nilpotency_tol = 1e-7;
  void validate() const;
  // Threshold for "spectrum is not {1,1,1,1}".
  double not_ones_threshold() const { return std::max(1e-4, 10 * transport.tol); }
};

struct CheckResult {
  std::string name;
  bool pass = false;
  double residual = 0;
  double tolerance = 0;
  std::string relation;  // "<" or ">": how residual is compared with tolerance
};

struct Certificate {
  MassTriple masses;
  CertifyConfig config;
  double theta = 0, lambda1 = 0, lambda2 = 0;
  std::string orbit_digest, fuchsian_digest, monodromy_digest;
  std::vector<CheckResult> checks;
  std::vector<int> invariant_dimensions;  // per degree 1..max_degree
  std::vector<int> invariant_dimensions_extended;
  int independent_invariants = 0;
  double tinf_distance_to_ones = 0;
  double product_distance_to_ones = 0;
  double lambda1_distance_to_one = 0;  // |exp(2 pi i lambda1) - 1|
  std::array<int, 3> body_order{0, 1, 2};  // masses used = (m[order[0]], m[order[1]], m[order[2]])
  double transport_tol_used = 0;
  bool precision_escalated = false;
  std::string verdict;  // "pass", "fail" or "no verdict"
  std::string failed_stage;
  std::string error;
  // Chart and loop conventions of the run.
  std::string chart, gauge, relation;
  std::vector<int> ccw_order;
  cplx basepoint;

  const CheckResult* find(const std::string& name) const;
};

// Full pipeline: orbit, Fuchsian reduction, monodromy, spectral and invariant checks.
// Stage failures give verdict "no verdict" with failed_stage set; nothing is thrown.
Certificate certify(const MassTriple& m, const CertifyConfig& config = {});

std::array<int, 3> body_order(const MassTriple& m, double relabel_ratio);

// True when 13 + sqrt(theta) is an odd perfect square, the only way exp(2 pi i lambda1) = 1.
bool lambda1_resonant(double theta);

}  // namespace tbm
