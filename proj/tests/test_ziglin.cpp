#include <doctest.h>

#include <random>
#include <sstream>

#include "tbm/json_io.hpp"
#include "tbm/sweep.hpp"

using namespace tbm;

namespace {

std::mt19937_64 rng(7);

cplx gauss_c() {
  static std::normal_distribution<double> g;
  return {g(rng), g(rng)};
}

Mat4cd random_matrix() {
  Mat4cd A;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) A(i, j) = gauss_c();
  return A;
}

VecXcd random_poly(const PolySpace& s) {
  VecXcd J(s.dim());
  for (int i = 0; i < s.dim(); ++i) J(i) = gauss_c();
  return J;
}

VecXcd monomial(const PolySpace& s, Exponent e, cplx c = 1) {
  VecXcd J = VecXcd::Zero(s.dim());
  J(s.index(e)) = c;
  return J;
}

long binom(int n, int k) {
  long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

TEST_CASE("PolySpace basis") {
  for (int d = 0; d <= 6; ++d) CHECK(PolySpace(d).dim() == binom(d + 3, 3));
  const PolySpace s(2);
  CHECK(s.monomial(0) == Exponent{2, 0, 0, 0});
  CHECK(s.monomial(1) == Exponent{1, 1, 0, 0});
  CHECK(s.monomial(s.dim() - 1) == Exponent{0, 0, 0, 2});
  CHECK(s.name(1) == "x1*x2");
  CHECK(s.index(Exponent{1, 0, 0, 0}) == -1);
  for (int i = 0; i < s.dim(); ++i) CHECK(s.index(s.monomial(i)) == i);
}

TEST_CASE("derivation of D") {
  const Mat4cd D = nilpotent_D();
  const PolySpace s1(1), s2(2);
  CHECK((derivation_apply(D, monomial(s1, {1, 0, 0, 0}), s1) - monomial(s1, {0, 1, 0, 0})).norm() == 0);
  CHECK(derivation_apply(D, monomial(s2, {0, 1, 0, 1}), s2).norm() == 0);
  const VecXcd Q = monomial(s2, {1, 0, 0, 1}) - monomial(s2, {0, 1, 1, 0});
  CHECK(derivation_apply(D, Q, s2).norm() == 0);
  // x3 -> x4.
  CHECK((derivation_apply(D, monomial(s1, {0, 0, 1, 0}), s1) - monomial(s1, {0, 0, 0, 1})).norm() == 0);
  CHECK_THROWS_AS(derivation_apply(Mat4cd::Identity(), monomial(s1, {1, 0, 0, 0}), s1), std::invalid_argument);
}

TEST_CASE("composition invariance and derivation agree") {
  const Mat4cd D = nilpotent_D();
  const PolySpace s0(0), s1(1);
  auto r = unipotent_invariance_check(D, VecXcd::Constant(1, 3.0), s0);
  CHECK(r.composition_invariant);
  CHECK(r.derivation_annihilated);
  r = unipotent_invariance_check(D, monomial(s1, {1, 0, 0, 0}), s1);
  CHECK_FALSE(r.composition_invariant);
  CHECK_FALSE(r.derivation_annihilated);

  int invariant = 0;
  for (int k = 0; k < 50; ++k) {
    const PolySpace s(1 + k % 4);
    // Half of the samples are built from invariants of D: x2, x4 and x1 x4 - x2 x3.
    VecXcd J = random_poly(s);
    if (k % 2 == 0) {
      const auto sys = generate_constraints(4);
      const auto& K = sys.invariance[s.degree() - 1].kernel;
      J = K.cast<cplx>() * VecXcd::NullaryExpr(K.cols(), [] { return gauss_c(); });
    }
    r = unipotent_invariance_check(D, J, s);
    CHECK(r.composition_invariant == r.derivation_annihilated);
    invariant += r.composition_invariant;
  }
  CHECK(invariant == 25);
}

TEST_CASE("induced action is a contravariant functor") {
  for (int k = 0; k < 20; ++k) {
    const Mat4cd T = random_matrix(), S = random_matrix();
    const PolySpace s(1 + k % 4);
    const Eigen::MatrixXcd lhs = induced_action<cplx>(Mat4cd(T * S), s);
    const Eigen::MatrixXcd rhs = induced_action<cplx>(S, s) * induced_action<cplx>(T, s);
    CHECK((lhs - rhs).norm() < 1e-10 * lhs.norm());
  }
  const PolySpace s(3);
  CHECK((induced_action<cplx>(Mat4cd::Identity(), s) - Eigen::MatrixXcd::Identity(s.dim(), s.dim())).norm() == 0);
  // Degree 1 is the transpose: (x -> T x) pulls x_i back to sum_k T_ik x_k.
  const Mat4cd T = random_matrix();
  CHECK((induced_action<cplx>(T, PolySpace(1)) - Eigen::MatrixXcd(T.transpose())).norm() < 1e-14);
}

TEST_CASE("induced action in extended precision agrees") {
  using cl = std::complex<long double>;
  const Mat4cd T = random_matrix();
  const PolySpace s(4);
  const Eigen::MatrixXcd a = induced_action<cplx>(T, s);
  const MatX<cl> b = induced_action<cl>(Mat4<cl>(T.cast<cl>()), s);
  CHECK((a - b.cast<cplx>()).norm() < 1e-12 * a.norm());
}

TEST_CASE("invariant dimension oracle cases") {
  for (int d = 1; d <= 4; ++d) {
    const auto inv = invariant_dimension({Mat4cd::Identity()}, d);
    CHECK(inv.dimension == PolySpace(d).dim());
    CHECK(invariant_dimension_extended({Mat4cd::Identity()}, d) == PolySpace(d).dim());
  }
  Mat4cd T = Mat4cd::Zero();
  T.diagonal() << 2.0, 0.5, 3.0, 1.0 / 3;
  // Brute force: a monomial is fixed iff the product of its diagonal factors is 1.
  for (int d = 1; d <= 4; ++d) {
    const PolySpace s(d);
    int fixed = 0;
    for (const auto& e : s.monomials()) {
      cplx f = 1;
      for (int v = 0; v < 4; ++v) f *= std::pow(T(v, v), e[v]);
      fixed += std::abs(f - 1.0) < 1e-12;
    }
    CHECK(invariant_dimension({T}, d).dimension == fixed);
    CHECK(invariant_dimension_extended({T}, d) == fixed);
  }
  const auto inv = invariant_dimension({T}, 2);
  CHECK(inv.dimension == 2);
  // Basis spans x1 x2 and x3 x4.
  const PolySpace s2(2);
  for (int i = 0; i < s2.dim(); ++i) {
    const auto& e = s2.monomial(i);
    const bool allowed = e == Exponent{1, 1, 0, 0} || e == Exponent{0, 0, 1, 1};
    if (!allowed) CHECK(inv.basis.row(i).norm() < 1e-12);
  }
}

TEST_CASE("fixed space of I + N equals the derivation kernel") {
  for (int k = 0; k < 10; ++k) {
    const Mat4cd V = random_matrix();
    const Mat4cd N = V.inverse() * nilpotent_D() * V;
    for (int d = 1; d <= 4; ++d) {
      const PolySpace s(d);
      const Eigen::MatrixXcd fix =
          induced_action<cplx>(Mat4cd(Mat4cd::Identity() + N), s) - Eigen::MatrixXcd::Identity(s.dim(), s.dim());
      const auto cmp = compare_kernels(fix, derivation_matrix<cplx>(N, s));
      CHECK(cmp.equal());
      // Invariants of two 2-blocks: x2^a x4^b Q^c, a + b + 2c = d.
      int expected = 0;
      for (int c = 0; 2 * c <= d; ++c) expected += d - 2 * c + 1;
      CHECK(cmp.dim_a == expected);
    }
  }
}

TEST_CASE("functional rank") {
  const PolySpace s2(2), s4(4);
  const VecXcd Q = monomial(s2, {1, 0, 0, 1}) - monomial(s2, {0, 1, 1, 0});
  // Q^2 = x1^2 x4^2 - 2 x1 x2 x3 x4 + x2^2 x3^2.
  const VecXcd Q2 = monomial(s4, {2, 0, 0, 2}) - monomial(s4, {1, 1, 1, 1}, 2.0) + monomial(s4, {0, 2, 2, 0});
  CHECK(functional_rank({{2, Q}, {4, Q2}}) == 1);
  CHECK(functional_rank({{2, Q}, {2, monomial(s2, {0, 1, 0, 1})}}) == 2);
  CHECK(functional_rank({}) == 0);
}

TEST_CASE("nilpotency equations") {
  const auto sys = generate_constraints(2);
  CHECK(sys.nilpotency[0].render() == "a1 + b2 + c3 + d4");
  CHECK(sys.nilpotency[3].size() == 24);
  for (int k = 0; k < 4; ++k) CHECK(sys.nilpotency[k].degree() == k + 1);
  for (int k = 0; k < 4; ++k) CHECK(sys.nilpotency[k].evaluate(nilpotent_D()) == cplx(0));
  // char poly of I is (lambda - 1)^4: coefficients 4, 6, 4, 1.
  const double binoms[] = {4, 6, 4, 1};
  for (int k = 0; k < 4; ++k) CHECK(sys.nilpotency[k].evaluate(Mat4cd::Identity()) == cplx(binoms[k]));
  // Elementary symmetric functions of the eigenvalues.
  const Mat4cd A = random_matrix();
  Eigen::ComplexEigenSolver<Mat4cd> es(A);
  const auto& ev = es.eigenvalues();
  cplx e[5] = {1, 0, 0, 0, 0};
  for (int i = 0; i < 4; ++i)
    for (int k = 4; k >= 1; --k) e[k] += e[k - 1] * ev(i);
  for (int k = 0; k < 4; ++k) CHECK(std::abs(sys.nilpotency[k].evaluate(A) - e[k + 1]) < 1e-10 * std::pow(A.norm(), k + 1));
  for (int k = 0; k < 100; ++k) {
    const auto pr = make_nilpotent_pair(random_matrix());
    const auto res = evaluate_nilpotency(sys, pr.R);
    for (double r : res) CHECK(r < 1e-10);
  }
  const auto at_one = evaluate_nilpotency(sys, Mat4cd::Identity());
  CHECK(at_one[0] == doctest::Approx(2.0));  // |tr I| / ||I||_F
  CHECK_THROWS_AS(generate_constraints(0), std::invalid_argument);
  CHECK_THROWS_AS(generate_constraints(5), std::invalid_argument);
}

TEST_CASE("invariance template") {
  const auto sys = generate_constraints(4);
  for (const auto& b : sys.invariance) {
    const PolySpace s(b.degree);
    CHECK((derivation_matrix<cplx>(nilpotent_D(), s) * b.kernel.cast<cplx>()).norm() == 0);
    CHECK(b.cols == derivation_kernel_dimension({nilpotent_D()}, b.degree));
    CHECK(b.rows == s.dim());
  }
  const auto two = generate_constraints(2);
  const auto ev = evaluate_invariance(two, nilpotent_D());
  // x2, x4; then x2^2, x2*x4, x4^2 and Q.
  CHECK(ev.nullity == std::vector<int>{2, 4});
  CHECK(ev.satisfiable());
  // Dual route: nullities equal the common kernel of both derivations.
  for (int k = 0; k < 5; ++k) {
    const auto pr = make_nilpotent_pair(random_matrix());
    const auto e = evaluate_invariance(sys, pr.R);
    for (int d = 1; d <= 4; ++d) CHECK(e.nullity[d - 1] == derivation_kernel_dimension({pr.D, pr.R}, d));
  }
  CHECK_FALSE(two.render().empty());
}

TEST_CASE("Jordan basis") {
  for (int k = 0; k < 10; ++k) {
    const Mat4cd W = random_matrix();
    const Mat4cd N = W * nilpotent_D() * W.inverse();
    const Mat4cd V = jordan_basis(N);
    CHECK((V.inverse() * N * V - nilpotent_D()).norm() < 1e-10 * std::max(1.0, N.norm()));
  }
}

TEST_CASE("lambda1 resonance") {
  CHECK_FALSE(lambda1_resonant(0));
  CHECK(lambda1_resonant(144));  // 13 + 12 = 25, outside the attainable range
  CHECK_FALSE(lambda1_resonant(16));
  CHECK(body_order(MassTriple::make(1, 2, 3), 0.1) == std::array<int, 3>{0, 1, 2});
  CHECK(body_order(MassTriple::make(1, 1, 0.001), 0.1) == std::array<int, 3>{0, 2, 1});
  CHECK(body_order(MassTriple::make(0.001, 1, 1), 0.1) == std::array<int, 3>{1, 0, 2});
  CHECK(body_order(MassTriple::make(0.001, 1, 1), 0) == std::array<int, 3>{0, 1, 2});
}

TEST_CASE("certificates") {
  const auto c = certify(MassTriple::make(1, 1, 1));
  CHECK(c.verdict == "pass");
  CHECK(c.theta == 0);
  CHECK(c.invariant_dimensions == c.invariant_dimensions_extended);
  CHECK(c.independent_invariants < 2);
  const double l = 1.5 + std::sqrt(13.0) / 2;
  CHECK(c.tinf_distance_to_ones == doctest::Approx(std::abs(std::polar(1.0, 2 * M_PI * l) - 1.0)).epsilon(1e-8));
  for (const auto& k : c.checks) CHECK_MESSAGE(k.pass, k.name);
  CHECK(to_json(c).dump() == to_json(certify(MassTriple::make(1, 1, 1))).dump());

  const auto d = certify(MassTriple::make(1, 2, 3));
  CHECK(d.verdict == "pass");
  CHECK(d.body_order == std::array<int, 3>{0, 1, 2});
  CHECK(d.orbit_digest.size() == 16);

  CertifyConfig bad;
  bad.max_degree = 5;
  CHECK_THROWS_AS(certify(MassTriple::make(1, 1, 1), bad), std::invalid_argument);
}

TEST_CASE("simplex sampling and sweeps") {
  for (int i = 0; i < 200; ++i) {
    const auto m = simplex_sample(42, i);
    CHECK(m.m1 >= 1e-3);
    CHECK(m.m2 >= 1e-3);
    CHECK(m.m3 >= 1e-3);
    CHECK(m.S1() == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(m == simplex_sample(42, i));
  }
  CHECK_FALSE(simplex_sample(42, 0) == simplex_sample(43, 0));
  SweepConfig cfg;
  cfg.samples = 4;
  cfg.seed = 5;
  cfg.jobs = 1;
  std::ostringstream a, b;
  write_csv(a, run_sweep(cfg));
  cfg.jobs = 3;
  write_csv(b, run_sweep(cfg));
  CHECK(a.str() == b.str());
  const auto rows = run_sweep(cfg);
  const auto s = summarize(rows);
  CHECK(s.samples == 4);
  CHECK(s.passed == 4);
  CHECK(s.guard_holds);
}
