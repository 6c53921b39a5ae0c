#include <doctest.h>

#include <cmath>
#include <random>

#include "tbm/dynamics.hpp"
#include "tbm/lagrange_orbit.hpp"

using namespace tbm;

namespace {

const double kSqrt3 = std::sqrt(3.0);

FullState random_full_state(std::mt19937_64& rng, double spread = 1.0) {
  std::uniform_real_distribution<double> u(-spread, spread);
  FullState s;
  for (int i = 0; i < 6; ++i) s.x(i) = u(rng), s.y(i) = u(rng);
  return s;
}

ReducedState<double> random_reduced_state(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1, 1);
  ReducedState<double> s;
  s.q << 1.5 + 0.5 * u(rng), 0.4 + 0.3 * u(rng), 0.9 + 0.3 * u(rng);
  s.p << u(rng), u(rng), u(rng);
  s.k = u(rng);
  return s;
}

MassTriple random_masses(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.3, 3.0);
  return MassTriple::make(u(rng), u(rng), u(rng));
}

}  // namespace

TEST_CASE("mass triple derived quantities") {
  const auto eq = MassTriple::make(1, 1, 1);
  CHECK(eq.theta() == 0.0);
  CHECK(eq.lambda1() == doctest::Approx(1.5 + 0.5 * std::sqrt(13.0)).epsilon(1e-15));
  CHECK(eq.lambda1() == eq.lambda2());
  CHECK_THROWS_AS(MassTriple::make(1, 0, 1), std::invalid_argument);
  CHECK_THROWS_AS(MassTriple::make(1, -2, 1), std::invalid_argument);
  CHECK_THROWS_AS(MassTriple::make(1, NAN, 1), std::invalid_argument);

  std::mt19937_64 rng(11);
  for (int i = 0; i < 200; ++i) {
    const auto m = random_masses(rng);
    const double th = m.theta();
    CHECK(th >= 0);
    CHECK(th < 144);
    CHECK(th == doctest::Approx(144 * (1 - 3 * m.S2() / (m.S1() * m.S1()))).epsilon(1e-9));
    CHECK(m.lambda2() >= 2.0);
    CHECK(m.lambda1() >= 1.5 + 0.5 * std::sqrt(13.0));
    CHECK(m.lambda1() >= m.lambda2());
  }
}

TEST_CASE("full hamiltonian values") {
  const auto eq = MassTriple::make(1, 1, 1);
  FullState s;
  s.x << 0, 0, 1, 0, 0.5, 0.5 * kSqrt3;
  CHECK(hamiltonian_full(s, eq) == doctest::Approx(-3.0).epsilon(1e-15));

  const auto m = MassTriple::make(1, 2, 3);
  FullState t;
  t.x << 0, 0, 1, 0, 0, 1;
  t.y << 1, 0, 0, 1, -1, -1;
  CHECK(hamiltonian_full(t, m) == doctest::Approx(-8.1593073537859518).epsilon(1e-15));

  std::mt19937_64 rng(3);
  for (int i = 0; i < 20; ++i) {
    FullState r = random_full_state(rng);
    const double h0 = hamiltonian_full(r, m);
    const double kin = h0 - hamiltonian_full(FullState{r.x, Vec6<double>::Zero()}, m);
    r.y *= 1.7;
    CHECK(hamiltonian_full(r, m) - h0 == doctest::Approx(kin * (1.7 * 1.7 - 1)).epsilon(1e-12));
  }

  FullState c;
  c.x << 0, 0, 0, 0, 1, 1;
  try {
    hamiltonian_full(c, m);
    FAIL("expected collision");
  } catch (const collision_error& e) {
    CHECK(e.pair() == "P1P2");
  }
}

TEST_CASE("first integrals") {
  const auto m = MassTriple::make(1, 2, 3);
  FullState s;
  s.x << 0, 0, 1, 0, 0, 1;
  auto F = first_integrals_full(s, m);
  CHECK(F[1] == 0);
  CHECK(F[2] == 0);
  CHECK(F[3] == 0);
  s.y << 1, 0, -1, 0, 0, 0;
  F = first_integrals_full(s, m);
  CHECK(F[1] == 0);
  CHECK(F[2] == 0);
}

TEST_CASE("reduced hamiltonian values") {
  const auto eq = MassTriple::make(1, 1, 1);
  ReducedState<double> s;
  s.q << 1, 0.5, 0.5 * kSqrt3;
  CHECK(hamiltonian_reduced(s, eq) == doctest::Approx(-3.0).epsilon(1e-15));
  // P = -k, M1 = 2: H = -3 + k^2.
  s.k = 0.7;
  CHECK(hamiltonian_reduced(s, eq) == doctest::Approx(-3.0 + 0.49).epsilon(1e-15));

  const auto m = MassTriple::make(1, 2, 3);
  ReducedState<double> t;
  t.q << 1.3, -0.4, 0.8;
  const auto r = reduced_distances(t);
  CHECK(hamiltonian_reduced(t, m) ==
        doctest::Approx(-(m.m1 * m.m3 / r.r1 + m.m2 * m.m3 / r.r2 + m.m1 * m.m2 / r.r3)).epsilon(1e-15));

  // Potential force at the unit triangle, equal masses.
  s.k = 0;
  const auto f = vector_field_reduced<double>(s, eq);
  CHECK(f.head<3>().norm() == 0.0);
  CHECK(f(3) == doctest::Approx(-1.5).epsilon(1e-14));
  CHECK(std::abs(f(4)) < 1e-14);
  CHECK(f(5) == doctest::Approx(-kSqrt3).epsilon(1e-14));

  ReducedState<double> c;
  c.q << 1, 0, 0;
  try {
    hamiltonian_reduced(c, m);
    FAIL("expected collision");
  } catch (const collision_error& e) {
    CHECK(e.pair() == "r2");
  }
}

TEST_CASE("vector fields match finite differences") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const auto m = random_masses(rng);
    {
      const auto s = random_reduced_state(rng);
      const Vec6<double> g = gradient_reduced(s, m, reduced_distances(s));
      const Mat6<double> h = hessian_reduced(s, m, reduced_distances(s));
      for (int i = 0; i < 6; ++i) {
        const double step = 1e-6 * std::max(1.0, std::abs(s.packed()(i)));
        Vec6<double> zp = s.packed(), zm = s.packed();
        zp(i) += step;
        zm(i) -= step;
        const auto sp = ReducedState<double>::unpack(zp, s.k), sm = ReducedState<double>::unpack(zm, s.k);
        const double fd = (hamiltonian_reduced(sp, m) - hamiltonian_reduced(sm, m)) / (2 * step);
        CHECK(std::abs(fd - g(i)) <= 1e-6 * std::max(1.0, g.norm()));
        const Vec6<double> gd =
            (gradient_reduced(sp, m, reduced_distances(sp)) - gradient_reduced(sm, m, reduced_distances(sm))) /
            (2 * step);
        CHECK((gd - h.col(i)).norm() <= 1e-6 * std::max(1.0, h.norm()));
      }
      CHECK((h - h.transpose()).norm() <= 1e-12 * h.norm());
      CHECK(std::abs(symplectic_times<double>(h).trace()) <= 1e-12 * h.norm());
    }
    {
      FullState s = random_full_state(rng);
      if (min_pair_distance(s).first < 0.2) continue;
      const Vec12 f = vector_field_full(s, m);
      for (int i = 0; i < 12; ++i) {
        const double step = 1e-6;
        Vec12 zp = s.packed(), zm = s.packed();
        zp(i) += step;
        zm(i) -= step;
        const double fd =
            (hamiltonian_full(FullState::unpack(zp), m) - hamiltonian_full(FullState::unpack(zm), m)) / (2 * step);
        const double expect = i < 6 ? -f(6 + i) : f(i - 6);
        CHECK(std::abs(fd - expect) <= 1e-6 * std::max(1.0, f.norm()));
      }
    }
  }
}

TEST_CASE("rigid motions preserve the energy terms") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-3, 3);
  for (int trial = 0; trial < 20; ++trial) {
    const auto m = random_masses(rng);
    const FullState s = random_full_state(rng);
    if (min_pair_distance(s).first < 0.1) continue;
    const Eigen::Rotation2Dd rot(u(rng));
    const Eigen::Vector2d shift(u(rng), u(rng));
    FullState r, tr;
    for (int i = 0; i < 3; ++i) {
      r.x.segment<2>(2 * i) = rot * Eigen::Vector2d(s.x.segment<2>(2 * i));
      r.y.segment<2>(2 * i) = rot * Eigen::Vector2d(s.y.segment<2>(2 * i));
      tr.x.segment<2>(2 * i) = s.x.segment<2>(2 * i) + shift;
      tr.y.segment<2>(2 * i) = s.y.segment<2>(2 * i);
    }
    const double h = hamiltonian_full(s, m);
    CHECK(std::abs(hamiltonian_full(r, m) - h) <= 1e-12 * std::max(1.0, std::abs(h)));
    CHECK(std::abs(hamiltonian_full(tr, m) - h) <= 1e-12 * std::max(1.0, std::abs(h)));
  }
}

TEST_CASE("reduction keeps the energy of barycentric states") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 30; ++trial) {
    const auto m = random_masses(rng);
    FullState s = random_full_state(rng);
    if (min_pair_distance(s).first < 0.1) continue;
    // Remove total momentum.
    const Eigen::Vector2d tot = s.y.segment<2>(0) + s.y.segment<2>(2) + s.y.segment<2>(4);
    const double ms[3] = {m.m1, m.m2, m.m3};
    for (int i = 0; i < 3; ++i) s.y.segment<2>(2 * i) -= tot * ms[i] / m.S1();
    const auto red = reduce_full_state(s, m);
    const auto F = first_integrals_full(s, m);
    CHECK(red.k == doctest::Approx(-F[3]).epsilon(1e-12));
    CHECK(hamiltonian_reduced(red, m) == doctest::Approx(hamiltonian_full(s, m)).epsilon(1e-12));
    const FullState back = lift_reduced_state(red, m);
    CHECK(hamiltonian_full(back, m) == doctest::Approx(hamiltonian_full(s, m)).epsilon(1e-12));
  }
}

TEST_CASE("dop853 on problems with known solutions") {
  using V1 = Eigen::Matrix<double, 1, 1>;
  V1 y = V1::Constant(1.0);
  Dop853Options opt;
  opt.rtol = opt.atol = 1e-12;
  auto st = dop853([](double, const V1& v) -> V1 { return v; }, 0.0, y, 2.0, opt);
  CHECK(st.status == OdeStatus::completed);
  CHECK(std::abs(y(0) - std::exp(2.0)) < 1e-10 * std::exp(2.0));

  using C1 = Eigen::Matrix<cplx, 1, 1>;
  C1 z = C1::Constant(1.0);
  dop853([](double, const C1& v) -> C1 { return cplx(0, 1) * v; }, 0.0, z, 2 * M_PI, opt);
  CHECK(std::abs(z(0) - 1.0) < 1e-10);

  // Backward integration and dense output on the harmonic oscillator.
  Eigen::Vector2d x(1.0, 0.0);
  opt.dense = true;
  double worst = 0;
  dop853([](double, const Eigen::Vector2d& v) -> Eigen::Vector2d { return {v(1), -v(0)}; }, 0.0, x, -5.0, opt,
         [&](const DenseStep<Eigen::Vector2d>& step, const Eigen::Vector2d&) {
           for (int j = 1; j < 4; ++j) {
             const double t = step.t0 + (step.t1 - step.t0) * j / 4.0;
             worst = std::max(worst, std::abs(step(t)(0) - std::cos(t)));
           }
           return true;
         });
  CHECK(std::abs(x(0) - std::cos(5.0)) < 1e-10);
  CHECK(worst < 1e-9);
}

TEST_CASE("integrate: zero span and collision termination") {
  const auto m = MassTriple::make(1, 2, 3);
  FullState s;
  s.x << -1, 0, 1, 0, 3, 0;
  auto tr = integrate(s, m, 0.0, 0.0, 1e-10);
  CHECK(tr.t.size() == 1);
  CHECK(tr.completed());

  // Collinear fall from rest ends in a collision well before t = 10.
  auto fall = integrate(s, m, 0.0, 10.0, 1e-10);
  CHECK_FALSE(fall.completed());
  CHECK(fall.info.termination.find("collision") != std::string::npos);
  CHECK(fall.t.back() < 10.0);
  for (std::size_t i = 1; i < fall.t.size(); ++i) CHECK(fall.t[i] > fall.t[i - 1]);
}

TEST_CASE("Lagrange initial condition stays equilateral") {
  const auto m = MassTriple::make(1, 2, 3);
  const auto p = solve_parametrization(m);
  const double t0 = time_map(p, p.w0).real();
  const auto s0c = orbit_reduced_state(p, p.w0);
  ReducedState<double> s0;
  s0.q = s0c.q.real();
  s0.p = s0c.p.real();
  s0.k = p.k;
  std::vector<double> samples;
  const double horizon = 5 * std::abs(t0 - time_map(p, p.w0 + 1.0).real());
  for (int j = 0; j <= 40; ++j) samples.push_back(t0 + horizon * j / 40.0);
  const auto tr = integrate(s0, m, t0, t0 + horizon, 1e-13, samples);
  REQUIRE(tr.completed());
  REQUIRE(tr.t.size() == samples.size());
  for (std::size_t i = 0; i < tr.t.size(); ++i) {
    const auto& s = tr.states[i];
    CHECK(std::abs(s.q(1) / s.q(0) - 0.5) < 1e-8);
    CHECK(std::abs(s.q(2) / s.q(0) - 0.5 * kSqrt3) < 1e-8);
    const double w = inverse_time_map(p, tr.t[i]);
    const auto ref = orbit_reduced_state(p, w);
    CHECK((s.packed() - ref.packed().real()).norm() < 1e-8 * std::max(1.0, ref.packed().norm()));
  }
}

TEST_CASE("first integrals conserved along random bounded orbits") {
  std::mt19937_64 rng(1234);
  std::uniform_real_distribution<double> u(-1, 1), um(0.5, 2.0);
  int done = 0;
  while (done < 20) {
    const auto m = MassTriple::make(um(rng), um(rng), um(rng));
    FullState s;
    s.x << u(rng), u(rng), 1.5 + u(rng), u(rng), u(rng), 1.5 + u(rng);
    for (int i = 0; i < 6; ++i) s.y(i) = 0.3 * u(rng);
    if (min_pair_distance(s).first < 0.5) continue;
    if (first_integrals_full(s, m)[0] > -0.5) continue;
    const auto tr = integrate(s, m, 0.0, 10.0, 1e-12);
    if (!tr.completed()) continue;
    double dmin = 1e300;
    for (const auto& st : tr.states) dmin = std::min(dmin, min_pair_distance(st).first);
    if (dmin < 0.05) continue;
    ++done;
    const auto F0 = first_integrals_full(s, m);
    const double pscale = s.y.norm(), lscale = s.x.norm() * s.y.norm();
    const double scale[4] = {std::abs(F0[0]), pscale, pscale, lscale};
    for (const auto& st : tr.states) {
      const auto F = first_integrals_full(st, m);
      for (int i = 0; i < 4; ++i) CHECK(std::abs(F[i] - F0[i]) <= 1e-9 * scale[i]);
    }
  }
}

TEST_CASE("symplectic integrator keeps energy bounded") {
  const auto m = MassTriple::make(1, 1, 1);
  FullState s;
  s.x << 0, 0, 1, 0, 0.5, 0.5 * kSqrt3;
  // Rigid rotation of the equilateral triangle about its centroid.
  const Eigen::Vector2d c(0.5, 0.5 / kSqrt3);
  const double omega = std::sqrt(3.0);
  for (int i = 0; i < 3; ++i) {
    const Eigen::Vector2d r = Eigen::Vector2d(s.x.segment<2>(2 * i)) - c;
    s.y.segment<2>(2 * i) = omega * Eigen::Vector2d(-r.y(), r.x());
  }
  const auto tr = integrate_symplectic(s, m, 0.0, 20.0, 1e-3);
  CHECK(tr.completed());
  const double h0 = hamiltonian_full(s, m);
  double worst = 0;
  for (const auto& st : tr.states) worst = std::max(worst, std::abs(hamiltonian_full(st, m) - h0));
  CHECK(worst < 1e-9);
}
