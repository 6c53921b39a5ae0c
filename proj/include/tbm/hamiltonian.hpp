#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <complex>
#include <string>

#include "tbm/errors.hpp"
#include "tbm/masses.hpp"

namespace tbm {

template <typename Scalar> using Vec3 = Eigen::Matrix<Scalar, 3, 1>;
template <typename Scalar> using Vec6 = Eigen::Matrix<Scalar, 6, 1>;
template <typename Scalar> using Mat6 = Eigen::Matrix<Scalar, 6, 6>;
using Vec12 = Eigen::Matrix<double, 12, 1>;

inline constexpr double kCollisionThreshold = 1e-10;

// Reduced phase point; packed order is (q1, q2, q3, p1, p2, p3).
template <typename Scalar>
struct ReducedState {
  Vec3<Scalar> q = Vec3<Scalar>::Zero();
  Vec3<Scalar> p = Vec3<Scalar>::Zero();
  double k = 0;

  Vec6<Scalar> packed() const {
    Vec6<Scalar> z;
    z << q, p;
    return z;
  }
  static ReducedState unpack(const Vec6<Scalar>& z, double k) {
    return {z.template head<3>(), z.template tail<3>(), k};
  }
};

// Full phase point: bodies at (x1,x2), (x3,x4), (x5,x6) with momenta y.
struct FullState {
  Vec6<double> x = Vec6<double>::Zero();
  Vec6<double> y = Vec6<double>::Zero();

  Vec12 packed() const {
    Vec12 z;
    z << x, y;
    return z;
  }
  static FullState unpack(const Vec12& z) { return {z.head<6>(), z.tail<6>()}; }
};

// r1 = |body1 - body3|, r2 = |body2 - body3|, r3 = |body1 - body2|.
// Passed explicitly so that complex evaluation can pick the branch (r = q1 along the orbit).
template <typename Scalar>
struct Distances {
  Scalar r1, r2, r3;
};

namespace detail {

template <typename Scalar>
void check_distances(const Distances<Scalar>& d) {
  using std::abs;
  const std::array<std::pair<const char*, Scalar>, 3> rs{{{"r1", d.r1}, {"r2", d.r2}, {"r3", d.r3}}};
  for (const auto& [name, r] : rs)
    if (!(abs(r) >= kCollisionThreshold)) throw collision_error(name, static_cast<double>(abs(r)));
}

template <typename Scalar>
Scalar reduced_P(const ReducedState<Scalar>& s) {
  return s.p(2) * s.q(1) - s.p(1) * s.q(2) - s.k;
}

// Kinetic part as a function of y = (q1, p1, p2, p3, P) with P treated as independent.
template <typename Scalar>
struct KineticJet {
  Eigen::Matrix<Scalar, 5, 1> grad;
  Eigen::Matrix<Scalar, 5, 5> hess;
  Scalar value;
};

template <typename Scalar>
KineticJet<Scalar> kinetic_jet(const ReducedState<Scalar>& s, const MassTriple& m) {
  const double a = (m.m1 + m.m3) / (m.m1 * m.m3);
  const double b = (m.m2 + m.m3) / (m.m2 * m.m3);
  const double c = 1.0 / m.m3;
  const Scalar q1 = s.q(0), p1 = s.p(0), p2 = s.p(1), p3 = s.p(2);
  const Scalar P = reduced_P(s);
  const Scalar iq = Scalar(1) / q1, iq2 = iq * iq, iq3 = iq2 * iq;
  KineticJet<Scalar> j;
  j.value = 0.5 * a * (p1 * p1 + P * P * iq2) + 0.5 * b * (p2 * p2 + p3 * p3) + c * (p1 * p2 - p3 * P * iq);
  j.grad << -a * P * P * iq3 + c * p3 * P * iq2, a * p1 + c * p2, b * p2 + c * p1, b * p3 - c * P * iq,
      a * P * iq2 - c * p3 * iq;
  j.hess.setZero();
  j.hess(0, 0) = 3.0 * a * P * P * iq2 * iq2 - 2.0 * c * p3 * P * iq3;
  j.hess(0, 4) = j.hess(4, 0) = -2.0 * a * P * iq3 + c * p3 * iq2;
  j.hess(0, 3) = j.hess(3, 0) = c * P * iq2;
  j.hess(4, 4) = a * iq2;
  j.hess(3, 4) = j.hess(4, 3) = Scalar(-c) * iq;
  j.hess(1, 1) = a;
  j.hess(1, 2) = j.hess(2, 1) = c;
  j.hess(2, 2) = b;
  j.hess(3, 3) = b;
  return j;
}

// d y / d z for y = (q1, p1, p2, p3, P), z = packed reduced coordinates.
template <typename Scalar>
Eigen::Matrix<Scalar, 5, 6> kinetic_chain(const ReducedState<Scalar>& s) {
  Eigen::Matrix<Scalar, 5, 6> D = Eigen::Matrix<Scalar, 5, 6>::Zero();
  D(0, 0) = 1;
  D(1, 3) = 1;
  D(2, 4) = 1;
  D(3, 5) = 1;
  D(4, 1) = s.p(2);
  D(4, 2) = -s.p(1);
  D(4, 4) = -s.q(2);
  D(4, 5) = s.q(1);
  return D;
}

}  // namespace detail

template <typename Scalar>
Distances<Scalar> reduced_distances(const ReducedState<Scalar>& s) {
  using std::sqrt;
  const Scalar d = s.q(0) - s.q(1);
  return {s.q(0), sqrt(s.q(1) * s.q(1) + s.q(2) * s.q(2)), sqrt(d * d + s.q(2) * s.q(2))};
}

template <typename Scalar>
Scalar hamiltonian_reduced(const ReducedState<Scalar>& s, const MassTriple& m, const Distances<Scalar>& r) {
  detail::check_distances(r);
  return detail::kinetic_jet(s, m).value - m.m1 * m.m3 / r.r1 - m.m3 * m.m2 / r.r2 - m.m1 * m.m2 / r.r3;
}

template <typename Scalar>
Scalar hamiltonian_reduced(const ReducedState<Scalar>& s, const MassTriple& m) {
  return hamiltonian_reduced(s, m, reduced_distances(s));
}

// Gradient in packed order (dH/dq, dH/dp).
template <typename Scalar>
Vec6<Scalar> gradient_reduced(const ReducedState<Scalar>& s, const MassTriple& m, const Distances<Scalar>& r) {
  detail::check_distances(r);
  const auto jet = detail::kinetic_jet(s, m);
  Vec6<Scalar> g = detail::kinetic_chain(s).transpose() * jet.grad;
  const double A = m.m1 * m.m3, B = m.m2 * m.m3, C = m.m1 * m.m2;
  const Scalar r23 = r.r2 * r.r2 * r.r2, r33 = r.r3 * r.r3 * r.r3;
  const Scalar d1 = s.q(0) - s.q(1);
  g(0) += A / (r.r1 * r.r1) + C * d1 / r33;
  g(1) += B * s.q(1) / r23 - C * d1 / r33;
  g(2) += B * s.q(2) / r23 + C * s.q(2) / r33;
  return g;
}

template <typename Scalar>
Mat6<Scalar> hessian_reduced(const ReducedState<Scalar>& s, const MassTriple& m, const Distances<Scalar>& r) {
  detail::check_distances(r);
  const auto jet = detail::kinetic_jet(s, m);
  const auto D = detail::kinetic_chain(s);
  Mat6<Scalar> h = D.transpose() * jet.hess * D;
  // Second derivatives of P = p3 q2 - p2 q3 - k.
  const Scalar uP = jet.grad(4);
  h(1, 5) += uP;
  h(5, 1) += uP;
  h(2, 4) -= uP;
  h(4, 2) -= uP;

  const double A = m.m1 * m.m3, B = m.m2 * m.m3, C = m.m1 * m.m2;
  h(0, 0) += -2.0 * A / (r.r1 * r.r1 * r.r1);
  auto pair_hess = [](double coef, const Eigen::Matrix<Scalar, 2, 1>& x, Scalar rr) {
    const Scalar r3 = rr * rr * rr, r5 = r3 * rr * rr;
    Eigen::Matrix<Scalar, 2, 2> out = Eigen::Matrix<Scalar, 2, 2>::Identity() * (coef / r3);
    out -= (3.0 * coef / r5) * (x * x.transpose());
    return out;
  };
  const Eigen::Matrix<Scalar, 2, 1> x2(s.q(1), s.q(2));
  h.template block<2, 2>(1, 1) += pair_hess(B, x2, r.r2);
  const Eigen::Matrix<Scalar, 2, 1> x3(s.q(0) - s.q(1), s.q(2));
  Eigen::Matrix<Scalar, 2, 3> Dd;
  Dd << Scalar(1), Scalar(-1), Scalar(0), Scalar(0), Scalar(0), Scalar(1);
  h.template block<3, 3>(0, 0) += Dd.transpose() * pair_hess(C, x3, r.r3) * Dd;
  return h;
}

// J grad H, i.e. d/dt of the packed state.
template <typename Scalar>
Vec6<Scalar> symplectic_gradient(const Vec6<Scalar>& g) {
  Vec6<Scalar> v;
  v << g.template tail<3>(), -g.template head<3>();
  return v;
}

template <typename Scalar>
Mat6<Scalar> symplectic_times(const Mat6<Scalar>& h) {
  Mat6<Scalar> v;
  v << h.template bottomRows<3>(), -h.template topRows<3>();
  return v;
}

template <typename Scalar>
Vec6<Scalar> vector_field_reduced(const ReducedState<Scalar>& s, const MassTriple& m, const Distances<Scalar>& r) {
  return symplectic_gradient<Scalar>(gradient_reduced(s, m, r));
}

template <typename Scalar>
Vec6<Scalar> vector_field_reduced(const ReducedState<Scalar>& s, const MassTriple& m) {
  return vector_field_reduced(s, m, reduced_distances(s));
}

// Full system.
double hamiltonian_full(const FullState& s, const MassTriple& m);
Vec12 vector_field_full(const FullState& s, const MassTriple& m);
std::array<double, 4> first_integrals_full(const FullState& s, const MassTriple& m);
// Smallest pairwise distance and the pair name ("P1P2", ...).
std::pair<double, std::string> min_pair_distance(const FullState& s);

// Heliocentric reduction relative to body 3, rotated so body 1 lies on the positive q1 axis.
// k is the counterclockwise angular momentum, equal to -F4. Assumes F2 = F3 = 0.
ReducedState<double> reduce_full_state(const FullState& s, const MassTriple& m);
// Barycentric full state with zero total momentum realizing a reduced state (body 1 on the x axis).
FullState lift_reduced_state(const ReducedState<double>& s, const MassTriple& m);

}  // namespace tbm
