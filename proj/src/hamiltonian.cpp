#include "tbm/hamiltonian.hpp"

namespace tbm {

namespace {

Eigen::Vector2d body(const Vec6<double>& v, int i) { return {v(2 * i), v(2 * i + 1)}; }

double cross(const Eigen::Vector2d& a, const Eigen::Vector2d& b) { return a.x() * b.y() - a.y() * b.x(); }

struct Pair {
  int i, j;
  const char* name;
};
constexpr Pair kPairs[3] = {{0, 1, "P1P2"}, {0, 2, "P1P3"}, {1, 2, "P2P3"}};

double pair_mass(const MassTriple& m, int i, int j) {
  const double ms[3] = {m.m1, m.m2, m.m3};
  return ms[i] * ms[j];
}

void check_full(const FullState& s) {
  const auto [d, name] = min_pair_distance(s);
  if (!(d >= kCollisionThreshold)) throw collision_error(name, d);
}

}  // namespace

std::pair<double, std::string> min_pair_distance(const FullState& s) {
  double best = std::numeric_limits<double>::infinity();
  std::string name;
  for (const auto& pr : kPairs) {
    const double d = (body(s.x, pr.i) - body(s.x, pr.j)).norm();
    if (d < best || name.empty()) {
      best = d;
      name = pr.name;
    }
  }
  return {best, name};
}

double hamiltonian_full(const FullState& s, const MassTriple& m) {
  check_full(s);
  const double ms[3] = {m.m1, m.m2, m.m3};
  double h = 0;
  for (int i = 0; i < 3; ++i) h += body(s.y, i).squaredNorm() / (2 * ms[i]);
  for (const auto& pr : kPairs) h -= pair_mass(m, pr.i, pr.j) / (body(s.x, pr.i) - body(s.x, pr.j)).norm();
  return h;
}

Vec12 vector_field_full(const FullState& s, const MassTriple& m) {
  check_full(s);
  const double ms[3] = {m.m1, m.m2, m.m3};
  Vec12 f = Vec12::Zero();
  for (int i = 0; i < 3; ++i) f.segment<2>(2 * i) = body(s.y, i) / ms[i];
  for (const auto& pr : kPairs) {
    const Eigen::Vector2d d = body(s.x, pr.i) - body(s.x, pr.j);
    const double r = d.norm();
    const Eigen::Vector2d force = pair_mass(m, pr.i, pr.j) * d / (r * r * r);
    f.segment<2>(6 + 2 * pr.i) -= force;
    f.segment<2>(6 + 2 * pr.j) += force;
  }
  return f;
}

std::array<double, 4> first_integrals_full(const FullState& s, const MassTriple& m) {
  const auto& x = s.x;
  const auto& y = s.y;
  return {hamiltonian_full(s, m), y(0) + y(2) + y(4), y(1) + y(3) + y(5),
          y(0) * x(1) + y(2) * x(3) + y(4) * x(5) - x(0) * y(1) - x(2) * y(3) - x(4) * y(5)};
}

ReducedState<double> reduce_full_state(const FullState& s, const MassTriple& m) {
  (void)m;
  const Eigen::Vector2d Q1 = body(s.x, 0) - body(s.x, 2);
  const Eigen::Vector2d Q2 = body(s.x, 1) - body(s.x, 2);
  const Eigen::Vector2d Y1 = body(s.y, 0), Y2 = body(s.y, 1);
  const double phi = std::atan2(Q1.y(), Q1.x());
  const Eigen::Rotation2Dd back(-phi);
  const Eigen::Vector2d q2 = back * Q2, y1 = back * Y1, y2 = back * Y2;
  ReducedState<double> r;
  r.q << Q1.norm(), q2.x(), q2.y();
  r.p << y1.x(), y2.x(), y2.y();
  r.k = cross(Q1, Y1) + cross(Q2, Y2);
  return r;
}

FullState lift_reduced_state(const ReducedState<double>& s, const MassTriple& m) {
  const Eigen::Vector2d Q1(s.q(0), 0), Q2(s.q(1), s.q(2));
  const double P = detail::reduced_P(s);
  const Eigen::Vector2d Y1(s.p(0), -P / s.q(0)), Y2(s.p(1), s.p(2));
  const Eigen::Vector2d X3 = -(m.m1 * Q1 + m.m2 * Q2) / m.S1();
  FullState f;
  f.x << Q1 + X3, Q2 + X3, X3;
  f.y << Y1, Y2, -Y1 - Y2;
  return f;
}

}  // namespace tbm
