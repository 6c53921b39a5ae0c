#include "tbm/lagrange_orbit.hpp"

#include <cmath>
#include <stdexcept>

namespace tbm {

namespace {
const double kSqrt3 = std::sqrt(3.0);
}

std::pair<cplx, cplx> LagrangeParam::roots() const {
  const cplx disc = std::sqrt(cplx(e2 * e2 - 4.0 * e1 * e3));
  cplx a = (-e2 + disc) / (2.0 * e1), b = (-e2 - disc) / (2.0 * e1);
  if (a.imag() > b.imag()) std::swap(a, b);
  return {a, b};
}

LagrangeParam solve_parametrization(const MassTriple& m, int orientation) {
  m.validate();
  if (orientation != 1 && orientation != -1) throw std::invalid_argument("orientation must be +1 or -1");
  const double S1 = m.S1(), S2 = m.S2(), I = S2 / S1;
  const double sig = orientation;
  // Unit-side triangle in the barycentric frame, body 1 on the axis through body 3.
  const double cx = (m.m1 + 0.5 * m.m2) / S1, cy = m.m2 * sig * 0.5 * kSqrt3 / S1;
  const double u1x = 1.0 - cx, u1y = -cy;
  const double u2x = 0.5 - cx, u2y = sig * 0.5 * kSqrt3 - cy;

  LagrangeParam p;
  p.masses = m;
  p.orientation = orientation;
  // With qmin = k^2 / (2 I S2) the radial motion is q = qmin (1 + s^2), s = (w I / (m1 k) + u1y) / u1x.
  // k = I / (m1 u1x) makes ds/dw = 1, so the roots of P are at s = +/- i, i.e. w = w0 +/- i.
  p.k = I / (m.m1 * u1x);
  const double qmin = p.k * p.k / (2.0 * I * S2);
  const double b = u1y / u1x;
  p.e1 = qmin;
  p.e2 = 2.0 * qmin * b;
  p.e3 = qmin * (1.0 + b * b);
  p.w0 = -b;
  p.alpha = m.m2 * u2x / (m.m1 * u1x);
  p.beta = (p.k / I) * (p.alpha * m.m1 * u1y - m.m2 * u2y);
  p.gamma = m.m2 * u2y / (m.m1 * u1x);
  p.delta = (p.k / I) * (p.gamma * m.m1 * u1y + m.m2 * u2x);
  p.time_scale = 2.0 * qmin * I / p.k;

  const double res = orbit_residual(p, orbit_test_grid(p));
  if (!(res < 1e-9)) throw std::logic_error("Lagrange parametrization residual " + std::to_string(res));
  return p;
}

ReducedState<cplx> orbit_reduced_state(const LagrangeParam& p, cplx w) {
  const cplx q = p.P(w);
  if (std::abs(q) <= 1e-13 * p.e1) throw pole_error("orbit evaluated at a root of P");
  const cplx pw = w / q;
  ReducedState<cplx> s;
  s.q << q, 0.5 * q, p.orientation * 0.5 * kSqrt3 * q;
  s.p << pw, p.alpha * pw + p.beta / q, p.gamma * pw + p.delta / q;
  s.k = p.k;
  return s;
}

OrbitPoint orbit_state(const LagrangeParam& p, cplx w) { return {w, orbit_reduced_state(p, w), time_map(p, w)}; }

Distances<cplx> orbit_distances(const LagrangeParam& p, cplx w) {
  const cplx q = p.P(w);
  return {q, q, q};
}

Vec6<cplx> orbit_derivative(const LagrangeParam& p, cplx w) {
  const cplx q = p.P(w), dq = p.dP(w);
  if (std::abs(q) <= 1e-13 * p.e1) throw pole_error("orbit evaluated at a root of P");
  const cplx dpw = (q - w * dq) / (q * q);
  const cplx dinv = -dq / (q * q);
  Vec6<cplx> d;
  d << dq, 0.5 * dq, p.orientation * 0.5 * kSqrt3 * dq, dpw, p.alpha * dpw + p.beta * dinv,
      p.gamma * dpw + p.delta * dinv;
  return d;
}

cplx dt_dw(const LagrangeParam& p, cplx w) { return p.time_scale * p.P(w); }

cplx dt_dw_from_field(const LagrangeParam& p, cplx w) {
  const auto s = orbit_reduced_state(p, w);
  const auto g = gradient_reduced(s, p.masses, orbit_distances(p, w));
  return p.dP(w) / g(3);
}

cplx time_map(const LagrangeParam& p, cplx w) {
  return p.time_scale * w * ((p.e1 / 3.0 * w + p.e2 / 2.0) * w + p.e3);
}

double inverse_time_map(const LagrangeParam& p, double t) {
  // t(w) is strictly increasing on the real line (P > 0 there).
  double w = p.w0;
  for (int it = 0; it < 200; ++it) {
    const double f = time_map(p, w).real() - t;
    const double step = f / dt_dw(p, w).real();
    w -= step;
    if (std::abs(step) <= 1e-15 * (1.0 + std::abs(w))) break;
  }
  return w;
}

double orbit_residual(const LagrangeParam& p, const std::vector<cplx>& grid) {
  double worst = 0;
  for (cplx w : grid) {
    const auto s = orbit_reduced_state(p, w);
    const Vec6<cplx> xh = vector_field_reduced(s, p.masses, orbit_distances(p, w));
    const Vec6<cplx> d = orbit_derivative(p, w);
    worst = std::max(worst, (d - dt_dw(p, w) * xh).norm() / std::max(1.0, d.norm()));
  }
  return worst;
}

double orbit_energy_defect(const LagrangeParam& p, const std::vector<cplx>& grid) {
  double worst = 0;
  for (cplx w : grid)
    worst = std::max(worst, std::abs(hamiltonian_reduced(orbit_reduced_state(p, w), p.masses, orbit_distances(p, w))));
  return worst;
}

std::vector<cplx> orbit_test_grid(const LagrangeParam& p) {
  std::vector<cplx> g;
  for (int j = 0; j < 16; ++j) g.emplace_back(p.w0 - 3.0 + 6.0 * j / 15.0, 0.0);
  for (int j = 0; j < 16; ++j) {
    const double ang = 2.0 * M_PI * (j + 0.5) / 16.0;
    const double rad = (j % 2 == 0) ? 0.5 : 2.5;
    g.push_back(cplx(p.w0, 0) + rad * std::polar(1.0, ang));
  }
  return g;
}

}  // namespace tbm
