#pragma once

#include <complex>
#include <vector>

#include "tbm/hamiltonian.hpp"

namespace tbm {

using cplx = std::complex<double>;

// Parabolic equilateral solution in reduced coordinates:
//   q1 = P(w), (q2, q3) = q1 (1/2, sigma sqrt(3)/2), p1 = w / P(w),
//   p2 = alpha p1 + beta / q1, p3 = gamma p1 + delta / q1, P(w) = e1 w^2 + e2 w + e3.
// The scaling freedom is fixed by choosing k so that the roots of P are w0 +/- i.
struct LagrangeParam {
  MassTriple masses;
  int orientation = 1;  // sigma: +1 puts body 2 above the q1 axis
  double k = 0;
  double alpha = 0, beta = 0, gamma = 0, delta = 0;
  double e1 = 0, e2 = 0, e3 = 0;
  double time_scale = 0;  // dt/dw = time_scale * P(w)
  double w0 = 0;          // pericentre, P'(w0) = 0

  template <typename S> S P(const S& w) const { return (e1 * w + e2) * w + e3; }
  template <typename S> S dP(const S& w) const { return 2.0 * e1 * w + e2; }
  // Roots of P ordered by imaginary part (lower first).
  std::pair<cplx, cplx> roots() const;
};

struct OrbitPoint {
  cplx w;
  ReducedState<cplx> state;
  cplx t;
};

LagrangeParam solve_parametrization(const MassTriple& m, int orientation = 1);

// Throws pole_error at a root of P.
OrbitPoint orbit_state(const LagrangeParam& p, cplx w);
ReducedState<cplx> orbit_reduced_state(const LagrangeParam& p, cplx w);
// Along the orbit r1 = r2 = r3 = q1; this is the analytic continuation used off the real axis.
Distances<cplx> orbit_distances(const LagrangeParam& p, cplx w);
// d Gamma / dw in packed order.
Vec6<cplx> orbit_derivative(const LagrangeParam& p, cplx w);

cplx dt_dw(const LagrangeParam& p, cplx w);
// The same quantity from its defining identity (dq1/dw) / (dH/dp1 on the orbit).
cplx dt_dw_from_field(const LagrangeParam& p, cplx w);
// t(w) = integral of dt/dw from 0; a cubic polynomial, so path independent.
cplx time_map(const LagrangeParam& p, cplx w);
// Real w with t(w) = t, by Newton iteration on the monotone cubic.
double inverse_time_map(const LagrangeParam& p, double t);

// max over the grid of |dGamma/dw - dt/dw X_H(Gamma)| / max(1, |dGamma/dw|).
double orbit_residual(const LagrangeParam& p, const std::vector<cplx>& grid);
// max over the grid of |H(Gamma(w))|.
double orbit_energy_defect(const LagrangeParam& p, const std::vector<cplx>& grid);
// Default 32-point grid: 16 real points and 16 complex points away from the roots.
std::vector<cplx> orbit_test_grid(const LagrangeParam& p);

}  // namespace tbm
