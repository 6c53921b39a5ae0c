#include "tbm/variational.hpp"

#include "tbm/errors.hpp"

namespace tbm {

namespace {

struct OrbitJet {
  Vec6c grad;
  Mat6c hess;
  Vec6c dgamma;
};

OrbitJet orbit_jet(const LagrangeParam& p, cplx w) {
  const auto s = orbit_reduced_state(p, w);
  const auto r = orbit_distances(p, w);
  return {gradient_reduced(s, p.masses, r), hessian_reduced(s, p.masses, r), orbit_derivative(p, w)};
}

Vec6c pericentre_tangent(const LagrangeParam& p) { return tangent_solution(p, cplx(p.w0, 0)); }

}  // namespace

Mat6c variational_matrix(const LagrangeParam& p, cplx w) {
  const auto s = orbit_reduced_state(p, w);
  return dt_dw(p, w) * symplectic_times<cplx>(hessian_reduced(s, p.masses, orbit_distances(p, w)));
}

Vec6c tangent_solution(const LagrangeParam& p, cplx w) {
  return vector_field_reduced(orbit_reduced_state(p, w), p.masses, orbit_distances(p, w));
}

NormalFrame normal_projection(const LagrangeParam& p, cplx w) {
  const OrbitJet j = orbit_jet(p, w);
  const Vec6c v = pericentre_tangent(p);
  const Eigen::Matrix<cplx, 1, 6> G = j.grad.transpose();
  const Eigen::Matrix<cplx, 1, 6> dG = (j.hess * j.dgamma).transpose();

  Mat64c F = Mat64c::Zero();
  F(1, 0) = F(2, 1) = F(4, 2) = F(5, 3) = 1.0;
  const cplx Gv = G * v, dGv = dG * v;
  if (std::abs(Gv) < 1e-14 * G.norm() * v.norm()) throw chart_error("normal frame degenerates at w");
  const Eigen::Matrix<cplx, 1, 4> GF = G * F, dGF = dG * F;
  const Mat64c E0 = F - v * GF / Gv;
  const Mat64c dE0 = -v * (dGF / Gv - GF * (dGv / (Gv * Gv)));

  const cplx P = p.P(w), dP = p.dP(w), u = w - p.w0;
  const cplx phi = P, dphi = dP, psi = u / P, dpsi = (P - u * dP) / (P * P);
  const Eigen::Matrix<cplx, 4, 1> g(phi, phi, psi, psi), dg(dphi, dphi, dpsi, dpsi);

  Mat6c B;
  B << E0, tangent_solution(p, w), G.adjoint();
  Eigen::PartialPivLU<Mat6c> lu(B);
  const Mat6c Binv = lu.inverse();

  NormalFrame f;
  f.E = E0 * g.asDiagonal();
  f.dE = dE0 * g.asDiagonal() + E0 * dg.asDiagonal();
  f.L = g.cwiseInverse().asDiagonal() * Binv.topRows<4>();
  return f;
}

Mat4c normal_matrix(const LagrangeParam& p, cplx w) {
  const NormalFrame f = normal_projection(p, w);
  return f.L * (variational_matrix(p, w) * f.E - f.dE);
}

}  // namespace tbm
