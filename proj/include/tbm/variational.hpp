#pragma once

#include "tbm/lagrange_orbit.hpp"

namespace tbm {

using Mat6c = Eigen::Matrix<cplx, 6, 6>;
using Mat4c = Eigen::Matrix<cplx, 4, 4>;
using Mat64c = Eigen::Matrix<cplx, 6, 4>;
using Mat46c = Eigen::Matrix<cplx, 4, 6>;
using Vec6c = Vec6<cplx>;

// dt/dw * J * Hess H(Gamma(w)): the variational equations in the w variable.
Mat6c variational_matrix(const LagrangeParam& p, cplx w);
// X_H(Gamma(w)) = dGamma/dt, a solution of x' = M6 x.
Vec6c tangent_solution(const LagrangeParam& p, cplx w);

// Normal frame: columns of E span ker dH modulo the tangent solution; L E = I,
// L kills the tangent solution and the Hermitian normal of ker dH.
// Built from the (q2, q3, p2, p3) coordinate directions pushed into ker dH along
// v = X_H(Gamma(w0)), then rescaled by diag(P, P, (w - w0)/P, (w - w0)/P).
struct NormalFrame {
  Mat64c E;
  Mat64c dE;  // dE/dw
  Mat46c L;
};

NormalFrame normal_projection(const LagrangeParam& p, cplx w);
// M4 = L (M6 E - E'): coefficient matrix of the normal variational system in w.
Mat4c normal_matrix(const LagrangeParam& p, cplx w);

}  // namespace tbm
