#pragma once

#include <string>
#include <vector>

#include "tbm/variational.hpp"

namespace tbm {

struct FuchsianOptions {
  double residue_tol = 1e-8;    // ray limit vs contour integral
  double remainder_tol = 1e-8;  // analytic remainder on the verification grid
  double integer_tol = 1e-8;    // eigenvalues of the residue at tau0
  int contour_points = 64;
  int richardson_levels = 8;
};

struct ChartInfo {
  std::string type = "identity";  // tau = w
  std::string gauge;
  double w0 = 0;
  double k = 0;
  // Residues are stored as V^-1 R V; the normal frame in this chart is E V.
  Mat4c conjugation = Mat4c::Identity();
};

// dx/dtau = sum_i R_i / (tau - tau_i) x, i = 0, 1, 2.
struct FuchsianSystem {
  LagrangeParam orbit;
  std::vector<cplx> points;  // tau0 (apparent, = w0), tau1 (Im < 0), tau2 (Im > 0)
  std::vector<Mat4c> residues;
  std::vector<Mat4c> residues_ray;  // Richardson cross-check values
  cplx basepoint;
  ChartInfo chart;

  double residue_agreement = 0;
  double fuchsian_remainder = 0;
  double tau0_integer_defect = 0;
  double residue_sum_defect = 0;  // large-contour integral vs A + B + C
  Eigen::Vector4cd infinity_exponents;  // eigenvalues of -(A + B + C)
  // Exponents at infinity are {lambda1 + shift, lambda2 + shift, c - lambda1, c - lambda2}.
  int infinity_shift = 0;
  int infinity_c = 0;
  double infinity_exponent_defect = 0;

  Mat4c coefficient(cplx tau) const;
  Mat4c residue_at_infinity() const { return -(residues[0] + residues[1] + residues[2]); }
};

// Positive-definite V (Hermitian gradient flow) locally minimizing sum ||V^-1 R_i V||_F^2.
Mat4c minimal_norm_conjugation(const std::vector<Mat4c>& residues, int max_iter = 2000);

// Residue of the normal matrix at tau by the two methods.
Mat4c residue_by_contour(const LagrangeParam& p, cplx tau, double radius, int points);
Mat4c residue_by_rays(const LagrangeParam& p, cplx tau, double radius, int levels);

FuchsianSystem build_fuchsian(const LagrangeParam& p, const FuchsianOptions& opt = {});

// Exponents at infinity predicted by the mass formula, in the chart's shift convention.
Eigen::Vector4cd predicted_infinity_exponents(const MassTriple& m, int shift = -1, int c = 2);

}  // namespace tbm
