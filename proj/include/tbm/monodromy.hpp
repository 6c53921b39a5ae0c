#pragma once

#include <functional>
#include <string>
#include <vector>

#include "tbm/fuchsian.hpp"

namespace tbm {

// Closed polygonal loop starting and ending at the basepoint.
struct LoopPath {
  cplx basepoint;
  std::vector<cplx> waypoints;  // first == last == basepoint
  std::vector<int> encircled;   // indices of singular points wound around once, counterclockwise
};

struct TransportOptions {
  double tol = 1e-12;
  double clearance_factor = 0.1;  // times the smallest pairwise singular-point distance
  int circle_vertices = 48;
};

struct TransportStats {
  long steps = 0;
  long rejected = 0;
  long evaluations = 0;
};

using CoefficientFn = std::function<Eigen::MatrixXcd(cplx)>;

// Sum of simple poles; the synthetic systems in tests use this directly.
struct PoleSystem {
  std::vector<cplx> points;
  std::vector<Eigen::MatrixXcd> residues;
  int dim() const { return residues.empty() ? 0 : static_cast<int>(residues.front().rows()); }
  Eigen::MatrixXcd operator()(cplx tau) const;
};
PoleSystem pole_system(const FuchsianSystem& fs);

LoopPath keyhole_loop(const std::vector<cplx>& points, cplx basepoint, int index, int vertices);
LoopPath enclosing_loop(const std::vector<cplx>& points, cplx basepoint, int vertices);
LoopPath reversed(const LoopPath& loop);
// Smallest distance from any segment of the loop to any singular point.
double path_clearance(const std::vector<cplx>& points, const LoopPath& loop);

// Fundamental matrix X with X(start) = I continued along the loop; returns X(end).
Eigen::MatrixXcd transport(const CoefficientFn& A, int dim, const std::vector<cplx>& points, const LoopPath& loop,
                           const TransportOptions& opt, TransportStats* stats = nullptr);
Eigen::MatrixXcd transport(const PoleSystem& sys, const LoopPath& loop, const TransportOptions& opt,
                           TransportStats* stats = nullptr);

struct MonodromySet {
  Mat4c T0, T1, T2;
  Mat4c Tinf;          // inverse of the counterclockwise enclosing-loop transport
  Mat4c Tinf_product;  // from the boundary relation
  double tol = 0;
  std::vector<LoopPath> loops;  // keyholes for tau0, tau1, tau2, then the enclosing loop
  std::vector<int> ccw_order;   // singular point indices in counterclockwise order from the outward cut
  std::string relation;         // e.g. "T1*T0*T2*Tinf = I"
  double relation_residual = 0;
  double direct_vs_product = 0;
  std::array<double, 3> det_defects{};  // |det T_i - exp(2 pi i tr R_i)|
  TransportStats stats;

  const Mat4c& generator(int i) const { return i == 0 ? T0 : (i == 1 ? T1 : T2); }
};

MonodromySet generators(const FuchsianSystem& fs, const TransportOptions& opt = {});

}  // namespace tbm
