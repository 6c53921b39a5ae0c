#pragma once

#include <string>
#include <vector>

#include "tbm/dop853.hpp"
#include "tbm/hamiltonian.hpp"

namespace tbm {

struct IntegrationInfo {
  double rtol = 0, atol = 0;
  OdeStats stats;
  // "completed", "collision P1P3", "step_underflow", ...
  std::string termination = "completed";
};

template <typename StateT>
struct Trajectory {
  std::vector<double> t;
  std::vector<StateT> states;
  IntegrationInfo info;

  bool completed() const { return info.termination == "completed"; }
};

// Adaptive DOP853 at rtol = atol = tol. Samples are taken at every accepted step,
// or at sample_times (dense output) when given. t0 is always the first sample.
Trajectory<FullState> integrate(const FullState& s0, const MassTriple& m, double t0, double t1, double tol,
                                const std::vector<double>& sample_times = {});
Trajectory<ReducedState<double>> integrate(const ReducedState<double>& s0, const MassTriple& m, double t0,
                                           double t1, double tol, const std::vector<double>& sample_times = {});

// Fixed-step 4th-order Yoshida composition of leapfrog; the full Hamiltonian is separable.
Trajectory<FullState> integrate_symplectic(const FullState& s0, const MassTriple& m, double t0, double t1,
                                           double dt);

}  // namespace tbm
