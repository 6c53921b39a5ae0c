#include "tbm/dynamics.hpp"

#include <cmath>

namespace tbm {

namespace {

// Step underflow this close to a binary encounter is reported as a collision approach.
constexpr double kCollisionApproach = 1e-6;

double reduced_min_distance(const ReducedState<double>& s, std::string& name) {
  const auto r = reduced_distances(s);
  double best = r.r1;
  name = "r1";
  if (r.r2 < best) best = r.r2, name = "r2";
  if (r.r3 < best) best = r.r3, name = "r3";
  return best;
}

double full_min_distance(const FullState& s, std::string& name) {
  auto [d, n] = min_pair_distance(s);
  name = n;
  return d;
}

template <typename StateT, typename Packed, typename Field, typename Unpack, typename MinDist>
Trajectory<StateT> run(const StateT& s0, double t0, double t1, double tol, const std::vector<double>& samples,
                       Field field, Unpack unpack, MinDist min_dist) {
  Trajectory<StateT> traj;
  traj.info.rtol = traj.info.atol = tol;
  if (!(tol > 0)) throw std::invalid_argument("integration tolerance must be positive");
  std::string pair;
  if (!(min_dist(s0, pair) >= kCollisionThreshold)) throw collision_error(pair, min_dist(s0, pair));
  traj.t.push_back(t0);
  traj.states.push_back(s0);
  if (t1 == t0) return traj;

  Dop853Options opt;
  opt.rtol = opt.atol = tol;
  opt.dense = !samples.empty();
  std::size_t next = 0;
  while (next < samples.size() && samples[next] == t0) ++next;
  const double dir = t1 > t0 ? 1.0 : -1.0;

  Packed y = s0.packed();
  bool collided = false;
  auto observer = [&](const DenseStep<Packed>& step, const Packed& ynew) {
    if (opt.dense) {
      while (next < samples.size() && (samples[next] - step.t1) * dir <= 0) {
        traj.t.push_back(samples[next]);
        traj.states.push_back(unpack(step(samples[next])));
        ++next;
      }
    } else {
      traj.t.push_back(step.t1);
      traj.states.push_back(unpack(ynew));
    }
    const StateT s = unpack(ynew);
    if (min_dist(s, pair) < kCollisionThreshold) {
      collided = true;
      return false;
    }
    return true;
  };
  try {
    traj.info.stats = dop853([&](double, const Packed& z) { return field(unpack(z)); }, t0, y, t1, opt, observer);
  } catch (const collision_error& e) {
    traj.info.termination = std::string("collision ") + e.pair();
    return traj;
  }
  if (collided) {
    traj.info.termination = "collision " + pair;
  } else if (traj.info.stats.status == OdeStatus::step_underflow &&
             min_dist(unpack(y), pair) < kCollisionApproach) {
    traj.info.termination = "collision approach " + pair;
  } else {
    traj.info.termination = to_string(traj.info.stats.status);
  }
  return traj;
}

}  // namespace

Trajectory<FullState> integrate(const FullState& s0, const MassTriple& m, double t0, double t1, double tol,
                                const std::vector<double>& sample_times) {
  m.validate();
  return run<FullState, Vec12>(
      s0, t0, t1, tol, sample_times, [&](const FullState& s) { return vector_field_full(s, m); },
      [](const Vec12& z) { return FullState::unpack(z); }, full_min_distance);
}

Trajectory<ReducedState<double>> integrate(const ReducedState<double>& s0, const MassTriple& m, double t0,
                                           double t1, double tol, const std::vector<double>& sample_times) {
  m.validate();
  const double k = s0.k;
  return run<ReducedState<double>, Vec6<double>>(
      s0, t0, t1, tol, sample_times,
      [&](const ReducedState<double>& s) { return vector_field_reduced<double>(s, m); },
      [k](const Vec6<double>& z) { return ReducedState<double>::unpack(z, k); }, reduced_min_distance);
}

Trajectory<FullState> integrate_symplectic(const FullState& s0, const MassTriple& m, double t0, double t1,
                                           double dt) {
  m.validate();
  if (!(dt > 0)) throw std::invalid_argument("step must be positive");
  const double cbrt2 = std::cbrt(2.0);
  const double w1 = 1.0 / (2.0 - cbrt2), w0 = -cbrt2 / (2.0 - cbrt2);
  const double ws[3] = {w1, w0, w1};
  const double ms[3] = {m.m1, m.m2, m.m3};

  Trajectory<FullState> traj;
  traj.t.push_back(t0);
  traj.states.push_back(s0);
  const long steps = std::max<long>(1, std::lround(std::ceil(std::abs(t1 - t0) / dt)));
  const double h = (t1 - t0) / static_cast<double>(steps);
  FullState s = s0;
  auto kick = [&](double tau) { s.y += tau * vector_field_full(s, m).tail<6>(); };
  auto drift = [&](double tau) {
    for (int i = 0; i < 3; ++i) s.x.segment<2>(2 * i) += tau * s.y.segment<2>(2 * i) / ms[i];
  };
  try {
    for (long n = 0; n < steps; ++n) {
      for (double w : ws) {
        drift(0.5 * w * h);
        kick(w * h);
        drift(0.5 * w * h);
      }
      traj.t.push_back(t0 + static_cast<double>(n + 1) * h);
      traj.states.push_back(s);
      ++traj.info.stats.accepted;
    }
  } catch (const collision_error& e) {
    traj.info.termination = std::string("collision ") + e.pair();
  }
  return traj;
}

}  // namespace tbm
