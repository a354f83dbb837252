#pragma once

// Trajectories of x' = (B_0 + sum_i u_i B_i) x under piecewise-constant
// controls. Each interval is advanced by the exact flow exp(dt M) of the
// frozen field, so norms and orbits are preserved to round-off.

#include <cmath>
#include <map>
#include <ostream>
#include <vector>

#include "larc/algebra.hpp"
#include "larc/orbit.hpp"
#include "larc/rankcond.hpp"
#include "larc/state.hpp"

namespace larc {

/// Breakpoints t_0 < ... < t_K and one control vector per interval.
class ControlSchedule {
 public:
  ControlSchedule(std::vector<double> mesh, std::vector<Vector> values)
      : mesh_(std::move(mesh)), values_(std::move(values)) {
    if (mesh_.size() < 2) throw InputError("schedule: mesh needs at least two breakpoints");
    if (values_.size() != mesh_.size() - 1) {
      throw InputError("schedule: expected " + std::to_string(mesh_.size() - 1) + " control values, got " +
                       std::to_string(values_.size()));
    }
    for (std::size_t k = 0; k < mesh_.size(); ++k) {
      if (!std::isfinite(mesh_[k])) throw InputError("schedule: mesh[" + std::to_string(k) + "] not finite");
      if (k > 0 && !(mesh_[k] > mesh_[k - 1])) throw InputError("schedule: mesh must be strictly increasing");
    }
    for (std::size_t k = 0; k < values_.size(); ++k) {
      if (!values_[k].allFinite()) throw InputError("schedule: values[" + std::to_string(k) + "] not finite");
      if (values_[k].size() != values_.front().size()) throw InputError("schedule: ragged control values");
    }
  }

  const std::vector<double>& mesh() const { return mesh_; }
  const std::vector<Vector>& values() const { return values_; }
  int intervals() const { return static_cast<int>(values_.size()); }
  int controls() const { return static_cast<int>(values_.front().size()); }

 private:
  std::vector<double> mesh_;
  std::vector<Vector> values_;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<StatePoint> states;
};

inline Matrix frozen_field(const GeneratorSet& gens, const Vector& u) {
  if (u.size() != static_cast<Eigen::Index>(gens.controls().size())) {
    throw InputError("control vector has " + std::to_string(u.size()) + " entries, system has " +
                     std::to_string(gens.controls().size()) + " controls");
  }
  if (!u.allFinite()) throw InputError("control vector not finite");
  Matrix m = gens.drift() ? *gens.drift() : Matrix::Zero(gens.matrix_dim(), gens.matrix_dim());
  for (Eigen::Index i = 0; i < u.size(); ++i) m += u(i) * gens.controls()[static_cast<std::size_t>(i)];
  return m;
}

/// exp(dt (B_0 + sum u_i B_i)) . x
inline StatePoint step(const GeneratorSet& gens, const Vector& u, double dt, const StatePoint& x) {
  if (!(dt > 0.0)) throw InputError("step: dt must be > 0");
  if (x.n() != gens.n()) throw InputError("step: point dimension mismatch");
  return flow(gens.kind(), frozen_field(gens, u), dt, x);
}

/// Folds `step` over the schedule, recording the state at every breakpoint
/// (and at `oversample - 1` equally spaced interior instants per interval).
inline Trajectory run(const GeneratorSet& gens, const StatePoint& x0, const ControlSchedule& schedule,
                      int oversample = 1) {
  if (oversample < 1) throw InputError("run: oversample must be >= 1");
  if (x0.n() != gens.n()) throw InputError("run: initial state dimension mismatch");
  Trajectory traj;
  traj.times.push_back(schedule.mesh().front());
  traj.states.push_back(x0);
  const auto& mesh = schedule.mesh();
  for (int k = 0; k < schedule.intervals(); ++k) {
    const Matrix field = frozen_field(gens, schedule.values()[static_cast<std::size_t>(k)]);
    const double dt = (mesh[k + 1] - mesh[k]) / oversample;
    const Matrix propagator = expm(dt * field);
    for (int s = 1; s <= oversample; ++s) {
      Vector y = act(gens.kind(), propagator, traj.states.back().coords());
      if (!y.allFinite()) throw NumericalError("run: non-finite state");
      traj.states.push_back(StatePoint::raw(x0.space(), std::move(y)));
      traj.times.push_back(s == oversample ? mesh[k + 1] : mesh[k] + s * dt);
    }
  }
  return traj;
}

struct ConservationSummary {
  double max_norm_drift = 0.0;  // max | ||x(t)|| - ||x0|| |
  std::map<int, int> rank_histogram;
};

inline ConservationSummary summarize(const Trajectory& traj, const LieBasis& basis,
                                     const TolerancePolicy& policy = {}) {
  ConservationSummary s;
  const double r0 = traj.states.front().coords().norm();
  for (const auto& x : traj.states) {
    s.max_norm_drift = std::max(s.max_norm_drift, std::abs(x.coords().norm() - r0));
    ++s.rank_histogram[rank_at(basis, x, policy)];
  }
  return s;
}

/// CSV: t,x1,...,xn
inline void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  const int n = traj.states.front().n();
  os << "t";
  for (int i = 1; i <= n; ++i) os << ",x" << i;
  os << "\n";
  os.precision(17);
  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    os << traj.times[k];
    for (int i = 0; i < n; ++i) os << "," << traj.states[k].coords()(i);
    os << "\n";
  }
}

}  // namespace larc
