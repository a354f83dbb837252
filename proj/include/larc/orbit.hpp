#pragma once

// Orbit sampling by composed exponential flows, rank-constancy checks along
// orbits and PCA estimates of the local orbit dimension.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <map>
#include <ostream>
#include <mutex>
#include <random>
#include <thread>
#include <utility>
#include <vector>

#include <unsupported/Eigen/MatrixFunctions>

#include "larc/algebra.hpp"
#include "larc/rankcond.hpp"
#include "larc/state.hpp"

namespace larc {

/// exp(m) by scaling and squaring with a Pade approximant.
inline Matrix expm(const Matrix& m) {
  require_finite(m, "expm argument");
  Matrix e = m.exp();
  require_finite(e, "expm result");
  return e;
}

/// exp(t B) . x; homogeneous application for affine generators.
inline StatePoint flow(GeneratorKind kind, const Matrix& generator, double t, const StatePoint& x) {
  if (!std::isfinite(t)) throw NumericalError("flow: non-finite time");
  Vector y = act(kind, expm(t * generator), x.coords());
  if (!y.allFinite()) throw NumericalError("flow: non-finite state");
  return StatePoint::raw(x.space(), std::move(y));
}

struct FlowStep {
  int generator = 0;
  double time = 0.0;

  bool operator==(const FlowStep&) const = default;
};

struct OrbitSample {
  StatePoint base;
  std::vector<StatePoint> points;
  std::vector<std::vector<FlowStep>> words;
  std::uint64_t seed = 0;
};

struct SampleOptions {
  int count = 100;
  double horizon = 2.0 * 3.14159265358979323846;
  int word_length = 12;
  std::uint64_t seed = 0;
};

/// Seed stream of word `index`, independent of how many words are drawn.
inline std::mt19937_64 word_rng(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

/// Random words of flows of `generators` applied to x0. Each point is an
/// element of the orbit H(x0) of the group generated by the given elements.
/// Words are drawn on worker threads; word k always lands in slot k.
inline OrbitSample sample_orbit(GeneratorKind kind, const std::vector<Matrix>& generators, const StatePoint& x0,
                                const SampleOptions& opt = {}) {
  if (opt.count < 1) throw InputError("sample_orbit: count must be >= 1");
  if (!(opt.horizon > 0.0)) throw InputError("sample_orbit: horizon must be > 0");
  if (opt.word_length < 1) throw InputError("sample_orbit: word length must be >= 1");
  OrbitSample out;
  out.base = x0;
  out.seed = opt.seed;
  out.points.assign(static_cast<std::size_t>(opt.count), x0);
  out.words.resize(static_cast<std::size_t>(opt.count));
  if (generators.empty()) return out;

  auto draw = [&](int w) {
    auto rng = word_rng(opt.seed, static_cast<std::uint64_t>(w));
    std::uniform_int_distribution<int> length(1, opt.word_length);
    std::uniform_real_distribution<double> time(-opt.horizon, opt.horizon);
    std::uniform_int_distribution<int> pick(0, static_cast<int>(generators.size()) - 1);
    StatePoint x = x0;
    std::vector<FlowStep> word;
    const int len = length(rng);
    for (int s = 0; s < len; ++s) {
      FlowStep step{pick(rng), time(rng)};
      x = flow(kind, generators[static_cast<std::size_t>(step.generator)], step.time, x);
      word.push_back(step);
    }
    out.points[static_cast<std::size_t>(w)] = std::move(x);
    out.words[static_cast<std::size_t>(w)] = std::move(word);
  };

  const int workers = std::min<int>(opt.count / 32, static_cast<int>(std::max(1u, std::thread::hardware_concurrency())));
  if (workers <= 1) {
    for (int w = 0; w < opt.count; ++w) draw(w);
    return out;
  }
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (int t = 0; t < workers; ++t) {
    pool.emplace_back([&] {
      for (int w = next++; w < opt.count; w = next++) {
        try {
          draw(w);
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
  return out;
}

inline OrbitSample sample_orbit(const GeneratorSet& gens, const StatePoint& x0, const SampleOptions& opt = {}) {
  return sample_orbit(gens.kind(), gens.all(), x0, opt);
}

struct RankConstancy {
  bool constant = true;
  std::map<int, int> histogram;  // rank -> count
};

inline RankConstancy verify_rank_constancy(const LieBasis& basis, const OrbitSample& sample,
                                           const TolerancePolicy& policy = {}) {
  RankConstancy out;
  for (const auto& p : sample.points) ++out.histogram[rank_at(basis, p, policy)];
  out.constant = out.histogram.size() <= 1;
  return out;
}

struct LocalDimOptions {
  double radius = 0.1;
  double relative_threshold = 1e-3;
  int min_points = 10;
};

/// Number of principal directions of the centered cloud of sample points
/// within `radius` of `center` whose singular value exceeds
/// relative_threshold * sigma_max.
inline int estimate_local_dim(const OrbitSample& sample, const StatePoint& center, const LocalDimOptions& opt = {}) {
  std::vector<const Vector*> local;
  for (const auto& p : sample.points)
    if ((p.coords() - center.coords()).norm() <= opt.radius) local.push_back(&p.coords());
  if (static_cast<int>(local.size()) < opt.min_points) {
    throw SamplingError("estimate_local_dim: " + std::to_string(local.size()) + " points within radius " +
                        std::to_string(opt.radius) + ", need " + std::to_string(opt.min_points));
  }
  const auto n = center.coords().size();
  Matrix cloud(static_cast<Eigen::Index>(local.size()), n);
  for (std::size_t k = 0; k < local.size(); ++k) cloud.row(static_cast<Eigen::Index>(k)) = local[k]->transpose();
  cloud.rowwise() -= cloud.colwise().mean();
  Eigen::JacobiSVD<Matrix> svd(cloud);
  const Vector& sigma = svd.singularValues();
  const double floor = 1e-13 * std::max(1.0, center.coords().norm());
  if (sigma.size() == 0 || sigma(0) <= floor) return 0;
  int dim = 0;
  for (Eigen::Index k = 0; k < sigma.size(); ++k)
    if (sigma(k) > opt.relative_threshold * sigma(0)) ++dim;
  return dim;
}

struct LocalSampleOptions {
  int count = 64;
  // flow times are drawn from [-horizon, horizon]; the curvature of the orbit
  // enters the cloud at relative order ~horizon
  double horizon = 1e-6;
  int word_length = 12;
  // random elements g of H used to form Ad_g B_i; 0 picks the algebra dimension
  int conjugates = 0;
  std::uint64_t seed = 0;
};

/**
 * Orbit sample concentrated near `center`. First-order displacements only see
 * span{B_i x}, so the flows also use conjugates g B_i g^{-1} with g drawn from
 * long words of the generators. These span h for a connected group, without
 * touching the Lie closure.
 */
inline OrbitSample local_orbit_sample(const GeneratorSet& gens, const StatePoint& center,
                                      const LocalSampleOptions& opt = {}) {
  const GeneratorKind kind = gens.kind();
  const auto base = gens.all();
  const int d = gens.matrix_dim();
  const int conjugates = opt.conjugates > 0 ? opt.conjugates : ambient_algebra_dim(kind, gens.n());

  std::vector<Matrix> family = base;
  for (int c = 0; c < conjugates; ++c) {
    auto rng = word_rng(opt.seed ^ 0x9e3779b97f4a7c15ULL, static_cast<std::uint64_t>(c));
    std::uniform_int_distribution<int> pick(0, static_cast<int>(base.size()) - 1);
    std::uniform_real_distribution<double> time(-3.0, 3.0);
    Matrix g = Matrix::Identity(d, d);
    for (int s = 0; s < 8; ++s) g = expm(time(rng) * base[static_cast<std::size_t>(pick(rng))]) * g;
    const Matrix g_inv = g.inverse();
    for (const auto& b : base) family.push_back(g * b * g_inv);
  }
  // common scale so no generator dominates the cloud
  for (auto& f : family) {
    const double s = f.norm();
    if (s > 0.0) f /= s;
  }
  SampleOptions so;
  so.count = opt.count;
  so.horizon = opt.horizon;
  so.word_length = opt.word_length;
  so.seed = opt.seed;
  return sample_orbit(kind, family, center, so);
}

/// CSV with one point per row: x1,...,xn.
inline void write_orbit_csv(std::ostream& os, const OrbitSample& sample) {
  const int n = sample.base.n();
  for (int i = 1; i <= n; ++i) os << (i > 1 ? "," : "") << "x" << i;
  os << "\n";
  os.precision(17);
  for (const auto& p : sample.points) {
    for (int i = 0; i < n; ++i) os << (i ? "," : "") << p.coords()(i);
    os << "\n";
  }
}

}  // namespace larc
