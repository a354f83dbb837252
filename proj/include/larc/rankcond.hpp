#pragma once

// Rank of a Lie algebra at a point, the single-point controllability test for
// systems induced by proper actions, the group-level rank condition and the
// verdict logic tying them together.

#include <cstdint>
#include <cstdio>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "larc/algebra.hpp"
#include "larc/graphcrit.hpp"
#include "larc/state.hpp"

namespace larc {

enum class Verdict { controllable, not_controllable, inconclusive };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::controllable:
      return "controllable";
    case Verdict::not_controllable:
      return "not_controllable";
    case Verdict::inconclusive:
      return "inconclusive";
  }
  return "?";
}

enum class Criterion { single_point_rank, graph_connectivity, group_larc };

inline const char* to_string(Criterion c) {
  switch (c) {
    case Criterion::single_point_rank:
      return "single_point_rank";
    case Criterion::graph_connectivity:
      return "graph_connectivity";
    case Criterion::group_larc:
      return "group_larc";
  }
  return "?";
}

/// Numerical rank of a set of tangent vectors (columns). `scale` is a lower
/// bound for the threshold scale so that pure round-off never counts as rank.
inline int tangent_rank(const Matrix& fields, double scale, const TolerancePolicy& policy = {}) {
  if (fields.cols() == 0 || fields.rows() == 0) return 0;
  require_finite(fields, "tangent fields");
  Eigen::JacobiSVD<Matrix> svd(fields);
  const Vector& sigma = svd.singularValues();
  const double tau = policy(std::max(sigma(0), scale), fields.rows(), fields.cols());
  int r = 0;
  for (Eigen::Index k = 0; k < sigma.size(); ++k)
    if (sigma(k) > tau) ++r;
  return r;
}

/// Columns A_k x (or A_k x + mu_k) for every basis element.
inline Matrix fields_at(const LieBasis& basis, const Vector& x) {
  Matrix f(x.size(), basis.dim());
  for (int k = 0; k < basis.dim(); ++k) f.col(k) = field_at(basis.kind, basis.basis[k], x);
  return f;
}

/// rank_x h = dim { A x : A in h }.
inline int rank_at(const LieBasis& basis, const StatePoint& x, const TolerancePolicy& policy = {}) {
  if (x.n() != basis.n) {
    throw InputError("rank_at: point dimension " + std::to_string(x.n()) + " does not match n = " +
                     std::to_string(basis.n));
  }
  const bool affine = basis.kind == GeneratorKind::affine;
  if (!affine && x.coords().norm() == 0.0) {
    throw InputError("rank_at: x = 0 is excluded from the state space of a linear action");
  }
  if (basis.dim() == 0) return 0;
  // a priori bound on the round-off in the columns: sum_k || |B_k| |x^| ||
  const auto n = x.coords().size();
  Vector xh = x.coords().cwiseAbs();
  if (affine) {
    xh.conservativeResize(n + 1);
    xh(n) = 1.0;
  }
  double scale = 0.0;
  for (const auto& b : basis.basis) scale += (b.cwiseAbs() * xh).head(n).norm();
  return tangent_rank(fields_at(basis, x.coords()), scale, policy);
}

/// Orbit dimension needed for controllability: n-1 on S^{n-1}, n on R^n.
inline int required_rank(Space space, int n) { return space == Space::sphere ? n - 1 : n; }

/// Group-level rank condition: the closure is the whole ambient algebra.
inline bool check_group_larc(const LieBasis& basis, const GeneratorSet& gens) {
  return basis.dim() == ambient_algebra_dim(gens.kind(), gens.n());
}

struct AnalysisReport {
  Verdict verdict = Verdict::inconclusive;
  GeneratorKind kind = GeneratorKind::skew;
  int n = 0;
  int rank_at_probe = 0;
  StatePoint probe_point;
  int required_rank = 0;
  int orbit_dim = 0;
  int closure_dim = 0;
  int ambient_algebra_dim = 0;
  // probe first, then the extra genericity probes
  std::vector<int> sampled_ranks;
  bool group_larc = false;
  // "full" when both directions of the rank test are licensed, else "sufficiency_only"
  std::string mode = "full";
  std::vector<Criterion> criteria_used;
  GroupAssertions assumptions;
  std::vector<std::string> diagnostics;
  std::uint64_t seed = 0;

  bool operator==(const AnalysisReport&) const = default;
};

struct AnalyzeOptions {
  std::optional<StatePoint> probe;
  std::uint64_t seed = 0;
  TolerancePolicy tolerance;
  int extra_probes = 3;
};

/// Uniform on the sphere for so(n); standard Gaussian in R^n otherwise.
inline StatePoint random_point(GeneratorKind kind, int n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector v(n);
  for (int i = 0; i < n; ++i) v(i) = normal(rng);
  return StatePoint::for_kind(kind, std::move(v));
}

namespace detail {

inline std::string format_vector(const Vector& v) {
  // name standard basis vectors, print anything else
  for (Eigen::Index k = 0; k < v.size(); ++k) {
    Vector e = Vector::Zero(v.size());
    e(k) = 1.0;
    if ((v - e).norm() < 1e-12 || (v + e).norm() < 1e-12) return "e" + std::to_string(k + 1);
  }
  std::ostringstream os;
  os << "(";
  for (Eigen::Index k = 0; k < v.size(); ++k) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", std::abs(v(k)) < 1e-14 ? 0.0 : v(k));
    os << (k ? ", " : "") << buf;
  }
  os << ")";
  return os.str();
}

// Points fixed by every element of the closure: the common kernel for linear
// kinds, the solution set of A_k x + mu_k = 0 for affine ones.
inline std::vector<std::string> fixed_point_notes(const LieBasis& basis) {
  std::vector<std::string> notes;
  const int n = basis.n;
  if (basis.dim() == 0) {
    notes.push_back("closure is {0}: every point is fixed");
    return notes;
  }
  Matrix stacked(static_cast<Eigen::Index>(basis.dim()) * n, n);
  Vector rhs = Vector::Zero(stacked.rows());
  for (int k = 0; k < basis.dim(); ++k) {
    stacked.middleRows(k * n, n) = basis.basis[k].topLeftCorner(n, n);
    if (basis.kind == GeneratorKind::affine) rhs.segment(k * n, n) = -basis.basis[k].topRightCorner(n, 1);
  }
  Eigen::JacobiSVD<Matrix> svd(stacked, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vector& sigma = svd.singularValues();
  const double tau = TolerancePolicy{}(std::max(sigma(0), 1.0), stacked.rows(), stacked.cols());
  int rank = 0;
  for (Eigen::Index k = 0; k < sigma.size(); ++k)
    if (sigma(k) > tau) ++rank;

  if (basis.kind == GeneratorKind::affine) {
    Vector x = svd.solve(rhs);
    if ((stacked * x - rhs).norm() > 1e-9 * std::max(1.0, rhs.norm())) return notes;
    std::string note = "fixed point " + format_vector(x);
    if (rank < n) note += " (fixed set has dimension " + std::to_string(n - rank) + ")";
    notes.push_back(note);
    return notes;
  }
  if (rank == n) return notes;
  std::string note = "fixed subspace of dimension " + std::to_string(n - rank) + " spanned by";
  for (int k = rank; k < n; ++k) note += " " + format_vector(svd.matrixV().col(k));
  notes.push_back(note);
  return notes;
}

}  // namespace detail

/**
 * Closure -> rank at a probe (plus genericity probes) -> verdict.
 *
 * Sufficiency (max rank == required) needs a proper action; the necessity
 * direction (deficient rank everywhere sampled => not controllable) also needs
 * pi_1 of the state space to have no element of infinite order. A drift term
 * is covered only for compact groups or with a periodic drift; otherwise the
 * rank test is reported but the verdict stays inconclusive.
 */
inline AnalysisReport analyze(const GeneratorSet& gens, const AnalyzeOptions& options = {}) {
  const auto& asserted = gens.assertions();
  const GeneratorKind kind = gens.kind();
  const int n = gens.n();
  if (kind == GeneratorKind::affine && asserted.compact) {
    throw AssertionError("assertions: SE(n) is not compact; 'compact' conflicts with kind se");
  }
  if (kind == GeneratorKind::skew && n < 2) throw InputError("analyze: kind so needs n >= 2");

  AnalysisReport report;
  report.kind = kind;
  report.n = n;
  report.seed = options.seed;
  report.assumptions = asserted;

  const LieBasis basis = lie_closure(gens, options.tolerance);
  report.closure_dim = basis.dim();
  report.ambient_algebra_dim = ambient_algebra_dim(kind, n);
  report.group_larc = check_group_larc(basis, gens);

  std::mt19937_64 rng(options.seed);
  if (options.probe) {
    if (options.probe->n() != n) throw InputError("probe: expected " + std::to_string(n) + " coordinates");
    report.probe_point = StatePoint::for_kind(kind, options.probe->coords());
    if (kind == GeneratorKind::general && report.probe_point.coords().norm() == 0.0) {
      throw InputError("probe: x = 0 is excluded for a linear action");
    }
  } else {
    report.probe_point = random_point(kind, n, rng);
  }
  report.rank_at_probe = rank_at(basis, report.probe_point, options.tolerance);
  report.orbit_dim = report.rank_at_probe;
  report.sampled_ranks.push_back(report.rank_at_probe);
  int max_rank = report.rank_at_probe;
  for (int k = 0; k < options.extra_probes; ++k) {
    const int r = rank_at(basis, random_point(kind, n, rng), options.tolerance);
    report.sampled_ranks.push_back(r);
    max_rank = std::max(max_rank, r);
  }
  report.required_rank = required_rank(space_for(kind), n);
  report.criteria_used.push_back(Criterion::single_point_rank);

  const bool builtin_proper = kind != GeneratorKind::general;
  const bool proper = builtin_proper || asserted.compact || asserted.proper_action;
  const bool compact_group = kind == GeneratorKind::skew || asserted.compact;
  const bool drift_covered = !gens.has_drift() || compact_group || asserted.drift_periodic;
  const bool pi1_ok = builtin_proper || asserted.finite_fundamental_group;

  if (!proper) report.diagnostics.push_back("proper action not asserted for kind general");
  if (!drift_covered) {
    report.diagnostics.push_back("drift present on a non-compact group without drift_periodic: rank test only");
  }
  if (!pi1_ok) report.diagnostics.push_back("necessity needs finite_fundamental_group for kind general");
  if (kind == GeneratorKind::affine) report.diagnostics.push_back("SE(n) acts properly on R^n");
  report.mode = (proper && drift_covered && pi1_ok) ? "full" : "sufficiency_only";

  if (max_rank == report.required_rank) {
    if (proper && drift_covered) {
      report.verdict = Verdict::controllable;
    } else {
      report.verdict = Verdict::inconclusive;
      report.diagnostics.push_back("accessibility rank is full but controllability is not licensed");
    }
  } else {
    report.verdict = (proper && drift_covered && pi1_ok) ? Verdict::not_controllable : Verdict::inconclusive;
  }
  if (max_rank != report.rank_at_probe) {
    report.diagnostics.push_back("probe is non-generic: rank " + std::to_string(report.rank_at_probe) +
                                 " at probe, " + std::to_string(max_rank) + " elsewhere");
  }

  if (compact_group) {
    report.criteria_used.push_back(Criterion::group_larc);
    report.diagnostics.push_back(std::string("group-level closure ") + (report.group_larc ? "is" : "is not") +
                                 " the full algebra");
  }

  for (auto& note : detail::fixed_point_notes(basis)) report.diagnostics.push_back(std::move(note));

  if (kind == GeneratorKind::skew) {
    std::vector<std::pair<int, int>> edges;
    bool all_edges = true;
    for (const auto& g : gens.all()) {
      auto e = standard_edge(g);
      if (!e) {
        all_edges = false;
        break;
      }
      edges.push_back(*e);
    }
    if (all_edges) {
      EdgeSpec spec(n, edges);
      report.criteria_used.push_back(Criterion::graph_connectivity);
      std::string note = "graph components:";
      for (const auto& c : components(spec)) {
        note += " {";
        for (std::size_t k = 0; k < c.size(); ++k) note += (k ? "," : "") + std::to_string(c[k]);
        note += "}";
      }
      report.diagnostics.push_back(note);
      const bool connected = is_connected(spec);
      if (connected != (report.verdict == Verdict::controllable)) {
        report.diagnostics.push_back("graph criterion disagrees with the rank test");
      }
    }
  }
  return report;
}

}  // namespace larc
