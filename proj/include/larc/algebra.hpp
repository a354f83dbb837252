#pragma once

// Matrix Lie algebra kernel: brackets, row-major vectorization, rank-revealing
// subspace bases and Lie closure by iterated bracketing.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "larc/errors.hpp"

namespace larc {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Which matrix algebra the generators live in.
///   skew    : so(n), acting linearly on the sphere S^{n-1}
///   affine  : se(n) in homogeneous (n+1)x(n+1) form, acting on R^n
///   general : gl(n), acting linearly on R^n
enum class GeneratorKind { skew, affine, general };

inline const char* to_string(GeneratorKind kind) {
  switch (kind) {
    case GeneratorKind::skew:
      return "so";
    case GeneratorKind::affine:
      return "se";
    case GeneratorKind::general:
      return "general";
  }
  return "?";
}

/// Declared facts about the group that the library cannot verify itself.
struct GroupAssertions {
  bool compact = false;
  bool proper_action = false;
  bool drift_periodic = false;
  // pi_1 of the state space has no element of infinite order
  bool finite_fundamental_group = false;

  bool operator==(const GroupAssertions&) const = default;
};

/// Rank threshold: tau = max_dim * eps * scale unless an absolute override is set.
struct TolerancePolicy {
  std::optional<double> absolute;

  double operator()(double scale, Eigen::Index rows, Eigen::Index cols) const {
    if (absolute) return *absolute;
    const auto max_dim = static_cast<double>(std::max<Eigen::Index>({rows, cols, 1}));
    return max_dim * std::numeric_limits<double>::epsilon() * scale;
  }
};

inline bool all_finite(const Matrix& m) { return m.allFinite(); }

inline void require_finite(const Matrix& m, const char* what) {
  if (!m.allFinite()) throw NumericalError(std::string("non-finite entries in ") + what);
}

/// [A, B] = AB - BA.
inline Matrix bracket(const Matrix& a, const Matrix& b) {
  if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows()) {
    throw InputError("bracket: operands must be square of equal dimension (got " +
                     std::to_string(a.rows()) + "x" + std::to_string(a.cols()) + " and " +
                     std::to_string(b.rows()) + "x" + std::to_string(b.cols()) + ")");
  }
  return a * b - b * a;
}

/// Row-major flattening; entry (i, j) lands at i * cols + j.
inline Vector vectorize(const Matrix& m) {
  Vector v(m.size());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) v(i * m.cols() + j) = m(i, j);
  return v;
}

inline Matrix unvectorize(const Vector& v, Eigen::Index rows, Eigen::Index cols) {
  if (v.size() != rows * cols) throw InputError("unvectorize: size mismatch");
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = v(i * cols + j);
  return m;
}

/// Induced infinity norm (max absolute row sum).
inline double inf_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  return m.cwiseAbs().rowwise().sum().maxCoeff();
}

/// ||G + G^T||_inf <= 1e-12 ||G||_inf.
inline bool is_skew(const Matrix& g, double relative_tolerance = 1e-12) {
  if (g.rows() != g.cols()) return false;
  return inf_norm(g + g.transpose()) <= relative_tolerance * inf_norm(g);
}

/// Dimension of the Lie algebra the generators live in: so(n), se(n) or gl(n).
inline int ambient_algebra_dim(GeneratorKind kind, int n) {
  switch (kind) {
    case GeneratorKind::skew:
      return n * (n - 1) / 2;
    case GeneratorKind::affine:
      return n * (n - 1) / 2 + n;
    case GeneratorKind::general:
      return n * n;
  }
  return 0;
}

/// Side length of the working matrices for a state dimension n.
inline int matrix_dim(GeneratorKind kind, int n) {
  return kind == GeneratorKind::affine ? n + 1 : n;
}

/**
 * The matrices B_0 (drift, optional) and B_1..B_m (controls) of the bilinear system
 *
 *   x' = (B_0 + sum_i u_i B_i) x.
 *
 * Affine generators are stored in homogeneous form [[A, mu], [0, 0]] so one
 * closure engine handles every kind; see larc/affine.hpp for constructors.
 */
class GeneratorSet {
 public:
  GeneratorSet(GeneratorKind kind, int n, std::optional<Matrix> drift,
               std::vector<Matrix> controls, GroupAssertions assertions = {})
      : kind_(kind),
        n_(n),
        drift_(std::move(drift)),
        controls_(std::move(controls)),
        assertions_(assertions) {
    validate();
  }

  GeneratorKind kind() const { return kind_; }
  int n() const { return n_; }
  int matrix_dim() const { return larc::matrix_dim(kind_, n_); }
  const std::optional<Matrix>& drift() const { return drift_; }
  bool has_drift() const { return drift_.has_value(); }
  const std::vector<Matrix>& controls() const { return controls_; }
  const GroupAssertions& assertions() const { return assertions_; }
  void set_assertions(const GroupAssertions& a) { assertions_ = a; }

  /// Drift first (if present), then controls in order.
  std::vector<Matrix> all() const {
    std::vector<Matrix> out;
    out.reserve(controls_.size() + 1);
    if (drift_) out.push_back(*drift_);
    out.insert(out.end(), controls_.begin(), controls_.end());
    return out;
  }

 private:
  void validate() const {
    if (n_ < 1) throw InputError("generator set: state dimension n must be >= 1");
    if (controls_.empty() && !drift_) throw InputError("generator set: need a drift or at least one control");
    const int d = matrix_dim();
    auto check = [&](const Matrix& g, const std::string& label) {
      if (g.rows() != d || g.cols() != d) {
        throw InputError(label + ": expected " + std::to_string(d) + "x" + std::to_string(d) +
                         " matrix, got " + std::to_string(g.rows()) + "x" + std::to_string(g.cols()));
      }
      if (!g.allFinite()) throw InputError(label + ": non-finite entry");
      if (kind_ == GeneratorKind::skew && !is_skew(g)) {
        throw InputError(label + ": not skew-symmetric (kind so)");
      }
      if (kind_ == GeneratorKind::affine) {
        if (!is_skew(g.topLeftCorner(n_, n_))) throw InputError(label + ": rotation block not skew-symmetric");
        if (g.row(n_).cwiseAbs().maxCoeff() != 0.0) throw InputError(label + ": homogeneous bottom row must be zero");
      }
    };
    if (drift_) check(*drift_, "drift");
    for (std::size_t i = 0; i < controls_.size(); ++i) check(controls_[i], "controls[" + std::to_string(i) + "]");
  }

  GeneratorKind kind_;
  int n_;
  std::optional<Matrix> drift_;
  std::vector<Matrix> controls_;
  GroupAssertions assertions_;
};

/// Orthonormal basis (Frobenius inner product) of a matrix Lie algebra.
struct LieBasis {
  GeneratorKind kind = GeneratorKind::skew;
  int n = 0;
  int matrix_dim = 0;
  std::vector<Matrix> basis;
  double tolerance = 0.0;
  bool saturated = false;

  int dim() const { return static_cast<int>(basis.size()); }
  /// Dimension of the vectorized matrix space.
  int ambient_dim() const { return matrix_dim * matrix_dim; }
};

struct SubspaceBasis {
  int dim = 0;
  std::vector<Matrix> basis;
};

/// Numerical rank and orthonormal basis of span{vectors} via SVD of the
/// stacked row-major vectorizations.
inline SubspaceBasis subspace_rank(std::span<const Matrix> vectors, const TolerancePolicy& policy = {}) {
  if (vectors.empty()) throw InputError("subspace_rank: empty list");
  const auto rows = vectors.front().rows();
  const auto cols = vectors.front().cols();
  Matrix stacked(static_cast<Eigen::Index>(vectors.size()), rows * cols);
  for (std::size_t k = 0; k < vectors.size(); ++k) {
    if (vectors[k].rows() != rows || vectors[k].cols() != cols) {
      throw InputError("subspace_rank: shape mismatch at index " + std::to_string(k));
    }
    stacked.row(static_cast<Eigen::Index>(k)) = vectorize(vectors[k]).transpose();
  }
  require_finite(stacked, "subspace_rank input");

  Eigen::JacobiSVD<Matrix> svd(stacked, Eigen::ComputeThinV);
  const Vector& sigma = svd.singularValues();
  const double sigma_max = sigma.size() ? sigma(0) : 0.0;
  const double tau = policy(sigma_max, stacked.rows(), stacked.cols());

  SubspaceBasis out;
  for (Eigen::Index k = 0; k < sigma.size(); ++k) {
    if (sigma(k) > tau) ++out.dim;
  }
  for (int k = 0; k < out.dim; ++k) out.basis.push_back(unvectorize(svd.matrixV().col(k), rows, cols));
  return out;
}

namespace detail {

// Gram-Schmidt admission against an orthonormal list, two passes.
// Returns the normalized residual if its norm exceeds tau.
inline std::optional<Vector> orthogonal_residual(const std::vector<Vector>& basis, Vector candidate, double tau) {
  for (int pass = 0; pass < 2; ++pass)
    for (const auto& b : basis) candidate -= b.dot(candidate) * b;
  const double r = candidate.norm();
  if (!std::isfinite(r)) throw NumericalError("lie_closure: non-finite residual");
  if (r <= tau) return std::nullopt;
  return Vector(candidate / r);
}

}  // namespace detail

/**
 * Lie closure h = Lie{B_0, ..., B_m}.
 *
 * Seeds with the generators (Gram-Schmidt in input order), then sweeps: every
 * newly admitted element is bracketed with all earlier ones in insertion
 * order, and residuals above tolerance are admitted. Stops after a sweep that
 * admits nothing, or once the ambient algebra is exhausted.
 */
inline LieBasis lie_closure(const GeneratorSet& gens, const TolerancePolicy& policy = {}) {
  const int d = gens.matrix_dim();
  const Eigen::Index vec_dim = static_cast<Eigen::Index>(d) * d;
  const int cap = ambient_algebra_dim(gens.kind(), gens.n());

  LieBasis out;
  out.kind = gens.kind();
  out.n = gens.n();
  out.matrix_dim = d;

  const auto seeds = gens.all();
  double seed_scale = 0.0;
  for (const auto& g : seeds) seed_scale = std::max(seed_scale, g.norm());
  const double seed_tau = policy(seed_scale, vec_dim, cap);
  const double bracket_tau = policy(1.0, vec_dim, cap);
  out.tolerance = bracket_tau;

  std::vector<Vector> vecs;
  auto admit = [&](const Matrix& candidate, double tau) {
    if (static_cast<int>(vecs.size()) >= cap) return false;
    auto r = detail::orthogonal_residual(vecs, vectorize(candidate), tau);
    if (!r) return false;
    vecs.push_back(std::move(*r));
    out.basis.push_back(unvectorize(vecs.back(), d, d));
    return true;
  };

  for (const auto& g : seeds) admit(g, seed_tau);

  std::size_t processed = 0;
  const int max_sweeps = cap + 2;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    const std::size_t end = out.basis.size();
    if (static_cast<int>(end) >= cap || processed == end) {
      out.saturated = true;
      return out;
    }
    for (std::size_t j = processed; j < end; ++j) {
      for (std::size_t i = 0; i < j; ++i) {
        Matrix c = bracket(out.basis[i], out.basis[j]);
        require_finite(c, "lie_closure bracket");
        admit(c, bracket_tau);
      }
    }
    processed = end;
  }
  throw SaturationError("lie_closure: sweep cap exceeded", out.dim());
}

/// Closure of an explicit matrix list (used to re-close an existing basis).
inline LieBasis lie_closure(GeneratorKind kind, int n, std::vector<Matrix> mats, const TolerancePolicy& policy = {}) {
  return lie_closure(GeneratorSet(kind, n, std::nullopt, std::move(mats)), policy);
}

/// Largest residual of [b_i, b_j] projected off span(basis); ~0 when saturated.
inline double closure_defect(const LieBasis& basis) {
  std::vector<Vector> vecs;
  for (const auto& b : basis.basis) vecs.push_back(vectorize(b));
  double worst = 0.0;
  for (std::size_t i = 0; i < vecs.size(); ++i) {
    for (std::size_t j = i + 1; j < vecs.size(); ++j) {
      Vector c = vectorize(bracket(basis.basis[i], basis.basis[j]));
      for (int pass = 0; pass < 2; ++pass)
        for (const auto& b : vecs) c -= b.dot(c) * b;
      worst = std::max(worst, c.norm());
    }
  }
  return worst;
}

}  // namespace larc
