#pragma once

// se(n) support. An element (A, mu), A skew, acts on R^n by x -> A x + mu and
// is embedded as the homogeneous matrix [[A, mu], [0, 0]], so brackets and
// closures reuse the matrix machinery unchanged.

#include <optional>
#include <vector>

#include "larc/algebra.hpp"
#include "larc/rankcond.hpp"
#include "larc/state.hpp"

namespace larc {

struct AffineGenerator {
  Matrix rotation;
  Vector translation;

  AffineGenerator(Matrix rotation_, Vector translation_)
      : rotation(std::move(rotation_)), translation(std::move(translation_)) {
    if (rotation.rows() != rotation.cols() || rotation.rows() != translation.size()) {
      throw InputError("affine generator: rotation must be n x n with an n-vector translation");
    }
    if (!rotation.allFinite() || !translation.allFinite()) throw InputError("affine generator: non-finite entry");
    if (!is_skew(rotation)) throw InputError("affine generator: rotation block not skew-symmetric");
  }

  int n() const { return static_cast<int>(translation.size()); }

  static AffineGenerator pure_rotation(Matrix a) {
    const auto n = a.rows();
    return {std::move(a), Vector::Zero(n)};
  }
  static AffineGenerator pure_translation(Vector mu) {
    const auto n = mu.size();
    return {Matrix::Zero(n, n), std::move(mu)};
  }
};

inline Matrix embed(const AffineGenerator& g) {
  const int n = g.n();
  Matrix m = Matrix::Zero(n + 1, n + 1);
  m.topLeftCorner(n, n) = g.rotation;
  m.topRightCorner(n, 1) = g.translation;
  return m;
}

/// Inverse of embed for homogeneous algebra elements.
inline AffineGenerator decode(const Matrix& m) {
  if (m.rows() != m.cols() || m.rows() < 2) throw InputError("decode: expected (n+1)x(n+1) matrix");
  const auto n = m.rows() - 1;
  return {m.topLeftCorner(n, n), m.topRightCorner(n, 1)};
}

inline Vector affine_eval(const AffineGenerator& g, const StatePoint& x) {
  if (x.n() != g.n()) throw InputError("affine_eval: point dimension mismatch");
  return g.rotation * x.coords() + g.translation;
}

inline GeneratorSet make_affine_set(int n, const std::optional<AffineGenerator>& drift,
                                    const std::vector<AffineGenerator>& controls, GroupAssertions assertions = {}) {
  std::optional<Matrix> d;
  if (drift) {
    if (drift->n() != n) throw InputError("drift: dimension mismatch");
    d = embed(*drift);
  }
  std::vector<Matrix> c;
  for (const auto& g : controls) {
    if (g.n() != n) throw InputError("controls: dimension mismatch");
    c.push_back(embed(g));
  }
  return GeneratorSet(GeneratorKind::affine, n, std::move(d), std::move(c), assertions);
}

/// dim span{A_k x + mu_k} over a closure computed in embedded coordinates.
inline int rank_at_affine(const LieBasis& basis, const StatePoint& x, const TolerancePolicy& policy = {}) {
  if (basis.kind != GeneratorKind::affine) throw InputError("rank_at_affine: basis is not an se(n) closure");
  return rank_at(basis, x, policy);
}

/// Homogeneous matrix [[R, t], [0, 1]] of the rigid motion x -> R x + t.
inline Matrix rigid_motion(const Matrix& rotation, const Vector& translation) {
  const auto n = translation.size();
  Matrix g = Matrix::Identity(n + 1, n + 1);
  g.topLeftCorner(n, n) = rotation;
  g.topRightCorner(n, 1) = translation;
  return g;
}

}  // namespace larc
