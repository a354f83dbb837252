#pragma once

#include <cmath>
#include <string>

#include "larc/algebra.hpp"

namespace larc {

enum class Space { sphere, euclidean };

inline const char* to_string(Space s) { return s == Space::sphere ? "sphere" : "euclidean"; }

/// State space on which a generator kind acts.
inline Space space_for(GeneratorKind kind) {
  return kind == GeneratorKind::skew ? Space::sphere : Space::euclidean;
}

/// A point of S^{n-1} (unit norm, re-normalized on construction) or of R^n.
class StatePoint {
 public:
  StatePoint() = default;

  static StatePoint on_sphere(Vector coords) {
    if (!coords.allFinite()) throw InputError("state point: non-finite coordinate");
    const double r = coords.norm();
    if (r == 0.0) throw InputError("state point: the origin is excluded from the sphere state space");
    return StatePoint(Space::sphere, coords / r);
  }

  static StatePoint euclidean(Vector coords) {
    if (!coords.allFinite()) throw InputError("state point: non-finite coordinate");
    return StatePoint(Space::euclidean, std::move(coords));
  }

  /// Wraps coordinates produced by an exact flow without re-normalizing.
  static StatePoint raw(Space space, Vector coords) { return StatePoint(space, std::move(coords)); }

  static StatePoint for_kind(GeneratorKind kind, Vector coords) {
    return space_for(kind) == Space::sphere ? on_sphere(std::move(coords)) : euclidean(std::move(coords));
  }

  Space space() const { return space_; }
  int n() const { return static_cast<int>(coords_.size()); }
  const Vector& coords() const { return coords_; }

  bool operator==(const StatePoint& o) const { return space_ == o.space_ && coords_ == o.coords_; }

 private:
  StatePoint(Space space, Vector coords) : space_(space), coords_(std::move(coords)) {}

  Space space_ = Space::euclidean;
  Vector coords_;
};

/// Standard basis vector e_k (1-indexed).
inline Vector unit_vector(int n, int k) {
  Vector e = Vector::Zero(n);
  e(k - 1) = 1.0;
  return e;
}

/// Fundamental vector field of a working-algebra element at x:
/// B x for linear kinds, A x + mu for homogeneous affine elements.
inline Vector field_at(GeneratorKind kind, const Matrix& element, const Vector& x) {
  if (kind == GeneratorKind::affine) {
    const auto n = x.size();
    if (element.rows() != n + 1) throw InputError("field_at: affine element / point dimension mismatch");
    return element.topLeftCorner(n, n) * x + element.topRightCorner(n, 1);
  }
  if (element.cols() != x.size()) throw InputError("field_at: generator / point dimension mismatch");
  return element * x;
}

/// Action of a group element (working-matrix form) on a point.
inline Vector act(GeneratorKind kind, const Matrix& group_element, const Vector& x) {
  if (kind == GeneratorKind::affine) {
    const auto n = x.size();
    if (group_element.rows() != n + 1) throw InputError("act: affine element / point dimension mismatch");
    return group_element.topLeftCorner(n, n) * x + group_element.topRightCorner(n, 1);
  }
  if (group_element.cols() != x.size()) throw InputError("act: element / point dimension mismatch");
  return group_element * x;
}

}  // namespace larc
