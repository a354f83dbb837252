#pragma once

// Graph criterion for systems generated by standard-basis elements
// Omega_ij = E_ij - E_ji of so(n): the induced system on S^{n-1} is
// controllable iff the graph with one edge (i, j) per generator is connected.

#include <algorithm>
#include <numeric>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "larc/algebra.hpp"
#include "larc/state.hpp"

namespace larc {

/// Omega_ij = E_ij - E_ji (1-indexed): +1 at (i, j), -1 at (j, i).
inline Matrix omega(int n, int i, int j) {
  if (i == j) throw InputError("omega: indices must differ");
  if (i < 1 || j < 1 || i > n || j > n) throw InputError("omega: index out of range 1.." + std::to_string(n));
  Matrix m = Matrix::Zero(n, n);
  m(i - 1, j - 1) = 1.0;
  m(j - 1, i - 1) = -1.0;
  return m;
}

/// Graph on vertices 1..n; edges are normalized to i < j and deduplicated.
class EdgeSpec {
 public:
  EdgeSpec(int n, const std::vector<std::pair<int, int>>& edges) : n_(n) {
    if (n < 1) throw InputError("edge spec: vertex count must be >= 1");
    std::set<std::pair<int, int>> seen;
    for (auto [i, j] : edges) {
      if (i == j) throw InputError("edge spec: self-loop (" + std::to_string(i) + ", " + std::to_string(j) + ")");
      if (i < 1 || j < 1 || i > n || j > n) {
        throw InputError("edge spec: edge (" + std::to_string(i) + ", " + std::to_string(j) +
                         ") out of range 1.." + std::to_string(n));
      }
      if (i > j) std::swap(i, j);
      if (seen.insert({i, j}).second) edges_.emplace_back(i, j);
    }
  }

  int n() const { return n_; }
  const std::vector<std::pair<int, int>>& edges() const { return edges_; }

 private:
  int n_;
  std::vector<std::pair<int, int>> edges_;
};

namespace detail {

class UnionFind {
 public:
  explicit UnionFind(int n) : parent_(static_cast<std::size_t>(n)) { std::iota(parent_.begin(), parent_.end(), 0); }

  int find(int v) {
    while (parent_[v] != v) {
      parent_[v] = parent_[parent_[v]];
      v = parent_[v];
    }
    return v;
  }

  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<int> parent_;
};

}  // namespace detail

/// Connected components as sorted lists of 1-indexed vertices, ordered by smallest vertex.
inline std::vector<std::vector<int>> components(const EdgeSpec& spec) {
  detail::UnionFind uf(spec.n());
  for (auto [i, j] : spec.edges()) uf.unite(i - 1, j - 1);
  std::vector<std::vector<int>> by_root(static_cast<std::size_t>(spec.n()));
  for (int v = 0; v < spec.n(); ++v) by_root[uf.find(v)].push_back(v + 1);
  std::vector<std::vector<int>> out;
  for (auto& c : by_root)
    if (!c.empty()) out.push_back(std::move(c));
  return out;
}

inline bool is_connected(const EdgeSpec& spec) { return components(spec).size() == 1; }

/// e_k for every isolated vertex v_k; these are fixed by every generated rotation.
inline std::vector<StatePoint> fixed_points(const EdgeSpec& spec) {
  std::vector<bool> touched(static_cast<std::size_t>(spec.n()), false);
  for (auto [i, j] : spec.edges()) touched[i - 1] = touched[j - 1] = true;
  std::vector<StatePoint> out;
  for (int k = 1; k <= spec.n(); ++k)
    if (!touched[k - 1]) out.push_back(StatePoint::on_sphere(unit_vector(spec.n(), k)));
  return out;
}

/// Skew generator set with one Omega per edge. An edge-free graph yields a
/// single zero control so the set stays non-empty (the generated algebra is {0}
/// either way).
inline GeneratorSet edge_generators(const EdgeSpec& spec, std::optional<std::pair<int, int>> drift_edge = std::nullopt) {
  std::vector<Matrix> controls;
  for (auto [i, j] : spec.edges()) controls.push_back(omega(spec.n(), i, j));
  std::optional<Matrix> drift;
  if (drift_edge) drift = omega(spec.n(), drift_edge->first, drift_edge->second);
  if (controls.empty() && !drift) controls.push_back(Matrix::Zero(spec.n(), spec.n()));
  return GeneratorSet(GeneratorKind::skew, spec.n(), std::move(drift), std::move(controls));
}

/// If m = c * Omega_ij for some c != 0, returns (i, j) with i < j.
inline std::optional<std::pair<int, int>> standard_edge(const Matrix& m) {
  if (m.rows() != m.cols()) return std::nullopt;
  std::optional<std::pair<int, int>> found;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < m.cols(); ++j) {
      if (m(i, j) == 0.0 && m(j, i) == 0.0) continue;
      if (found || m(i, j) != -m(j, i)) return std::nullopt;
      found = std::pair<int, int>(static_cast<int>(i) + 1, static_cast<int>(j) + 1);
    }
    if (m(i, i) != 0.0) return std::nullopt;
  }
  return found;
}

}  // namespace larc
