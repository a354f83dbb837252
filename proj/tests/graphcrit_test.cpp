#include "larc/graphcrit.hpp"

#include <algorithm>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "larc/rankcond.hpp"
#include "oracles.hpp"

namespace larc {
namespace {

TEST(Omega, Entries) {
  const Matrix m = omega(4, 2, 3);
  EXPECT_EQ(m, testing::chain_b1());
  // the Bloch Omega_z has +1 at (2,1)
  EXPECT_EQ(omega(3, 2, 1), testing::omega_z());
  EXPECT_EQ(omega(5, 1, 4) + omega(5, 4, 1), Matrix::Zero(5, 5));
  EXPECT_THROW(omega(3, 2, 2), InputError);
  EXPECT_THROW(omega(3, 0, 2), InputError);
  EXPECT_THROW(omega(3, 1, 4), InputError);
}

TEST(IsConnected, Examples) {
  EXPECT_FALSE(is_connected(EdgeSpec(4, {{2, 3}, {3, 4}})));
  EXPECT_TRUE(is_connected(EdgeSpec(3, {{1, 3}, {1, 2}})));
  EXPECT_TRUE(is_connected(EdgeSpec(1, {})));
  EXPECT_TRUE(is_connected(EdgeSpec(2, {{1, 2}})));
}

TEST(EdgeSpec, NormalizesAndDeduplicates) {
  const EdgeSpec spec(4, {{3, 2}, {2, 3}, {4, 1}});
  ASSERT_EQ(spec.edges().size(), 2u);
  EXPECT_EQ(spec.edges()[0], std::make_pair(2, 3));
  EXPECT_EQ(spec.edges()[1], std::make_pair(1, 4));
  EXPECT_THROW(EdgeSpec(3, {{1, 1}}), InputError);
  EXPECT_THROW(EdgeSpec(3, {{1, 4}}), InputError);
}

TEST(Components, Example2) {
  const auto c = components(EdgeSpec(4, {{2, 3}, {3, 4}}));
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c[0], std::vector<int>{1});
  EXPECT_EQ(c[1], (std::vector<int>{2, 3, 4}));
}

TEST(FixedPoints, IsolatedVertices) {
  auto fp = fixed_points(EdgeSpec(4, {{2, 3}, {3, 4}}));
  ASSERT_EQ(fp.size(), 1u);
  EXPECT_EQ(fp[0].coords(), unit_vector(4, 1));

  EXPECT_TRUE(fixed_points(EdgeSpec(3, {{1, 2}, {1, 3}, {2, 3}})).empty());

  fp = fixed_points(EdgeSpec(5, {{1, 2}}));
  ASSERT_EQ(fp.size(), 3u);
  for (int k = 0; k < 3; ++k) EXPECT_EQ(fp[k].coords(), unit_vector(5, k + 3));
}

TEST(FixedPoints, RankVanishes) {
  std::mt19937_64 rng(21);
  std::bernoulli_distribution keep(0.3);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 3 + trial % 4;
    std::vector<std::pair<int, int>> edges;
    for (int i = 1; i <= n; ++i)
      for (int j = i + 1; j <= n; ++j)
        if (keep(rng)) edges.emplace_back(i, j);
    const EdgeSpec spec(n, edges);
    const auto basis = lie_closure(edge_generators(spec));
    for (const auto& p : fixed_points(spec)) EXPECT_EQ(rank_at(basis, p), 0);
  }
}

TEST(IsConnected, MatchesBfsAndIsRelabelingInvariant) {
  std::mt19937_64 rng(22);
  std::bernoulli_distribution keep(0.35);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + trial % 7;
    std::vector<std::pair<int, int>> edges;
    for (int i = 1; i <= n; ++i)
      for (int j = i + 1; j <= n; ++j)
        if (keep(rng)) edges.emplace_back(i, j);
    const bool connected = is_connected(EdgeSpec(n, edges));
    EXPECT_EQ(connected, oracle::connected(n, edges));

    std::vector<int> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 1);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<std::pair<int, int>> relabeled;
    for (auto [i, j] : edges) relabeled.emplace_back(perm[i - 1], perm[j - 1]);
    EXPECT_EQ(is_connected(EdgeSpec(n, relabeled)), connected);
  }
}

TEST(EdgeGenerators, DriftEdgeAndEmptyGraph) {
  const auto gens = edge_generators(EdgeSpec(3, {{1, 2}}), std::make_pair(2, 3));
  ASSERT_TRUE(gens.has_drift());
  EXPECT_EQ(*gens.drift(), omega(3, 2, 3));
  const auto empty = edge_generators(EdgeSpec(3, {}));
  EXPECT_EQ(lie_closure(empty).dim(), 0);
}

TEST(StandardEdge, Detection) {
  EXPECT_EQ(standard_edge(omega(4, 3, 1)), std::make_pair(1, 3));
  EXPECT_EQ(standard_edge(2.5 * omega(4, 2, 4)), std::make_pair(2, 4));
  EXPECT_FALSE(standard_edge(omega(4, 1, 2) + omega(4, 3, 4)));
  EXPECT_FALSE(standard_edge(Matrix::Zero(3, 3)));
}

TEST(CrossValidation, AllSubgraphsOfK4) {
  std::vector<std::pair<int, int>> k4;
  for (int i = 1; i <= 4; ++i)
    for (int j = i + 1; j <= 4; ++j) k4.emplace_back(i, j);
  for (unsigned mask = 0; mask < 64; ++mask) {
    std::vector<std::pair<int, int>> edges;
    for (unsigned b = 0; b < 6; ++b)
      if (mask & (1u << b)) edges.push_back(k4[b]);
    const EdgeSpec spec(4, edges);
    AnalyzeOptions opt;
    opt.seed = mask;
    const bool rank_says = analyze(edge_generators(spec), opt).verdict == Verdict::controllable;
    EXPECT_EQ(is_connected(spec), rank_says) << "mask " << mask;
  }
}

}  // namespace
}  // namespace larc
