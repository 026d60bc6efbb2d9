#include <gtest/gtest.h>

#include <cmath>

#include "naesat/errors.hpp"
#include "naesat/influence.hpp"

using namespace naesat;

namespace {

Formula triangle() {
  return Formula(3, 3, {Clause{0, {{0, false}, {1, true}, {2, false}}, Sign::neutral}});
}

// Transitive closure of "within `hops` and decided later" by all-pairs BFS
// distances and Warshall.
std::vector<std::vector<bool>> closure_oracle(const Formula& phi, const Ordering& z,
                                              std::size_t hops) {
  const std::size_t n = phi.num_vars();
  constexpr std::size_t kInf = 1 << 20;
  std::vector<std::vector<std::size_t>> dist(n, std::vector<std::size_t>(n, kInf));
  for (std::size_t v = 0; v < n; ++v) dist[v][v] = 0;
  for (const Clause& c : phi.clauses())
    for (const Literal& a : c.literals)
      for (const Literal& b : c.literals)
        if (a.var != b.var) dist[a.var][b.var] = std::min<std::size_t>(dist[a.var][b.var], 1);
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        dist[i][j] = std::min(dist[i][j], dist[i][k] + dist[k][j]);
  std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
  for (std::size_t i = 0; i < n; ++i) {
    reach[i][i] = true;
    for (std::size_t j = 0; j < n; ++j)
      if (dist[i][j] <= hops && z.rank(static_cast<Var>(i)) < z.rank(static_cast<Var>(j)))
        reach[i][j] = true;
  }
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      if (reach[i][k])
        for (std::size_t j = 0; j < n; ++j)
          if (reach[k][j]) reach[i][j] = true;
  return reach;
}

}  // namespace

TEST(InfluenceRange, NoClausesIsSingleton) {
  const Formula phi(5, 3);
  Rng rng(1);
  const Ordering z = draw_ordering(5, rng);
  for (Var x = 0; x < 5; ++x) {
    const InfluenceSet s = influence_range(phi, z, 2, x);
    EXPECT_EQ(s.members, std::vector<Var>{x});
  }
}

TEST(InfluenceRange, TriangleFollowsOrder) {
  const Formula phi = triangle();
  const Ordering z({0.9, 0.5, 0.1});
  EXPECT_EQ(influence_range(phi, z, 2, 0).size(), 3U);
  EXPECT_EQ(influence_range(phi, z, 2, 1).size(), 2U);
  EXPECT_EQ(influence_range(phi, z, 2, 2).size(), 1U);
  const InfluenceStats stats = max_influence_stats(phi, z, 2);
  EXPECT_EQ(stats.max_size, 3U);
  EXPECT_EQ(stats.argmax, 0U);
  EXPECT_EQ(histogram_csv(stats), "size,count\n1,1\n2,1\n3,1\n");
}

TEST(InfluenceRange, MatchesClosureOracle) {
  Rng rng(2);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = 5 + rng.below(36);
    const Formula phi = generate(n, 3, 0.2 + rng.uniform01(), rng);
    const Ordering z = draw_ordering(n, rng);
    const std::size_t hops = 1 + rng.below(4);
    const auto reach = closure_oracle(phi, z, hops);
    const VariableGraph g(phi);
    for (Var x = 0; x < n; ++x) {
      const InfluenceSet s = influence_range(g, z, hops, x);
      ASSERT_TRUE(s.contains(x));
      for (Var y = 0; y < n; ++y) ASSERT_EQ(s.contains(y), reach[x][y]) << x << "->" << y;
    }
  }
}

TEST(InfluenceRange, ClosedUnderMembership) {
  Rng rng(3);
  const Formula phi = generate(300, 3, 1.0, rng);
  const Ordering z = draw_ordering(300, rng);
  const VariableGraph g(phi);
  for (Var x = 0; x < 300; x += 7) {
    const InfluenceSet s = influence_range(g, z, 2, x);
    for (Var y : s.members) {
      const InfluenceSet t = influence_range(g, z, 2, y);
      for (Var w : t.members) ASSERT_TRUE(s.contains(w));
    }
  }
}

TEST(InfluenceRange, Errors) {
  const Formula phi = triangle();
  const Ordering z({0.9, 0.5, 0.1});
  EXPECT_THROW(influence_range(phi, z, 0, 0), InvalidParameters);
  EXPECT_THROW(influence_range(phi, Ordering({0.1, 0.2}), 2, 0), InvalidParameters);
}

TEST(DiffSet, ContainedInInfluenceRange) {
  Rng rng(4);
  const auto rule = unit_clause_rule();
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 200;
    const Formula phi = generate(n, 3, 1.0, rng);
    const Ordering z = draw_ordering(n, rng);
    const Seeds u = draw_seeds(n, rng);
    const Var x = static_cast<Var>(rng.below(n));
    Seeds u2 = u;
    u2[x].u = 1.0 - u[x].u;
    const std::vector<Var> diff = diff_set(phi, z, u, u2, *rule);
    const InfluenceSet ir = influence_range(phi, z, static_cast<std::size_t>(rule->radius()), x);
    for (Var v : diff) ASSERT_TRUE(ir.contains(v)) << v;
  }
}

TEST(DiffSet, EqualSeedsAndErrors) {
  const Formula phi = triangle();
  const Ordering z({0.9, 0.5, 0.1});
  Rng rng(5);
  const Seeds u = draw_seeds(3, rng);
  const auto rule = unit_clause_rule();
  EXPECT_TRUE(diff_set(phi, z, u, u, *rule).empty());
  Seeds two = u;
  two[0].u = 1.0 - two[0].u;
  two[1].aux ^= 1;
  EXPECT_THROW(diff_set(phi, z, u, two, *rule), InvalidParameters);
  EXPECT_THROW(diff_set(phi, z, u, Seeds(2), *rule), InvalidParameters);
}

TEST(BallGrowth, RadiusZeroIsRoot) {
  Rng rng(6);
  const Formula phi = generate(100, 3, 2.0, rng);
  const auto rows = ball_growth(phi, 2, {0, 1, 2, 3});
  ASSERT_EQ(rows.size(), 3U);
  EXPECT_EQ(rows[0].mean, 1.0);
  EXPECT_EQ(rows[0].min, 1U);
  EXPECT_EQ(rows[0].max, 1U);
  EXPECT_LE(rows[1].mean, rows[2].mean);
  EXPECT_EQ(ball_growth_csv(rows).rfind("t,mean,min,max\n0,1,1,1\n", 0), 0U);
}

TEST(BallGrowth, FirstShellMatchesMeanDegree) {
  Rng rng(7);
  const std::size_t n = 10000;
  const Formula phi = generate(n, 3, 2.0, rng);
  std::vector<Var> roots(n);
  for (Var v = 0; v < n; ++v) roots[v] = v;
  const auto rows = ball_growth(phi, 1, roots);
  // dK(K-1) = 12 neighbors, plus the root.
  EXPECT_NEAR(rows[1].mean - 1.0, 12.0, 1.2);
}
