#include <gtest/gtest.h>

#include <cmath>
#include <map>

#include "naesat/errors.hpp"
#include "naesat/sp.hpp"

using namespace naesat;

namespace {

Neighborhood rooted(Formula f) {
  Neighborhood b;
  b.instance = std::move(f);
  b.radius = 2;
  b.to_parent.resize(b.instance.num_vars());
  return b;
}

Neighborhood random_neighborhood(Rng& rng, int radius) {
  return sample_reduced_neighborhood(60, 3, 1.0 + 1.5 * rng.uniform01(), radius,
                                     0.7 * rng.uniform01(), rng);
}

// Straight-line evaluation of one round, keyed by (clause, position).
struct Key {
  std::size_t c, i;
  bool operator<(const Key& o) const { return c != o.c ? c < o.c : i < o.i; }
};
struct RefState {
  std::map<Key, std::array<double, 3>> vc;
  std::map<Key, std::array<double, 2>> cv;
};

RefState ref_from(const SpState& s, const Formula& f) {
  RefState r;
  std::size_t e = 0;
  for (std::size_t c = 0; c < f.num_clauses(); ++c)
    for (std::size_t i = 0; i < f.clause(c).width(); ++i, ++e) {
      r.vc[{c, i}] = s.to_clause[e];
      r.cv[{c, i}] = s.to_var[e];
    }
  return r;
}

RefState ref_round(const RefState& in, const Formula& f) {
  RefState out;
  for (std::size_t c = 0; c < f.num_clauses(); ++c) {
    const Clause& cl = f.clause(c);
    for (std::size_t i = 0; i < cl.width(); ++i) {
      double pu = 1, ps = 1;
      for (std::size_t j = 0; j < cl.width(); ++j)
        if (j != i) {
          pu *= in.vc.at({c, j})[1];
          ps *= in.vc.at({c, j})[0];
        }
      double s = pu, u = ps;
      if (cl.sign == Sign::plus) s = 0;
      if (cl.sign == Sign::minus) u = 0;
      out.cv[{c, i}] = {s, u};
    }
  }
  for (std::size_t c = 0; c < f.num_clauses(); ++c) {
    const Clause& cl = f.clause(c);
    for (std::size_t i = 0; i < cl.width(); ++i) {
      const Var x = cl.literals[i].var;
      const bool neg = cl.literals[i].negated;
      double a = 1, b = 1, star_u = 1, star_s = 1, a2 = 1, b2 = 1, rstar = 1;
      for (std::size_t d = 0; d < f.num_clauses(); ++d)
        for (std::size_t j = 0; j < f.clause(d).width(); ++j) {
          if (d == c || f.clause(d).literals[j].var != x) continue;
          const auto q = in.cv.at({d, j});
          const double qstar = q[0] + q[1];
          if (f.clause(d).literals[j].negated == neg) {  // S_{x,C}
            b *= 1 - q[1];
            b2 *= 1 - q[0];
            star_s *= 1 - qstar;
          } else {  // U_{x,C}
            a *= 1 - q[0];
            a2 *= 1 - q[1];
            star_u *= 1 - qstar;
          }
          rstar *= 1 - q[0] - q[1];
        }
      std::array<double, 3> r{std::max(0.0, a * b - star_u * star_s),
                              std::max(0.0, a2 * b2 - star_u * star_s), rstar};
      const double sum = r[0] + r[1] + r[2];
      if (sum > 0)
        for (double& v : r) v /= sum;
      else
        r = {0, 0, 1};
      out.vc[{c, i}] = r;
    }
  }
  return out;
}

WFields ref_field(const RefState& s, const Formula& f, Var x) {
  double w1a = 1, w1b = 1, w0a = 1, w0b = 1, star = 1;
  for (std::size_t d = 0; d < f.num_clauses(); ++d)
    for (std::size_t j = 0; j < f.clause(d).width(); ++j) {
      if (f.clause(d).literals[j].var != x) continue;
      const auto q = s.cv.at({d, j});
      if (f.clause(d).literals[j].negated) {  // U_x
        w1a *= 1 - q[0];
        w0b *= 1 - q[1];
      } else {  // S_x
        w1b *= 1 - q[1];
        w0a *= 1 - q[0];
      }
      star *= 1 - (q[0] + q[1]);
    }
  WFields w{std::max(0.0, w1a * w1b - star), std::max(0.0, w0a * w0b - star), star};
  const double sum = w.w1 + w.w0 + w.wstar;
  if (!(sum > 0)) return {0, 0, 1};
  return {w.w1 / sum, w.w0 / sum, w.wstar / sum};
}

void expect_state_near(const RefState& ref, const SpState& s, const Formula& f, double tol) {
  const RefState got = ref_from(s, f);
  for (const auto& [k, v] : ref.vc)
    for (int r = 0; r < 3; ++r) ASSERT_NEAR(got.vc.at(k)[r], v[r], tol);
  for (const auto& [k, v] : ref.cv)
    for (int r = 0; r < 2; ++r) ASSERT_NEAR(got.cv.at(k)[r], v[r], tol);
}

}  // namespace

TEST(SpInit, NormalizesDraws) {
  const Formula f(3, 3, {Clause{0, {{0, false}, {1, false}, {2, false}}, Sign::neutral}});
  SpInit init;
  init.edges.assign(3, SpEdgeDraw{0.2, 0.2, 0.6, 0.3, 0.1});
  const SpState s = sp_init(f, init);
  for (std::size_t e = 0; e < 3; ++e) {
    EXPECT_DOUBLE_EQ(s.to_clause[e][kS], 0.2);
    EXPECT_DOUBLE_EQ(s.to_clause[e][kU], 0.2);
    EXPECT_DOUBLE_EQ(s.to_clause[e][kStar], 0.6);
    EXPECT_DOUBLE_EQ(s.to_var[e][kS], 0.75);
    EXPECT_DOUBLE_EQ(s.to_var[e][kU], 0.25);
  }
  EXPECT_EQ(s.iteration, 0);
}

TEST(SpInit, ZeroSumsAndMissingEdges) {
  const Formula f(3, 3, {Clause{0, {{0, false}, {1, false}, {2, false}}, Sign::neutral}});
  SpInit init;
  init.edges.assign(3, SpEdgeDraw{0, 0, 0, 0, 0});
  const SpState s = sp_init(f, init);
  EXPECT_EQ(s.to_clause[0], (std::array<double, 3>{0, 0, 1}));
  EXPECT_EQ(s.to_var[0], (std::array<double, 2>{0.5, 0.5}));
  init.edges.pop_back();
  EXPECT_THROW(sp_init(f, init), InvalidInit);
  init.edges.push_back({2.0, 0, 0, 0, 0});
  EXPECT_THROW(sp_init(f, init), InvalidInit);
}

TEST(SpInit, SwapIsInvolutionKeepingStars) {
  Rng rng(1);
  const SpInit init = draw_sp_init(20, rng);
  const SpInit swapped = swap_init(init);
  EXPECT_EQ(swap_init(swapped), init);
  for (std::size_t e = 0; e < 20; ++e) {
    EXPECT_EQ(swapped.edges[e].var_star, init.edges[e].var_star);
    EXPECT_EQ(swapped.edges[e].var_s, init.edges[e].var_u);
    EXPECT_EQ(swapped.edges[e].clause_u, init.edges[e].clause_s);
  }
}

TEST(SpIterate, UnsignedAllZeroUGivesZeroS) {
  const Formula f(3, 3, {Clause{0, {{0, false}, {1, false}, {2, false}}, Sign::neutral}});
  SpInit init;
  init.edges.assign(3, SpEdgeDraw{0.5, 0.0, 0.5, 0.5, 0.5});
  const SpState s = sp_iterate(sp_init(f, init), f);
  for (std::size_t e = 0; e < 3; ++e) EXPECT_EQ(s.to_var[e][kS], 0.0);
}

TEST(SpIterate, SingleClauseVariableIsStar) {
  const Formula f(3, 3, {Clause{0, {{0, false}, {1, false}, {2, false}}, Sign::neutral}});
  Rng rng(2);
  const SpState s = sp_iterate(sp_init(f, draw_sp_init(3, rng)), f);
  for (std::size_t e = 0; e < 3; ++e)
    EXPECT_EQ(s.to_clause[e], (std::array<double, 3>{0, 0, 1}));
}

TEST(SpIterate, MatchesStraightLineEvaluator) {
  Rng rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const Neighborhood b = random_neighborhood(rng, 4);
    const Formula& f = b.instance;
    SpState s = sp_init(f, draw_sp_init(SpEdges(f).size(), rng));
    RefState ref = ref_from(s, f);
    for (int t = 1; t <= 3; ++t) {
      s = sp_iterate(s, f);
      ref = ref_round(ref, f);
      ASSERT_EQ(s.iteration, t);
      expect_state_near(ref, s, f, 1e-12);
    }
    for (Var x = 0; x < f.num_vars(); ++x) {
      const WFields got = sp_field(s, f, x);
      const WFields want = ref_field(ref, f, x);
      ASSERT_NEAR(got.w1, want.w1, 1e-12);
      ASSERT_NEAR(got.w0, want.w0, 1e-12);
      ASSERT_NEAR(got.wstar, want.wstar, 1e-12);
    }
  }
}

TEST(SpIterate, RangeAndNormalization) {
  Rng rng(4);
  for (int trial = 0; trial < 100; ++trial) {
    const Neighborhood b = random_neighborhood(rng, 6);
    const Formula& f = b.instance;
    SpState s = sp_init(f, draw_sp_init(SpEdges(f).size(), rng));
    for (const auto& q : s.to_var) ASSERT_NEAR(q[kS] + q[kU], 1.0, 1e-9);
    for (int t = 0; t < 4; ++t) {
      for (const auto& q : s.to_clause) {
        for (double v : q) ASSERT_TRUE(v >= 0 && v <= 1);
        ASSERT_NEAR(q[kS] + q[kU] + q[kStar], 1.0, 1e-9);
      }
      for (const auto& q : s.to_var)
        for (double v : q) ASSERT_TRUE(v >= 0 && v <= 1);
      for (const WFields& w : sp_fields(s, f)) {
        ASSERT_GE(w.w1, 0);
        ASSERT_GE(w.w0, 0);
        ASSERT_GE(w.wstar, 0);
        ASSERT_NEAR(w.w1 + w.w0 + w.wstar, 1.0, 1e-9);
      }
      s = sp_iterate(s, f);
    }
  }
}

TEST(SpFields, IsolatedRootIsStar) {
  const Neighborhood b = rooted(Formula(1, 3));
  const SpState s = sp_init(b.instance, SpInit{});
  const WFields w = sp_field(s, b.instance, 0);
  EXPECT_EQ(w.w1, 0);
  EXPECT_EQ(w.w0, 0);
  EXPECT_EQ(w.wstar, 1);
}

TEST(SpCoupling, MirrorIsExactAtEveryIteration) {
  Rng rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const Neighborhood b = random_neighborhood(rng, 6);
    const Neighborhood bar = complement(b);
    const SpInit init = draw_sp_init(SpEdges(b.instance).size(), rng);
    SpState s = sp_init(b.instance, init);
    SpState p = sp_init(bar.instance, swap_init(init));
    for (int t = 0; t <= 3; ++t) {
      ASSERT_EQ(p, mirror(s));
      const WFields w = sp_field(s, b.instance, 0);
      const WFields z = sp_field(p, bar.instance, 0);
      ASSERT_EQ(z.w0, w.w1);
      ASSERT_EQ(z.w1, w.w0);
      ASSERT_EQ(z.wstar, w.wstar);
      s = sp_iterate(s, b.instance);
      p = sp_iterate(p, bar.instance);
    }
  }
}

TEST(SpRule, CoupledStreamsGiveOppositeBits) {
  Rng rng(6);
  for (int rounds = 1; rounds <= 3; ++rounds) {
    const SpRule rule(rounds, SpRule::Kind::sample);
    for (int i = 0; i < 100; ++i) {
      const Neighborhood b = random_neighborhood(rng, 2 * rounds);
      const std::uint64_t seed = rng.next();
      AuxStream plain(seed, false);
      AuxStream mirrored(seed, true);
      const double bit = rule.evaluate(b, plain);
      ASSERT_TRUE(bit == 0.0 || bit == 1.0);
      ASSERT_EQ(rule.evaluate(complement(b), mirrored), 1.0 - bit);
    }
  }
}

TEST(SpRule, TieUsesCoinAndStaysBalanced) {
  // Isolated root: every init ties at (0, 0, 1).
  const SpRule rule(1, SpRule::Kind::sample);
  const Neighborhood b = rooted(Formula(1, 3));
  int ones = 0;
  for (std::uint64_t seed = 0; seed < 2000; ++seed) {
    AuxStream plain(seed, false);
    AuxStream mirrored(seed, true);
    const double bit = rule.evaluate(b, plain);
    ASSERT_EQ(rule.evaluate(b, mirrored), 1.0 - bit);
    ones += static_cast<int>(bit);
  }
  EXPECT_NEAR(ones, 1000, 4 * std::sqrt(500.0));
}

TEST(SpRule, EstimateOnFreshNeighborhoodIsHalf) {
  Rng rng(7);
  const Formula phi = generate(100, 3, 2.0, rng);
  const Neighborhood b = neighborhood(phi, 3, 2);
  const std::size_t s = 10000;
  const SpRule rule(1, SpRule::Kind::estimate, s);
  AuxStream aux(rng.next(), false);
  const double tau = rule.evaluate(b, aux);
  EXPECT_LT(std::abs(tau - 0.5), 4 * std::sqrt(0.25 / s));
}

TEST(SpRule, HandBuiltTwoClauseDecision) {
  // Root in a neutral clause and a minus-signed pair.
  const Formula f(4, 3,
                  {Clause{0, {{0, false}, {1, false}, {2, true}}, Sign::neutral},
                   Clause{1, {{0, true}, {3, false}}, Sign::minus}},
                  Origin::reduced);
  const Neighborhood b = rooted(f);
  SpInit init;
  init.edges = {{0.9, 0.1, 0.3, 0.6, 0.2}, {0.2, 0.7, 0.4, 0.5, 0.5}, {0.1, 0.8, 0.2, 0.3, 0.9},
                {0.5, 0.4, 0.6, 0.9, 0.1}, {0.3, 0.3, 0.3, 0.8, 0.4}};
  RefState ref = ref_round(ref_from(sp_init(f, init), f), f);
  const WFields want = ref_field(ref, f, 0);
  const WFields got = sp_root_field(b, init, 1);
  EXPECT_NEAR(got.w1, want.w1, 1e-15);
  EXPECT_NEAR(got.w0, want.w0, 1e-15);
  ASSERT_NE(want.w1, want.w0);
}

TEST(SpTrajectory, JsonHasOneStatePerIteration) {
  Rng rng(8);
  const Neighborhood b = random_neighborhood(rng, 4);
  const SpInit init = draw_sp_init(SpEdges(b.instance).size(), rng);
  const std::string j = sp_trajectory_json(b, init, 2);
  EXPECT_NE(j.find("\"t\":2"), std::string::npos);
  EXPECT_EQ(j, sp_trajectory_json(b, init, 2));
}

TEST(SpRule, RejectsZeroRounds) {
  EXPECT_THROW(SpRule(0, SpRule::Kind::sample), InvalidParameters);
  EXPECT_THROW(SpRule(1, SpRule::Kind::estimate, 0), InvalidParameters);
}
