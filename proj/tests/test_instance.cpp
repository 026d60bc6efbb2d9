#include <gtest/gtest.h>

#include <algorithm>
#include <deque>
#include <set>

#include "naesat/errors.hpp"
#include "naesat/instance.hpp"
#include "oracles.hpp"

using namespace naesat;

namespace {

Clause make_clause(std::initializer_list<int> lits, Sign sign = Sign::neutral, ClauseId id = 0) {
  Clause c;
  c.id = id;
  c.sign = sign;
  for (int l : lits) c.literals.push_back({static_cast<Var>(std::abs(l) - 1), l < 0});
  return c;
}

// Reference sampler written against the documented draw order.
std::vector<std::pair<std::vector<Var>, std::vector<bool>>> reference_clauses(std::size_t n,
                                                                             std::size_t k,
                                                                             std::size_t m,
                                                                             std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::pair<std::vector<Var>, std::vector<bool>>> out;
  for (std::size_t c = 0; c < m; ++c) {
    std::vector<Var> vars;
    while (vars.size() < k) {
      const auto v = static_cast<Var>(rng.below(n));
      if (std::find(vars.begin(), vars.end(), v) == vars.end()) vars.push_back(v);
    }
    std::vector<bool> neg;
    for (std::size_t i = 0; i < k; ++i) neg.push_back(rng.coin());
    out.emplace_back(vars, neg);
  }
  return out;
}

Assignment random_total(std::size_t n, Rng& rng) {
  std::vector<bool> bits(n);
  for (std::size_t i = 0; i < n; ++i) bits[i] = rng.coin();
  return Assignment::from_bits(bits);
}

}  // namespace

TEST(Generate, ClauseCount) {
  EXPECT_EQ(generate(10, 3, 0.0, 1).num_clauses(), 0U);
  EXPECT_EQ(generate(10, 3, 2.05, 1).num_clauses(), 20U);
  EXPECT_EQ(generate(10, 3, 0.3, 1).num_clauses(), 3U);
}

TEST(Generate, MatchesReferenceSampler) {
  const Formula phi = generate(6, 3, 5.0, 1234);
  const auto ref = reference_clauses(6, 3, 30, 1234);
  ASSERT_EQ(phi.num_clauses(), ref.size());
  for (std::size_t c = 0; c < ref.size(); ++c) {
    const Clause& cl = phi.clause(c);
    ASSERT_EQ(cl.sign, Sign::neutral);
    ASSERT_EQ(cl.width(), 3U);
    for (std::size_t i = 0; i < 3; ++i) {
      EXPECT_EQ(cl.literals[i].var, ref[c].first[i]);
      EXPECT_EQ(cl.literals[i].negated, ref[c].second[i]);
    }
  }
}

TEST(Generate, DeterministicAndValidated) {
  EXPECT_EQ(generate(50, 4, 3.0, 77), generate(50, 4, 3.0, 77));
  EXPECT_NE(generate(50, 4, 3.0, 77), generate(50, 4, 3.0, 78));
  EXPECT_THROW(generate(2, 3, 1.0, 1), InvalidParameters);
  EXPECT_THROW(generate(5, 3, -1.0, 1), InvalidParameters);
}

TEST(Formula, RejectsBrokenInvariants) {
  EXPECT_THROW(Formula(3, 3, {make_clause({1, 2})}), Error);                       // short neutral
  EXPECT_THROW(Formula(3, 3, {make_clause({1, 2, 3}, Sign::plus)}, Origin::reduced), Error);
  EXPECT_THROW(Formula(3, 3, {make_clause({1, 1, 2})}), Error);                    // repeated var
  EXPECT_THROW(Formula(3, 3, {make_clause({1, 2, 4})}), CorruptInstance);          // out of range
  EXPECT_THROW(Formula(3, 3, {make_clause({1, 2}, Sign::plus)}, Origin::fresh), Error);
}

TEST(EvaluateClause, Examples) {
  const Clause neutral = make_clause({1, 2, 3});
  EXPECT_EQ(evaluate_clause(neutral, Assignment::from_string("111")), ClauseStatus::violated);
  EXPECT_EQ(evaluate_clause(neutral, Assignment::from_string("1**")), ClauseStatus::undetermined);
  EXPECT_EQ(evaluate_clause(neutral, Assignment::from_string("10*")), ClauseStatus::satisfied);
  EXPECT_EQ(evaluate_clause(neutral, Assignment::from_string("00*")), ClauseStatus::undetermined);
  const Clause plus_neg = make_clause({-1}, Sign::plus);
  EXPECT_EQ(evaluate_clause(plus_neg, Assignment::from_string("1")), ClauseStatus::satisfied);
  EXPECT_EQ(evaluate_clause(plus_neg, Assignment::from_string("0")), ClauseStatus::violated);
  const Clause minus = make_clause({1, 2}, Sign::minus);
  EXPECT_EQ(evaluate_clause(minus, Assignment::from_string("0*")), ClauseStatus::undetermined);
  EXPECT_EQ(evaluate_clause(minus, Assignment::from_string("00")), ClauseStatus::violated);
  EXPECT_THROW(evaluate_clause(make_clause({1, 2, 5}), Assignment::from_string("111")),
               CorruptInstance);
}

TEST(Evaluate, EmptyFormulaAndPartialAssignments) {
  const Formula empty(4, 3);
  EXPECT_TRUE(evaluate(empty, Assignment::from_string("0101")).sat);
  EXPECT_THROW(evaluate(empty, Assignment::from_string("01*1")), InvalidParameters);
  EXPECT_THROW(evaluate(empty, Assignment::from_string("01")), InvalidParameters);
}

TEST(Evaluate, AgreesWithTruthTable) {
  Rng rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const Formula phi = generate(12, 3, 2.0, rng);
    const std::uint64_t mask = rng.below(1U << 12);
    const Evaluation e = evaluate(phi, oracle::to_assignment(mask, 12));
    ASSERT_EQ(e.sat, oracle::satisfies(phi, mask));
    std::vector<std::size_t> bad;
    for (std::size_t c = 0; c < phi.num_clauses(); ++c)
      if (!oracle::clause_ok(phi.clause(c), mask)) bad.push_back(c);
    ASSERT_EQ(e.violated, bad);
  }
}

TEST(Evaluate, ComplementSymmetry) {
  Rng rng(8);
  for (int trial = 0; trial < 300; ++trial) {
    const Formula phi = generate(15, 3, 2.0, rng);
    const Assignment s = random_total(15, rng);
    ASSERT_EQ(evaluate(phi, s).sat, evaluate(phi, s.complemented()).sat);
    ASSERT_EQ(evaluate(phi, s).violated, evaluate(phi, s.complemented()).violated);
  }
}

TEST(Reduce, SignRules) {
  const Formula phi(3, 3, {make_clause({1, 2, 3})});
  const Formula r = phi.reduce(2, true);
  ASSERT_EQ(r.num_clauses(), 1U);
  EXPECT_EQ(r.clause(0).sign, Sign::plus);
  EXPECT_EQ(r.clause(0).width(), 2U);
  EXPECT_EQ(r.origin(), Origin::reduced);

  const Formula r0 = phi.reduce(2, false);
  EXPECT_EQ(r0.clause(0).sign, Sign::minus);

  const Formula plus(2, 3, {make_clause({1, 2}, Sign::plus)}, Origin::reduced);
  const Formula sat = plus.reduce(0, false);
  EXPECT_EQ(sat.num_clauses(), 0U);
  EXPECT_EQ(sat.violations(), 0U);
  const Formula still = plus.reduce(0, true);
  ASSERT_EQ(still.num_clauses(), 1U);
  EXPECT_EQ(still.clause(0).sign, Sign::plus);

  const Formula minus_unit(1, 3, {make_clause({1}, Sign::minus)}, Origin::reduced);
  const Formula bad = minus_unit.reduce(0, false);
  EXPECT_EQ(bad.num_clauses(), 0U);
  EXPECT_EQ(bad.violations(), 1U);
  const Formula good = minus_unit.reduce(0, true);
  EXPECT_EQ(good.num_clauses(), 0U);
  EXPECT_EQ(good.violations(), 0U);
}

TEST(Reduce, NeutralNeedsBothValues) {
  // All K literals equal: the last removal violates the clause.
  Formula phi(3, 3, {make_clause({1, -2, 3})});
  phi = phi.reduce(0, true).reduce(1, false);
  ASSERT_EQ(phi.num_clauses(), 1U);
  EXPECT_EQ(phi.clause(0).sign, Sign::plus);
  EXPECT_EQ(phi.reduce(2, true).violations(), 1U);
  EXPECT_EQ(phi.reduce(2, false).violations(), 0U);
}

TEST(Reduce, ClauseIdsAreStable) {
  const Formula phi = generate(20, 3, 2.0, 3);
  const Formula r = phi.reduce(4, true).reduce(7, false);
  for (const Clause& c : r.clauses()) {
    const Clause& orig = phi.clause(c.id);
    for (const Literal& l : c.literals)
      EXPECT_NE(std::find(orig.literals.begin(), orig.literals.end(), l), orig.literals.end());
  }
}

TEST(Complement, InvolutionAndFreshFixedPoint) {
  const Formula phi = generate(20, 3, 2.0, 11);
  EXPECT_EQ(phi.complement(), phi);
  const Formula r = phi.reduce(3, true).reduce(5, false);
  EXPECT_EQ(r.complement().complement(), r);
  EXPECT_NE(r.complement(), r);
}

TEST(Complement, CommutesWithReduction) {
  Rng rng(12);
  for (int trial = 0; trial < 200; ++trial) {
    Formula phi = generate(12, 3, 2.5, rng);
    for (int s = 0; s < 4; ++s) phi = phi.reduce(static_cast<Var>(s * 3), rng.coin());
    const Var x = 1 + static_cast<Var>(rng.below(2));
    const bool v = rng.coin();
    ASSERT_EQ(phi.reduce(x, v).complement(), phi.complement().reduce(x, !v));
  }
}

TEST(Complement, SatisfiedByComplements) {
  Rng rng(13);
  for (int trial = 0; trial < 200; ++trial) {
    Formula phi = generate(10, 3, 2.0, rng);
    phi = phi.reduce(0, rng.coin()).reduce(1, rng.coin());
    const Formula bar = phi.complement();
    const std::uint64_t mask = rng.below(1U << 10);
    ASSERT_EQ(oracle::satisfies(phi, mask), oracle::satisfies(bar, mask ^ 0x3FFU));
  }
}

TEST(Reduce, WidthLawUnderRandomReductions) {
  Rng rng(14);
  for (int trial = 0; trial < 50; ++trial) {
    Formula phi = generate(30, 4, 3.0, rng);
    for (Var x = 0; x < 30; ++x) {
      phi = phi.reduce(x, rng.coin());
      for (const Clause& c : phi.clauses()) {
        ASSERT_GE(c.width(), 1U);
        ASSERT_EQ(c.sign == Sign::neutral, c.width() == 4U);
        for (const Literal& l : c.literals) ASSERT_GT(l.var, x);
      }
    }
    EXPECT_EQ(phi.num_clauses(), 0U);
  }
}

TEST(WorkingFormula, MatchesValueReductions) {
  Rng rng(15);
  for (int trial = 0; trial < 30; ++trial) {
    Formula phi = generate(25, 3, 2.0, rng);
    WorkingFormula work(phi);
    for (int s = 0; s < 25; ++s) {
      const Var x = static_cast<Var>((s * 7) % 25);
      const bool v = rng.coin();
      const std::size_t before = phi.num_clauses();
      const auto effect = work.assign(x, v);
      phi = phi.reduce(x, v);
      ASSERT_EQ(work.snapshot(), phi);
      ASSERT_EQ(work.violations(), phi.violations());
      ASSERT_EQ(before - phi.num_clauses(), effect.satisfied + effect.violated);
    }
    EXPECT_THROW(work.assign(0, true), InvalidParameters);
  }
}

TEST(Neighborhood, Examples) {
  const Formula phi(4, 3, {make_clause({1, 2, 3})});
  const Neighborhood b0 = neighborhood(phi, 0, 0);
  EXPECT_EQ(b0.instance.num_vars(), 1U);
  EXPECT_EQ(b0.instance.num_clauses(), 0U);
  const Neighborhood iso = neighborhood(phi, 3, 4);
  EXPECT_EQ(iso.instance.num_vars(), 1U);
  EXPECT_EQ(iso.instance.num_clauses(), 0U);
  const Neighborhood b2 = neighborhood(phi, 0, 2);
  EXPECT_EQ(b2.instance.num_vars(), 3U);
  EXPECT_EQ(b2.instance.num_clauses(), 1U);
  EXPECT_EQ(b2.to_parent[0], 0U);
  EXPECT_THROW(neighborhood(phi, 0, 3), InvalidParameters);
  EXPECT_THROW(neighborhood(phi, 0, -2), InvalidParameters);
}

TEST(Neighborhood, MatchesFactorGraphBfs) {
  Rng rng(16);
  for (int trial = 0; trial < 100; ++trial) {
    Formula phi = generate(40, 3, 1.5, rng);
    phi = phi.reduce(1, rng.coin()).reduce(2, rng.coin());
    const Var x = 5 + static_cast<Var>(rng.below(30));
    const int r = 2 * static_cast<int>(1 + rng.below(3));
    // Factor-graph BFS: nodes 0..n-1 variables, n.. clauses.
    const std::size_t n = phi.num_vars();
    std::vector<int> dist(n + phi.num_clauses(), -1);
    std::deque<std::size_t> q{x};
    dist[x] = 0;
    while (!q.empty()) {
      const std::size_t v = q.front();
      q.pop_front();
      if (dist[v] == r) continue;
      if (v < n) {
        for (std::size_t c = 0; c < phi.num_clauses(); ++c)
          for (const Literal& l : phi.clause(c).literals)
            if (l.var == v && dist[n + c] < 0) {
              dist[n + c] = dist[v] + 1;
              q.push_back(n + c);
            }
      } else {
        for (const Literal& l : phi.clause(v - n).literals)
          if (dist[l.var] < 0) {
            dist[l.var] = dist[v] + 1;
            q.push_back(l.var);
          }
      }
    }
    std::set<Var> want_vars;
    std::set<ClauseId> want_clauses;
    for (std::size_t v = 0; v < n; ++v)
      if (dist[v] >= 0) want_vars.insert(static_cast<Var>(v));
    for (std::size_t c = 0; c < phi.num_clauses(); ++c)
      if (dist[n + c] >= 0) want_clauses.insert(phi.clause(c).id);

    const Neighborhood b = neighborhood(phi, x, r);
    const std::set<Var> got_vars(b.to_parent.begin(), b.to_parent.end());
    std::set<ClauseId> got_clauses;
    for (const Clause& c : b.instance.clauses()) got_clauses.insert(c.id);
    ASSERT_EQ(got_vars, want_vars);
    ASSERT_EQ(got_clauses, want_clauses);
    ASSERT_EQ(b.to_parent[0], x);
    // Signs and literals survive relabelling.
    for (const Clause& c : b.instance.clauses()) {
      const auto it = std::find_if(phi.clauses().begin(), phi.clauses().end(),
                                   [&](const Clause& p) { return p.id == c.id; });
      ASSERT_EQ(it->sign, c.sign);
      for (std::size_t i = 0; i < c.width(); ++i) {
        ASSERT_EQ(b.to_parent[c.literals[i].var], it->literals[i].var);
        ASSERT_EQ(c.literals[i].negated, it->literals[i].negated);
      }
    }
  }
}

TEST(Neighborhood, ComplementFlipsSignsOnly) {
  Rng rng(17);
  const Neighborhood b = sample_reduced_neighborhood(60, 3, 2.0, 4, 0.3, rng);
  const Neighborhood bar = complement(b);
  EXPECT_EQ(bar.to_parent, b.to_parent);
  ASSERT_EQ(bar.instance.num_clauses(), b.instance.num_clauses());
  for (std::size_t c = 0; c < b.instance.num_clauses(); ++c) {
    EXPECT_EQ(bar.instance.clause(c).literals, b.instance.clause(c).literals);
    EXPECT_EQ(bar.instance.clause(c).sign, flipped(b.instance.clause(c).sign));
  }
}

TEST(Hamming, Examples) {
  const Assignment a = Assignment::from_string("0011");
  EXPECT_EQ(hamming(a, a), 0U);
  EXPECT_EQ(hamming(a, a.complemented()), 4U);
  EXPECT_EQ(hamming(a, Assignment::from_string("0101")), 2U);
  EXPECT_THROW(hamming(a, Assignment::from_string("01")), InvalidParameters);
}
