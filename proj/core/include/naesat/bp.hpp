#pragma once

#include <cstddef>
#include <memory>

#include <boost/multiprecision/cpp_int.hpp>

#include "naesat/decimation.hpp"
#include "naesat/instance.hpp"

namespace naesat {

using BigCount = boost::multiprecision::cpp_int;

/// Exact satisfying-assignment counts of a neighborhood with the root fixed.
struct Marginal {
  BigCount count1;
  BigCount count0;

  /// count1 / count0; +inf when count0 == 0 < count1, NaN when both are 0.
  double mu() const;
  /// mu / (mu + 1) with mu = inf -> 1 and 0/0 -> 1/2. Computed so that
  /// swapping the counts yields 1 - tau to within one rounding.
  double tau() const;
};

/// Branching budget of exact counting on cyclic factor graphs: at most this
/// many variables may be conditioned along one branch.
inline constexpr std::size_t kMaxBranchVariables = 24;

/// Number of assignments to all variables of `phi` satisfying every clause.
/// Acyclic components are counted by tree dynamic programming; cyclic ones
/// by conditioning on 2-core variables until they fall apart into trees.
/// Throws TooLarge when a branch needs more than kMaxBranchVariables.
BigCount count_satisfying(const Formula& phi);

/// True when the factor graph (variables + clauses) has no cycle.
bool is_forest(const Formula& phi);

Marginal exact_marginal(const Neighborhood& b);

double tau_from_counts(const BigCount& count1, const BigCount& count0);

/// Synchronous sum-product from uniform messages, `rounds` full
/// (variable-to-clause then clause-to-variable) rounds. Returns the root's
/// probability of value 1. Exact on trees once rounds >= radius / 2.
double bp_messages(const Neighborhood& b, int rounds);

/// tau(B) = mu / (mu + 1) from exact counts on B(x, r).
class BpRule final : public LocalRule {
 public:
  explicit BpRule(int radius);
  std::string name() const override { return "bp"; }
  int radius() const override { return radius_; }
  double evaluate(const Neighborhood& b, AuxStream& aux) const override;

 private:
  int radius_;
};

std::unique_ptr<LocalRule> bp_rule(int radius);

}  // namespace naesat
