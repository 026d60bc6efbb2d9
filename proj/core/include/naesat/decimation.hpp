#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "naesat/instance.hpp"
#include "naesat/rng.hpp"

namespace naesat {

/// Decision order. Weights are i.i.d. uniform; variables are processed in
/// strictly decreasing (weight, index) lexicographic order, so ties in the
/// weight are broken by the larger index first and the order is always strict.
class Ordering {
 public:
  Ordering() = default;
  explicit Ordering(std::vector<double> weights);

  std::size_t size() const { return weights_.size(); }
  const std::vector<double>& weights() const { return weights_; }
  /// order()[t] is the variable decided at step t (0-based).
  const std::vector<Var>& order() const { return order_; }
  /// Step at which variable v is decided.
  std::size_t rank(Var v) const { return rank_[v]; }
  /// True when a is decided before b, i.e. (Z_a, a) > (Z_b, b).
  bool precedes(Var a, Var b) const { return rank_[a] < rank_[b]; }

 private:
  std::vector<double> weights_;
  std::vector<Var> order_;
  std::vector<std::size_t> rank_;
};

Ordering draw_ordering(std::size_t n, Rng& rng);

/// Per-variable decision randomness. `u` is the threshold draw; `aux` seeds
/// the variable's private stream for sampling rules; `mirrored` asks that
/// stream to deliver the complement-coupled draws.
struct DecisionSeed {
  double u = 0.5;
  std::uint64_t aux = 0;
  bool mirrored = false;
  friend bool operator==(const DecisionSeed&, const DecisionSeed&) = default;
};
using Seeds = std::vector<DecisionSeed>;

/// u from Rng::uniform_open (so 1 - u is exact), aux from the raw stream.
Seeds draw_seeds(std::size_t n, Rng& rng);
/// (1 - u, aux, !mirrored) coordinatewise.
Seeds complemented(const Seeds& seeds);

/// Private randomness handed to a local rule for one decision. Seeded lazily
/// from DecisionSeed::aux.
class AuxStream {
 public:
  AuxStream(std::uint64_t seed, bool mirrored) : seed_(seed), mirrored_(mirrored) {}

  bool mirrored() const { return mirrored_; }
  double uniform01();
  bool coin();

 private:
  Rng& rng();

  std::uint64_t seed_;
  bool mirrored_;
  std::optional<Rng> rng_;
};

/// A function from rooted neighborhoods to a probability of setting the
/// root to 1. Implementations must be stateless so one rule can serve
/// concurrent runs.
class LocalRule {
 public:
  /// probability: evaluate() returns tau in [0, 1] and the engine thresholds
  /// it against u. sampling: evaluate() draws from the aux stream and returns
  /// exactly 0 or 1.
  enum class Mode { probability, sampling };

  virtual ~LocalRule() = default;
  virtual std::string name() const = 0;
  virtual int radius() const = 0;
  virtual Mode mode() const { return Mode::probability; }
  virtual double evaluate(const Neighborhood& b, AuxStream& aux) const = 0;
};

/// Adapter for ad-hoc rules (test hooks, constant rules).
class FunctionRule final : public LocalRule {
 public:
  using Fn = std::function<double(const Neighborhood&, AuxStream&)>;
  FunctionRule(std::string name, int radius, Fn fn, Mode mode = Mode::probability);

  std::string name() const override { return name_; }
  int radius() const override { return radius_; }
  Mode mode() const override { return mode_; }
  double evaluate(const Neighborhood& b, AuxStream& aux) const override { return fn_(b, aux); }

 private:
  std::string name_;
  int radius_;
  Fn fn_;
  Mode mode_;
};

std::unique_ptr<LocalRule> constant_rule(double tau, int radius = 2);

/// Radius-2 unit clause rule: tau = 1 when signed unit clauses on the root
/// force it to 1 only, 0 when they force it to 0 only, 1/2 otherwise
/// (including conflicting forcings).
class UnitClauseRule final : public LocalRule {
 public:
  std::string name() const override { return "uc"; }
  int radius() const override { return 2; }
  double evaluate(const Neighborhood& b, AuxStream& aux) const override;
};
std::unique_ptr<LocalRule> unit_clause_rule();

struct StepRecord {
  Var variable = 0;
  double tau = 0.0;     // rule output (0/1 for sampling rules)
  double u = 0.0;       // threshold draw used for the decision
  bool value = false;
  std::size_t satisfied = 0;
  std::size_t violated = 0;
  std::size_t shortened = 0;
  std::string neighborhood;  // serialized B(x, r) when recording is enabled
};

struct RunTrace {
  std::vector<Var> order;
  std::vector<StepRecord> steps;
  Assignment assignment;
  std::size_t violations = 0;
};

struct RunOptions {
  bool record_neighborhoods = false;
  /// Stop right after this variable is decided (the rest stay unset).
  std::optional<Var> stop_after;
};

/// The sequential local algorithm: variables in ordering order; at each step
/// sigma(x) = 1 iff u_x <= tau(B(x, r)) on the current reduced formula, then
/// the formula is reduced. Violated clauses are counted, never fatal.
RunTrace run(const Formula& phi, const LocalRule& rule, const Ordering& z, const Seeds& u,
             const RunOptions& options = {});

/// Assignment only, without building a trace.
Assignment run_assignment(const Formula& phi, const LocalRule& rule, const Ordering& z,
                          const Seeds& u);

/// One JSON object per line: step, var (1-based), tau, u, value, satisfied,
/// violated, shortened, and neighborhood when recorded.
std::string trace_to_jsonl(const RunTrace& trace);

struct BalanceReport {
  std::size_t checked = 0;
  double max_deviation = 0.0;
  bool balanced = true;
  std::optional<Neighborhood> witness;  // first neighborhood beyond tolerance
};

using NeighborhoodSampler = std::function<Neighborhood(Rng&)>;

/// Checks tau(complement(B)) = 1 - tau(B) on `count` sampled neighborhoods.
/// The complement side is evaluated with the mirrored aux stream of the same
/// seed, which is the coupling sampling rules are balanced under.
BalanceReport check_balance(const LocalRule& rule, const NeighborhoodSampler& sampler,
                            std::size_t count, Rng& rng, double tolerance = 1e-12);

}  // namespace naesat
