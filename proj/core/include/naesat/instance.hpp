#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "naesat/rng.hpp"

namespace naesat {

/// Variables are 0-based in memory; the text format and CLI show them 1-based.
using Var = std::uint32_t;
using ClauseId = std::uint32_t;

struct Literal {
  Var var = 0;
  bool negated = false;

  /// Value of the literal when its variable takes `value`.
  bool value_under(bool value) const { return value != negated; }
  friend bool operator==(const Literal&, const Literal&) = default;
};

/// Decoration of a reduced clause. `plus` records that a literal valued 1 was
/// removed (the clause still needs a 0), `minus` that a literal valued 0 was
/// removed (it still needs a 1).
enum class Sign : std::uint8_t { neutral, plus, minus };

Sign flipped(Sign s);
char sign_char(Sign s);

struct Clause {
  ClauseId id = 0;
  std::vector<Literal> literals;
  Sign sign = Sign::neutral;

  std::size_t width() const { return literals.size(); }
  friend bool operator==(const Clause&, const Clause&) = default;
};

/// Outcome of deleting one literal (valued `literal_value`) from a clause
/// with sign `sign`, leaving `remaining` literals.
struct LiteralRemoval {
  enum class Kind : std::uint8_t { satisfied, violated, shortened };
  Kind kind;
  Sign sign;  // meaningful for `shortened`
};
LiteralRemoval remove_literal(Sign sign, bool literal_value, std::size_t remaining);

enum class Origin : std::uint8_t { fresh, reduced };

/// A (possibly reduced) NAE-K-SAT instance. Immutable once built; reduce()
/// and complement() return new values.
///
/// Invariants checked on construction: K >= 2, every literal in range,
/// distinct variables per clause, 1 <= width <= K, sign neutral iff width K,
/// fresh formulas carry only neutral clauses.
class Formula {
 public:
  Formula() = default;
  Formula(std::size_t n, std::size_t k, std::vector<Clause> clauses = {},
          Origin origin = Origin::fresh, std::size_t violations = 0);

  std::size_t num_vars() const { return n_; }
  std::size_t k() const { return k_; }
  std::size_t num_clauses() const { return clauses_.size(); }
  const std::vector<Clause>& clauses() const { return clauses_; }
  const Clause& clause(std::size_t i) const { return clauses_[i]; }
  Origin origin() const { return origin_; }
  /// Clauses deleted as violated by reductions so far.
  std::size_t violations() const { return violations_; }

  Formula complement() const;
  /// Fixes x to `value`: drops x from every clause, deletes satisfied and
  /// violated clauses (counting the latter), decorates shortened clauses.
  Formula reduce(Var x, bool value) const;

  friend bool operator==(const Formula&, const Formula&) = default;

 private:
  std::size_t n_ = 0;
  std::size_t k_ = 2;
  std::vector<Clause> clauses_;
  Origin origin_ = Origin::fresh;
  std::size_t violations_ = 0;
};

enum class Bit : std::int8_t { zero = 0, one = 1, unset = -1 };

class Assignment {
 public:
  Assignment() = default;
  explicit Assignment(std::size_t n, Bit fill = Bit::unset) : values_(n, fill) {}
  /// From a string of '0', '1' and '*' (unset).
  static Assignment from_string(std::string_view bits);
  static Assignment from_bits(const std::vector<bool>& bits);

  std::size_t size() const { return values_.size(); }
  Bit operator[](std::size_t i) const { return values_[i]; }
  bool is_set(Var v) const { return values_[v] != Bit::unset; }
  bool value(Var v) const { return values_[v] == Bit::one; }
  void set(Var v, bool value) { values_[v] = value ? Bit::one : Bit::zero; }
  void unset(Var v) { values_[v] = Bit::unset; }
  bool is_total() const;
  Assignment complemented() const;
  std::string to_string() const;

  friend bool operator==(const Assignment&, const Assignment&) = default;

 private:
  std::vector<Bit> values_;
};

enum class ClauseStatus : std::uint8_t { satisfied, violated, undetermined };

/// Works on partial assignments: `violated` means no completion of the unset
/// variables satisfies the clause.
ClauseStatus evaluate_clause(const Clause& c, const Assignment& sigma);

struct Evaluation {
  bool sat = true;
  std::vector<std::size_t> violated;  // positions in Formula::clauses()
};
Evaluation evaluate(const Formula& phi, const Assignment& sigma);

/// Random fresh instance with floor(d n) clauses. Draw order, per clause:
/// K variable slots filled by rng.below(n) with rejection of repeats, then K
/// negation coins, one per slot in slot order.
Formula generate(std::size_t n, std::size_t k, double density, Rng& rng);
Formula generate(std::size_t n, std::size_t k, double density, std::uint64_t seed);

std::size_t hamming(const Assignment& a, const Assignment& b);

/// Depth-r factor-graph ball around a root, as a standalone reduced
/// instance. Local variable 0 is the root; `to_parent[i]` maps local
/// variable i back to the parent formula. Clause ids are the parent's.
struct Neighborhood {
  Var root_in_parent = 0;
  int radius = 0;
  Formula instance;
  std::vector<Var> to_parent;

  static constexpr Var root() { return 0; }
  friend bool operator==(const Neighborhood&, const Neighborhood&) = default;
};

/// O(n + m) per call; repeated extraction should go through WorkingFormula.
Neighborhood neighborhood(const Formula& phi, Var x, int r);
Neighborhood complement(const Neighborhood& b);

/// Mutable working copy used by the decimation engine: supports O(degree)
/// assignment and neighborhood extraction without copying the formula.
/// Not thread-safe; each run owns one.
class WorkingFormula {
 public:
  explicit WorkingFormula(const Formula& phi);

  struct StepEffect {
    std::size_t satisfied = 0;
    std::size_t violated = 0;
    std::size_t shortened = 0;
  };

  std::size_t num_vars() const { return n_; }
  std::size_t violations() const { return violations_; }
  bool is_assigned(Var x) const { return assigned_[x]; }
  StepEffect assign(Var x, bool value);
  Neighborhood neighborhood(Var x, int r) const;
  /// Current reduced formula as a value (alive clauses in original order).
  Formula snapshot() const;

 private:
  std::size_t n_;
  std::size_t k_;
  std::vector<Clause> clauses_;
  std::vector<bool> alive_;
  std::vector<std::vector<std::uint32_t>> occurs_;
  std::vector<bool> assigned_;
  std::size_t violations_ = 0;
  bool touched_ = false;

  // BFS scratch, stamped to avoid clearing.
  mutable std::vector<std::uint32_t> var_stamp_;
  mutable std::vector<std::uint32_t> var_local_;
  mutable std::vector<std::uint32_t> clause_stamp_;
  mutable std::uint32_t epoch_ = 0;
};

/// Random reduced neighborhood: a fresh random formula with a random subset
/// of variables fixed at random values, rooted at a random free variable.
/// Used for balance and coupling checks.
Neighborhood sample_reduced_neighborhood(std::size_t n, std::size_t k, double density, int radius,
                                         double fixed_fraction, Rng& rng);

// Extended-DIMACS text ------------------------------------------------------

/// Writes the `p naesat <n> <m> <K>` format. Non-default metadata (reduced
/// origin, violation count, non-sequential clause ids) goes into `c naesat`
/// comment directives so parse(serialize(f)) == f.
std::string serialize(const Formula& phi);
Formula parse(std::string_view text);
Formula read_formula_file(const std::string& path);
void write_text_file(const std::string& path, std::string_view contents);

}  // namespace naesat
