#include "naesat/instance.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "naesat/errors.hpp"

namespace naesat {

Sign flipped(Sign s) {
  switch (s) {
    case Sign::plus:
      return Sign::minus;
    case Sign::minus:
      return Sign::plus;
    case Sign::neutral:
      break;
  }
  return Sign::neutral;
}

char sign_char(Sign s) {
  switch (s) {
    case Sign::plus:
      return 'p';
    case Sign::minus:
      return 'm';
    case Sign::neutral:
      break;
  }
  return 'n';
}

LiteralRemoval remove_literal(Sign sign, bool literal_value, std::size_t remaining) {
  using K = LiteralRemoval::Kind;
  switch (sign) {
    case Sign::neutral:
      // A neutral clause has K >= 2 literals, so one always remains.
      return {K::shortened, literal_value ? Sign::plus : Sign::minus};
    case Sign::plus:
      if (!literal_value) return {K::satisfied, sign};
      break;
    case Sign::minus:
      if (literal_value) return {K::satisfied, sign};
      break;
  }
  if (remaining == 0) return {K::violated, sign};
  return {K::shortened, sign};
}

Formula::Formula(std::size_t n, std::size_t k, std::vector<Clause> clauses, Origin origin,
                 std::size_t violations)
    : n_(n), k_(k), clauses_(std::move(clauses)), origin_(origin), violations_(violations) {
  if (k_ < 2) throw InvalidParameters("clause width K must be at least 2");
  std::vector<std::uint32_t> seen(n_, 0);
  std::uint32_t stamp = 0;
  for (const Clause& c : clauses_) {
    ++stamp;
    if (c.literals.empty() || c.literals.size() > k_)
      throw CorruptInstance("clause " + std::to_string(c.id) + " has width " +
                            std::to_string(c.literals.size()) + " outside [1, K]");
    if ((c.sign == Sign::neutral) != (c.literals.size() == k_))
      throw CorruptInstance("clause " + std::to_string(c.id) +
                            " breaks the rule: neutral iff width K");
    if (origin_ == Origin::fresh && c.sign != Sign::neutral)
      throw CorruptInstance("fresh formula contains a signed clause");
    for (const Literal& l : c.literals) {
      if (l.var >= n_)
        throw CorruptInstance("clause " + std::to_string(c.id) + " references variable " +
                              std::to_string(l.var + 1) + " > n");
      if (seen[l.var] == stamp)
        throw CorruptInstance("clause " + std::to_string(c.id) + " repeats a variable");
      seen[l.var] = stamp;
    }
  }
}

Formula Formula::complement() const {
  std::vector<Clause> out = clauses_;
  for (Clause& c : out) c.sign = flipped(c.sign);
  return Formula(n_, k_, std::move(out), origin_, violations_);
}

Formula Formula::reduce(Var x, bool value) const {
  if (x >= n_) throw InvalidParameters("reduce: variable out of range");
  std::vector<Clause> out;
  out.reserve(clauses_.size());
  std::size_t violations = violations_;
  for (const Clause& c : clauses_) {
    auto it = std::find_if(c.literals.begin(), c.literals.end(),
                           [x](const Literal& l) { return l.var == x; });
    if (it == c.literals.end()) {
      out.push_back(c);
      continue;
    }
    const auto removal = remove_literal(c.sign, it->value_under(value), c.literals.size() - 1);
    switch (removal.kind) {
      case LiteralRemoval::Kind::satisfied:
        break;
      case LiteralRemoval::Kind::violated:
        ++violations;
        break;
      case LiteralRemoval::Kind::shortened: {
        Clause shorter{c.id, {}, removal.sign};
        shorter.literals.reserve(c.literals.size() - 1);
        for (const Literal& l : c.literals)
          if (l.var != x) shorter.literals.push_back(l);
        out.push_back(std::move(shorter));
        break;
      }
    }
  }
  return Formula(n_, k_, std::move(out), Origin::reduced, violations);
}

// Assignment ------------------------------------------------------------------

Assignment Assignment::from_string(std::string_view bits) {
  Assignment a(bits.size());
  for (std::size_t i = 0; i < bits.size(); ++i) {
    switch (bits[i]) {
      case '0':
        a.set(static_cast<Var>(i), false);
        break;
      case '1':
        a.set(static_cast<Var>(i), true);
        break;
      case '*':
        break;
      default:
        throw InvalidParameters(std::string("assignment string: unexpected character '") +
                                bits[i] + "'");
    }
  }
  return a;
}

Assignment Assignment::from_bits(const std::vector<bool>& bits) {
  Assignment a(bits.size());
  for (std::size_t i = 0; i < bits.size(); ++i) a.set(static_cast<Var>(i), bits[i]);
  return a;
}

bool Assignment::is_total() const {
  return std::none_of(values_.begin(), values_.end(), [](Bit b) { return b == Bit::unset; });
}

Assignment Assignment::complemented() const {
  Assignment out = *this;
  for (Bit& b : out.values_) {
    if (b == Bit::zero)
      b = Bit::one;
    else if (b == Bit::one)
      b = Bit::zero;
  }
  return out;
}

std::string Assignment::to_string() const {
  std::string s(values_.size(), '*');
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (values_[i] == Bit::zero) s[i] = '0';
    if (values_[i] == Bit::one) s[i] = '1';
  }
  return s;
}

// Evaluation ------------------------------------------------------------------

ClauseStatus evaluate_clause(const Clause& c, const Assignment& sigma) {
  bool any_true = false;
  bool any_false = false;
  std::size_t unset = 0;
  for (const Literal& l : c.literals) {
    if (l.var >= sigma.size())
      throw CorruptInstance("clause " + std::to_string(c.id) + " references variable " +
                            std::to_string(l.var + 1) + " outside the assignment");
    if (!sigma.is_set(l.var)) {
      ++unset;
      continue;
    }
    if (l.value_under(sigma.value(l.var)))
      any_true = true;
    else
      any_false = true;
  }
  bool satisfied = false;
  switch (c.sign) {
    case Sign::neutral:
      satisfied = any_true && any_false;
      break;
    case Sign::plus:
      satisfied = any_false;
      break;
    case Sign::minus:
      satisfied = any_true;
      break;
  }
  if (satisfied) return ClauseStatus::satisfied;
  // Any unset literal can still supply the missing value: a neutral clause
  // with an unset literal has width >= 2 and at most one value seen so far.
  return unset == 0 ? ClauseStatus::violated : ClauseStatus::undetermined;
}

Evaluation evaluate(const Formula& phi, const Assignment& sigma) {
  if (sigma.size() != phi.num_vars())
    throw InvalidParameters("evaluate: assignment length differs from n");
  if (!sigma.is_total()) throw InvalidParameters("evaluate: assignment is partial");
  Evaluation ev;
  for (std::size_t i = 0; i < phi.num_clauses(); ++i) {
    if (evaluate_clause(phi.clause(i), sigma) != ClauseStatus::satisfied) {
      ev.sat = false;
      ev.violated.push_back(i);
    }
  }
  return ev;
}

// Generation --------------------------------------------------------------------

Formula generate(std::size_t n, std::size_t k, double density, Rng& rng) {
  if (k < 2) throw InvalidParameters("generate: K must be at least 2");
  if (n < k) throw InvalidParameters("generate: n must be at least K");
  if (!(density >= 0.0) || !std::isfinite(density))
    throw InvalidParameters("generate: density must be a finite value >= 0");
  // The epsilon absorbs representation error such as 0.29 * 100 = 28.999...
  const auto m = static_cast<std::size_t>(std::floor(density * static_cast<double>(n) + 1e-9));
  std::vector<Clause> clauses;
  clauses.reserve(m);
  for (std::size_t j = 0; j < m; ++j) {
    Clause c{static_cast<ClauseId>(j), {}, Sign::neutral};
    c.literals.reserve(k);
    while (c.literals.size() < k) {
      const auto v = static_cast<Var>(rng.below(n));
      const bool repeat = std::any_of(c.literals.begin(), c.literals.end(),
                                      [v](const Literal& l) { return l.var == v; });
      if (!repeat) c.literals.push_back({v, false});
    }
    for (Literal& l : c.literals) l.negated = rng.coin();
    clauses.push_back(std::move(c));
  }
  return Formula(n, k, std::move(clauses));
}

Formula generate(std::size_t n, std::size_t k, double density, std::uint64_t seed) {
  Rng rng(seed);
  return generate(n, k, density, rng);
}

std::size_t hamming(const Assignment& a, const Assignment& b) {
  if (a.size() != b.size()) throw InvalidParameters("hamming: assignments differ in length");
  if (!a.is_total() || !b.is_total()) throw InvalidParameters("hamming: partial assignment");
  std::size_t d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d += (a[i] != b[i]) ? 1 : 0;
  return d;
}

Neighborhood neighborhood(const Formula& phi, Var x, int r) {
  WorkingFormula work(phi);
  return work.neighborhood(x, r);
}

Neighborhood complement(const Neighborhood& b) {
  Neighborhood out = b;
  out.instance = b.instance.complement();
  return out;
}

Neighborhood sample_reduced_neighborhood(std::size_t n, std::size_t k, double density, int radius,
                                         double fixed_fraction, Rng& rng) {
  const Formula phi = generate(n, k, density, rng);
  WorkingFormula work(phi);
  std::vector<Var> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = static_cast<Var>(i);
  for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
  auto fixed = static_cast<std::size_t>(fixed_fraction * static_cast<double>(n));
  fixed = std::min(fixed, n - 1);
  for (std::size_t i = 0; i < fixed; ++i) work.assign(order[i], rng.coin());
  return work.neighborhood(order[fixed], radius);
}

}  // namespace naesat
