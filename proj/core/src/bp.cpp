#include "naesat/bp.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <span>
#include <utility>

#include "naesat/errors.hpp"

namespace naesat {

namespace {

// Lightweight clause for counting: local variable ids, no invariants.
struct CountClause {
  std::vector<Literal> lits;
  Sign sign;
};

// Counts are unsigned __int128 when at most 127 variables are free (no
// overflow is possible) and BigCount otherwise.
__extension__ typedef unsigned __int128 SmallCount;

template <typename C>
using Weights = std::array<C, 2>;

struct UnionFind {
  std::vector<std::uint32_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0U); }
  std::uint32_t find(std::uint32_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(std::uint32_t a, std::uint32_t b) { parent[find(a)] = find(b); }
};

// Clauses incident to each variable, stored flat.
class Incidence {
 public:
  Incidence(const std::vector<CountClause>& clauses, std::size_t num_vars) : offset_(num_vars + 1, 0) {
    for (const CountClause& c : clauses)
      for (const Literal& l : c.lits) ++offset_[l.var + 1];
    for (std::size_t v = 0; v < num_vars; ++v) offset_[v + 1] += offset_[v];
    items_.resize(offset_.back());
    std::vector<std::uint32_t> fill(offset_.begin(), offset_.end() - 1);
    for (std::size_t c = 0; c < clauses.size(); ++c)
      for (const Literal& l : clauses[c].lits) items_[fill[l.var]++] = static_cast<std::uint32_t>(c);
  }
  std::size_t size() const { return offset_.size() - 1; }
  std::span<const std::uint32_t> operator[](std::size_t v) const {
    return {items_.data() + offset_[v], offset_[v + 1] - offset_[v]};
  }

 private:
  std::vector<std::uint32_t> offset_;
  std::vector<std::uint32_t> items_;
};

// Tree DP over one acyclic component whose clauses reference variables via
// `var_clauses` adjacency.
template <typename C>
class TreeCounter {
 public:
  TreeCounter(const std::vector<CountClause>& clauses,
              const Incidence& var_clauses)
      : clauses_(clauses), var_clauses_(var_clauses) {}

  C total(Var root) {
    const Weights<C> w = var_weights(root, kNone);
    return w[0] + w[1];
  }

 private:
  static constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();

  Weights<C> var_weights(Var v, std::uint32_t parent_clause) {
    Weights<C> w{C(1), C(1)};
    for (std::uint32_t c : var_clauses_[v]) {
      if (c == parent_clause) continue;
      const Weights<C> m = clause_message(c, v);
      w[0] *= m[0];
      w[1] *= m[1];
    }
    return w;
  }

  // Weighted count of the subtree below clause c, per value of parent p.
  Weights<C> clause_message(std::uint32_t c, Var p) {
    const CountClause& clause = clauses_[c];
    bool parent_negated = false;
    std::vector<Weights<C>> lit_weights;  // indexed by literal value
    for (const Literal& l : clause.lits) {
      if (l.var == p) {
        parent_negated = l.negated;
        continue;
      }
      Weights<C> w = var_weights(l.var, c);
      if (l.negated) std::swap(w[0], w[1]);
      lit_weights.push_back(std::move(w));
    }
    C total(1);
    Weights<C> all_equal{C(1), C(1)};
    for (const Weights<C>& a : lit_weights) {
      total *= a[0] + a[1];
      all_equal[0] *= a[0];
      all_equal[1] *= a[1];
    }
    Weights<C> out;
    for (int b = 0; b < 2; ++b) {
      const int lp = (b != 0) != parent_negated ? 1 : 0;
      const bool forbidden = clause.sign == Sign::neutral ||
                             (clause.sign == Sign::plus && lp == 1) ||
                             (clause.sign == Sign::minus && lp == 0);
      out[b] = forbidden ? C(total - all_equal[lp]) : total;
    }
    return out;
  }

  const std::vector<CountClause>& clauses_;
  const Incidence& var_clauses_;
};

// Picks a variable of the 2-core (the part of the factor graph left after
// repeatedly pruning degree <= 1 nodes) with the largest core degree.
Var pick_branch_variable(const std::vector<CountClause>& clauses,
                         const std::vector<Var>& vars,
                         const Incidence& var_clauses) {
  const std::size_t nv = var_clauses.size();
  std::vector<std::size_t> var_deg(nv, 0);
  std::vector<std::size_t> clause_deg(clauses.size(), 0);
  std::vector<bool> var_gone(nv, false);
  std::vector<bool> clause_gone(clauses.size(), false);
  for (Var v : vars) var_deg[v] = var_clauses[v].size();
  for (std::size_t c = 0; c < clauses.size(); ++c) clause_deg[c] = clauses[c].lits.size();

  std::vector<std::pair<bool, std::uint32_t>> stack;  // (is_var, id)
  for (Var v : vars)
    if (var_deg[v] <= 1) stack.emplace_back(true, v);
  for (std::size_t c = 0; c < clauses.size(); ++c)
    if (clause_deg[c] <= 1) stack.emplace_back(false, static_cast<std::uint32_t>(c));
  while (!stack.empty()) {
    auto [is_var, id] = stack.back();
    stack.pop_back();
    if (is_var) {
      if (var_gone[id]) continue;
      var_gone[id] = true;
      for (std::uint32_t c : var_clauses[id])
        if (!clause_gone[c] && --clause_deg[c] <= 1) stack.emplace_back(false, c);
    } else {
      if (clause_gone[id]) continue;
      clause_gone[id] = true;
      for (const Literal& l : clauses[id].lits)
        if (!var_gone[l.var] && --var_deg[l.var] <= 1) stack.emplace_back(true, l.var);
    }
  }
  Var best = vars.front();
  std::size_t best_deg = 0;
  for (Var v : vars) {
    if (var_gone[v]) continue;
    if (var_deg[v] > best_deg) {
      best = v;
      best_deg = var_deg[v];
    }
  }
  return best;
}

// Fixes v and rewrites the clauses; false when a clause becomes violated.
bool fix_variable(std::vector<CountClause>& clauses, Var v, bool value) {
  std::vector<CountClause> out;
  out.reserve(clauses.size());
  for (CountClause& c : clauses) {
    auto it = std::find_if(c.lits.begin(), c.lits.end(), [v](const Literal& l) { return l.var == v; });
    if (it == c.lits.end()) {
      out.push_back(std::move(c));
      continue;
    }
    const auto removal = remove_literal(c.sign, it->value_under(value), c.lits.size() - 1);
    if (removal.kind == LiteralRemoval::Kind::violated) return false;
    if (removal.kind == LiteralRemoval::Kind::shortened) {
      c.lits.erase(it);
      c.sign = removal.sign;
      out.push_back(std::move(c));
    }
  }
  clauses = std::move(out);
  return true;
}

// A signed unit clause leaves its variable a single value. Forced variables
// are fixed and dropped from `free_vars`; false on contradiction.
bool propagate_units(std::vector<CountClause>& clauses, std::vector<Var>& free_vars) {
  for (;;) {
    auto unit = std::find_if(clauses.begin(), clauses.end(),
                             [](const CountClause& c) { return c.lits.size() == 1; });
    if (unit == clauses.end()) return true;
    const Literal l = unit->lits.front();
    // plus needs the literal at 0, minus at 1.
    const bool literal_value = unit->sign == Sign::minus;
    if (!fix_variable(clauses, l.var, l.value_under(true) == literal_value)) return false;
    auto pos = std::find(free_vars.begin(), free_vars.end(), l.var);
    if (pos != free_vars.end()) free_vars.erase(pos);
  }
}

// Counts assignments of the `free_vars` (other variables are already fixed
// and do not occur in `clauses`).
template <typename C>
C count_models(std::vector<CountClause> clauses, std::vector<Var> free_vars,
               std::size_t num_local_vars, std::size_t depth) {
  if (!propagate_units(clauses, free_vars)) return C(0);
  const Incidence var_clauses(clauses, num_local_vars);

  UnionFind uf(num_local_vars);
  for (const CountClause& c : clauses)
    for (std::size_t i = 1; i < c.lits.size(); ++i) uf.unite(c.lits[0].var, c.lits[i].var);

  C result(1);
  // Free variables and clauses sorted by component root.
  std::vector<std::pair<std::uint32_t, Var>> var_keys;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> clause_keys;
  var_keys.reserve(free_vars.size());
  clause_keys.reserve(clauses.size());
  std::size_t isolated = 0;
  for (Var v : free_vars) {
    if (var_clauses[v].empty())
      ++isolated;
    else
      var_keys.emplace_back(uf.find(v), v);
  }
  for (std::size_t c = 0; c < clauses.size(); ++c)
    clause_keys.emplace_back(uf.find(clauses[c].lits[0].var), static_cast<std::uint32_t>(c));
  std::sort(var_keys.begin(), var_keys.end());
  std::sort(clause_keys.begin(), clause_keys.end());
  result <<= isolated;

  std::size_t vi = 0;
  std::size_t ci = 0;
  std::vector<Var> vars;
  std::vector<std::uint32_t> cids;
  while (vi < var_keys.size()) {
    const std::uint32_t root = var_keys[vi].first;
    vars.clear();
    cids.clear();
    for (; vi < var_keys.size() && var_keys[vi].first == root; ++vi) vars.push_back(var_keys[vi].second);
    while (ci < clause_keys.size() && clause_keys[ci].first < root) ++ci;
    for (; ci < clause_keys.size() && clause_keys[ci].first == root; ++ci) cids.push_back(clause_keys[ci].second);
    std::size_t edges = 0;
    for (std::uint32_t c : cids) edges += clauses[c].lits.size();
    const bool acyclic = edges + 1 == vars.size() + cids.size();
    if (acyclic) {
      TreeCounter<C> counter(clauses, var_clauses);
      result *= counter.total(vars.front());
      if (result == 0) return result;
      continue;
    }
    if (depth >= kMaxBranchVariables)
      throw TooLarge("exact counting: cyclic neighborhood needs more than " +
                     std::to_string(kMaxBranchVariables) + " conditioned variables");

    std::vector<CountClause> comp;
    comp.reserve(cids.size());
    for (std::uint32_t c : cids) comp.push_back(clauses[c]);
    const Var v = pick_branch_variable(clauses, vars, var_clauses);
    std::vector<Var> rest;
    rest.reserve(vars.size() - 1);
    for (Var w : vars)
      if (w != v) rest.push_back(w);

    C branch_sum(0);
    for (int value = 0; value < 2; ++value) {
      std::vector<CountClause> reduced = comp;
      if (fix_variable(reduced, v, value != 0))
        branch_sum += count_models<C>(std::move(reduced), rest, num_local_vars, depth + 1);
    }
    result *= branch_sum;
    if (result == 0) return result;
  }
  return result;
}

BigCount to_big(SmallCount x) {
  BigCount hi(static_cast<std::uint64_t>(x >> 64));
  return (hi << 64) + BigCount(static_cast<std::uint64_t>(x));
}

BigCount count_free(std::vector<CountClause> clauses, std::vector<Var> free_vars,
                    std::size_t num_local_vars) {
  if (free_vars.size() <= 127)
    return to_big(count_models<SmallCount>(std::move(clauses), std::move(free_vars), num_local_vars, 0));
  return count_models<BigCount>(std::move(clauses), std::move(free_vars), num_local_vars, 0);
}

std::vector<CountClause> to_count_clauses(const Formula& phi) {
  std::vector<CountClause> out;
  out.reserve(phi.num_clauses());
  for (const Clause& c : phi.clauses()) out.push_back({c.literals, c.sign});
  return out;
}

// a / s as a double for 0 <= a <= s, s > 0, keeping ~60 significant bits.
double big_ratio(const BigCount& a, const BigCount& s) {
  const std::size_t bits = boost::multiprecision::msb(s) + 1;
  if (bits <= 60) return a.convert_to<double>() / s.convert_to<double>();
  const std::size_t shift = bits - 60;
  const BigCount as = a >> shift;
  const BigCount ss = s >> shift;
  return as.convert_to<double>() / ss.convert_to<double>();
}

}  // namespace

BigCount count_satisfying(const Formula& phi) {
  std::vector<Var> vars(phi.num_vars());
  std::iota(vars.begin(), vars.end(), Var{0});
  return count_free(to_count_clauses(phi), vars, phi.num_vars());
}

bool is_forest(const Formula& phi) {
  // A graph is a forest iff every union joins two different components.
  const std::size_t nv = phi.num_vars();
  UnionFind uf(nv + phi.num_clauses());
  for (std::size_t c = 0; c < phi.num_clauses(); ++c) {
    const auto cnode = static_cast<std::uint32_t>(nv + c);
    for (const Literal& l : phi.clause(c).literals) {
      const auto a = uf.find(l.var);
      const auto b = uf.find(cnode);
      if (a == b) return false;
      uf.parent[a] = b;
    }
  }
  return true;
}

double Marginal::mu() const {
  if (count0 == 0) {
    return count1 == 0 ? std::numeric_limits<double>::quiet_NaN()
                       : std::numeric_limits<double>::infinity();
  }
  const BigCount total = count0 + count1;
  const double p1 = big_ratio(count1, total);
  const double p0 = big_ratio(count0, total);
  return p1 / p0;
}

double Marginal::tau() const { return tau_from_counts(count1, count0); }

double tau_from_counts(const BigCount& count1, const BigCount& count0) {
  if (count1 == count0) return 0.5;  // covers the unsatisfiable 0/0 case
  const BigCount total = count1 + count0;
  // Always divide the smaller count so the complement (counts swapped) is
  // computed from the same quotient.
  if (count1 < count0) return big_ratio(count1, total);
  return 1.0 - big_ratio(count0, total);
}

Marginal exact_marginal(const Neighborhood& b) {
  const Formula& inst = b.instance;
  std::vector<Var> free_vars;
  free_vars.reserve(inst.num_vars());
  for (Var v = 1; v < inst.num_vars(); ++v) free_vars.push_back(v);
  Marginal m;
  for (int value = 0; value < 2; ++value) {
    const Formula fixed = inst.reduce(Neighborhood::root(), value != 0);
    BigCount count(0);
    if (fixed.violations() == inst.violations())
      count = count_free(to_count_clauses(fixed), free_vars, inst.num_vars());
    (value == 1 ? m.count1 : m.count0) = std::move(count);
  }
  return m;
}

double bp_messages(const Neighborhood& b, int rounds) {
  if (rounds < 1) throw InvalidParameters("bp_messages: rounds must be at least 1");
  const Formula& inst = b.instance;
  const std::size_t nv = inst.num_vars();

  // Edge e = (clause, position); var_edges[v] lists edges at variable v.
  std::vector<std::size_t> clause_offset(inst.num_clauses() + 1, 0);
  for (std::size_t c = 0; c < inst.num_clauses(); ++c)
    clause_offset[c + 1] = clause_offset[c] + inst.clause(c).width();
  const std::size_t ne = clause_offset.back();
  std::vector<std::vector<std::size_t>> var_edges(nv);
  std::vector<Var> edge_var(ne);
  for (std::size_t c = 0; c < inst.num_clauses(); ++c) {
    const auto& lits = inst.clause(c).literals;
    for (std::size_t i = 0; i < lits.size(); ++i) {
      var_edges[lits[i].var].push_back(clause_offset[c] + i);
      edge_var[clause_offset[c] + i] = lits[i].var;
    }
  }

  using Msg = std::array<double, 2>;
  auto normalize = [](Msg& m) {
    const double s = m[0] + m[1];
    if (s > 0) {
      m[0] /= s;
      m[1] /= s;
    } else {
      m = {0.5, 0.5};
    }
  };

  std::vector<Msg> to_var(ne, Msg{0.5, 0.5});
  std::vector<Msg> to_clause(ne, Msg{0.5, 0.5});

  for (int t = 0; t < rounds; ++t) {
    for (std::size_t e = 0; e < ne; ++e) {
      Msg m{1.0, 1.0};
      for (std::size_t f : var_edges[edge_var[e]]) {
        if (f == e) continue;
        m[0] *= to_var[f][0];
        m[1] *= to_var[f][1];
      }
      normalize(m);
      to_clause[e] = m;
    }
    for (std::size_t c = 0; c < inst.num_clauses(); ++c) {
      const Clause& clause = inst.clause(c);
      const std::size_t base = clause_offset[c];
      const std::size_t w = clause.width();
      for (std::size_t i = 0; i < w; ++i) {
        Msg out{0.0, 0.0};
        for (int value = 0; value < 2; ++value) {
          const int lp = (value != 0) != clause.literals[i].negated ? 1 : 0;
          const bool forbidden = clause.sign == Sign::neutral ||
                                 (clause.sign == Sign::plus && lp == 1) ||
                                 (clause.sign == Sign::minus && lp == 0);
          // Literal-value weights of the other positions.
          double total = 1.0;
          double sum_first_break = 0.0;  // sum over the first position != lp
          double prefix_equal = 1.0;
          // Suffix totals are needed for the cancellation-free expansion.
          std::vector<double> suffix(w + 1, 1.0);
          for (std::size_t j = w; j-- > 0;) {
            if (j == i) {
              suffix[j] = suffix[j + 1];
              continue;
            }
            const Msg& m = to_clause[base + j];
            suffix[j] = suffix[j + 1] * (m[0] + m[1]);
          }
          total = suffix[0];
          if (forbidden) {
            for (std::size_t j = 0; j < w; ++j) {
              if (j == i) continue;
              const Msg& m = to_clause[base + j];
              const bool neg = clause.literals[j].negated;
              const double a_eq = m[(lp == 1) != neg ? 1 : 0];
              const double a_ne = m[(lp == 1) != neg ? 0 : 1];
              sum_first_break += prefix_equal * a_ne * suffix[j + 1];
              prefix_equal *= a_eq;
            }
            out[value] = sum_first_break;
          } else {
            out[value] = total;
          }
        }
        normalize(out);
        to_var[base + i] = out;
      }
    }
  }

  Msg root{1.0, 1.0};
  for (std::size_t f : var_edges[Neighborhood::root()]) {
    root[0] *= to_var[f][0];
    root[1] *= to_var[f][1];
    const double s = root[0] + root[1];
    if (s > 0) {
      root[0] /= s;
      root[1] /= s;
    }
  }
  const double s = root[0] + root[1];
  if (!(s > 0)) return 0.5;
  return root[1] / s;
}

BpRule::BpRule(int radius) : radius_(radius) {
  if (radius < 2 || radius % 2 != 0) throw InvalidParameters("bp rule: radius must be even and >= 2");
}

double BpRule::evaluate(const Neighborhood& b, AuxStream&) const { return exact_marginal(b).tau(); }

std::unique_ptr<LocalRule> bp_rule(int radius) { return std::make_unique<BpRule>(radius); }

}  // namespace naesat
