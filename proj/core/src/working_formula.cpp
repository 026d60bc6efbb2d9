#include <algorithm>
#include <string>

#include "naesat/errors.hpp"
#include "naesat/instance.hpp"

namespace naesat {

WorkingFormula::WorkingFormula(const Formula& phi)
    : n_(phi.num_vars()),
      k_(phi.k()),
      clauses_(phi.clauses()),
      alive_(phi.num_clauses(), true),
      occurs_(phi.num_vars()),
      assigned_(phi.num_vars(), false),
      violations_(phi.violations()),
      touched_(phi.origin() == Origin::reduced),
      var_stamp_(phi.num_vars(), 0),
      var_local_(phi.num_vars(), 0),
      clause_stamp_(phi.num_clauses(), 0) {
  for (std::size_t c = 0; c < clauses_.size(); ++c)
    for (const Literal& l : clauses_[c].literals)
      occurs_[l.var].push_back(static_cast<std::uint32_t>(c));
}

WorkingFormula::StepEffect WorkingFormula::assign(Var x, bool value) {
  if (x >= n_) throw InvalidParameters("assign: variable out of range");
  if (assigned_[x]) throw InvalidParameters("assign: variable already fixed");
  assigned_[x] = true;
  touched_ = true;
  StepEffect effect;
  for (std::uint32_t c : occurs_[x]) {
    if (!alive_[c]) continue;
    Clause& clause = clauses_[c];
    auto it = std::find_if(clause.literals.begin(), clause.literals.end(),
                           [x](const Literal& l) { return l.var == x; });
    const bool literal_value = it->value_under(value);
    const auto removal = remove_literal(clause.sign, literal_value, clause.literals.size() - 1);
    switch (removal.kind) {
      case LiteralRemoval::Kind::satisfied:
        alive_[c] = false;
        ++effect.satisfied;
        break;
      case LiteralRemoval::Kind::violated:
        alive_[c] = false;
        ++effect.violated;
        ++violations_;
        break;
      case LiteralRemoval::Kind::shortened:
        clause.literals.erase(it);
        clause.sign = removal.sign;
        ++effect.shortened;
        break;
    }
  }
  occurs_[x].clear();
  occurs_[x].shrink_to_fit();
  return effect;
}

Neighborhood WorkingFormula::neighborhood(Var x, int r) const {
  if (r < 0 || r % 2 != 0) throw InvalidParameters("neighborhood radius must be even and >= 0");
  if (x >= n_) throw InvalidParameters("neighborhood: root out of range");

  if (++epoch_ == 0) {
    std::fill(var_stamp_.begin(), var_stamp_.end(), 0);
    std::fill(clause_stamp_.begin(), clause_stamp_.end(), 0);
    epoch_ = 1;
  }

  std::vector<Var> to_parent{x};
  std::vector<Clause> local_clauses;
  var_stamp_[x] = epoch_;
  var_local_[x] = 0;

  // Frontier expansion two factor-graph levels (clause + variable) at a time.
  std::vector<Var> frontier{x};
  std::vector<Var> next;
  for (int depth = 0; depth < r; depth += 2) {
    next.clear();
    for (Var v : frontier) {
      for (std::uint32_t c : occurs_[v]) {
        if (!alive_[c] || clause_stamp_[c] == epoch_) continue;
        clause_stamp_[c] = epoch_;
        const Clause& parent = clauses_[c];
        for (const Literal& l : parent.literals) {
          if (var_stamp_[l.var] == epoch_) continue;
          var_stamp_[l.var] = epoch_;
          var_local_[l.var] = static_cast<std::uint32_t>(to_parent.size());
          to_parent.push_back(l.var);
          next.push_back(l.var);
        }
        Clause local{parent.id, {}, parent.sign};
        local.literals.reserve(parent.literals.size());
        for (const Literal& l : parent.literals)
          local.literals.push_back({var_local_[l.var], l.negated});
        local_clauses.push_back(std::move(local));
      }
    }
    frontier.swap(next);
    if (frontier.empty()) break;
  }

  Neighborhood b;
  b.root_in_parent = x;
  b.radius = r;
  const std::size_t local_n = to_parent.size();
  b.instance = Formula(local_n, k_, std::move(local_clauses),
                       touched_ ? Origin::reduced : Origin::fresh, 0);
  b.to_parent = std::move(to_parent);
  return b;
}

Formula WorkingFormula::snapshot() const {
  std::vector<Clause> out;
  for (std::size_t c = 0; c < clauses_.size(); ++c)
    if (alive_[c]) out.push_back(clauses_[c]);
  return Formula(n_, k_, std::move(out), touched_ ? Origin::reduced : Origin::fresh, violations_);
}

}  // namespace naesat
