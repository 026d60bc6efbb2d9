#include "naesat/sp.hpp"

#include <algorithm>

#include <nlohmann/json.hpp>

#include "naesat/errors.hpp"

namespace naesat {

SpEdges::SpEdges(const Formula& phi) : offset_(phi.num_clauses() + 1, 0), var_edges_(phi.num_vars()) {
  for (std::size_t c = 0; c < phi.num_clauses(); ++c) {
    offset_[c + 1] = offset_[c] + phi.clause(c).width();
    for (const Literal& l : phi.clause(c).literals) {
      var_edges_[l.var].push_back(edge_var_.size());
      edge_var_.push_back(l.var);
      edge_negated_.push_back(l.negated);
      edge_clause_.push_back(c);
    }
  }
}

namespace {

template <typename Draw>
SpInit draw_init_with(std::size_t edges, Draw&& draw) {
  SpInit init;
  init.edges.resize(edges);
  for (SpEdgeDraw& d : init.edges) {
    d.var_s = draw();
    d.var_u = draw();
    d.var_star = draw();
    d.clause_s = draw();
    d.clause_u = draw();
  }
  return init;
}

void normalize(std::array<double, 3>& q) {
  const double sum = (q[kS] + q[kU]) + q[kStar];
  if (!(sum > 0)) {
    q = {0.0, 0.0, 1.0};
    return;
  }
  for (double& v : q) v /= sum;
}

void normalize(std::array<double, 2>& q) {
  const double sum = q[kS] + q[kU];
  if (!(sum > 0)) {
    q = {0.5, 0.5};
    return;
  }
  for (double& v : q) v /= sum;
}

// Products of incoming clause messages at one variable, split by whether the
// clause uses the same polarity as `reference`. Computed in edge order so
// that exchanging S and U exchanges the products bit for bit.
struct FieldProducts {
  double same_not_s = 1.0;   // prod over same polarity of (1 - Q_S)
  double same_not_u = 1.0;   // prod over same polarity of (1 - Q_U)
  double other_not_s = 1.0;  // prod over opposite polarity of (1 - Q_S)
  double other_not_u = 1.0;  // prod over opposite polarity of (1 - Q_U)
  double star = 1.0;         // prod over all of (1 - (Q_S + Q_U))
};

FieldProducts field_products(const SpState& state, const SpEdges& edges, Var x, bool reference,
                             std::size_t skip) {
  FieldProducts p;
  for (std::size_t f : edges.at_var(x)) {
    if (f == skip) continue;
    const auto& q = state.to_var[f];
    if (edges.negated(f) == reference) {
      p.same_not_s *= 1.0 - q[kS];
      p.same_not_u *= 1.0 - q[kU];
    } else {
      p.other_not_s *= 1.0 - q[kS];
      p.other_not_u *= 1.0 - q[kU];
    }
    p.star *= std::max(0.0, 1.0 - (q[kS] + q[kU]));  // rounding can push Q_S + Q_U past 1
  }
  return p;
}

void check_state(const SpState& state, const SpEdges& edges) {
  if (state.to_clause.size() != edges.size() || state.to_var.size() != edges.size())
    throw InvalidParameters("sp: state does not match the neighborhood's edges");
}

}  // namespace

SpInit draw_sp_init(std::size_t edges, AuxStream& aux) {
  return draw_init_with(edges, [&aux] { return aux.uniform01(); });
}

SpInit draw_sp_init(std::size_t edges, Rng& rng) {
  return draw_init_with(edges, [&rng] { return rng.uniform01(); });
}

SpInit swap_init(const SpInit& init) {
  SpInit out = init;
  for (SpEdgeDraw& d : out.edges) {
    std::swap(d.var_s, d.var_u);
    std::swap(d.clause_s, d.clause_u);
  }
  return out;
}

SpState sp_init(const Formula& b, const SpInit& init) {
  const SpEdges edges(b);
  if (init.edges.size() != edges.size())
    throw InvalidInit("sp_init: init has " + std::to_string(init.edges.size()) +
                      " edge draws, neighborhood has " + std::to_string(edges.size()) + " edges");
  SpState state;
  state.to_clause.resize(edges.size());
  state.to_var.resize(edges.size());
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const SpEdgeDraw& d = init.edges[e];
    for (double v : {d.var_s, d.var_u, d.var_star, d.clause_s, d.clause_u})
      if (!(v >= 0.0 && v <= 1.0)) throw InvalidInit("sp_init: draw outside [0, 1]");
    state.to_clause[e] = {d.var_s, d.var_u, d.var_star};
    normalize(state.to_clause[e]);
    state.to_var[e] = {d.clause_s, d.clause_u};
    normalize(state.to_var[e]);
  }
  return state;
}

SpState sp_iterate(const SpState& state, const Formula& b) {
  const SpEdges edges(b);
  check_state(state, edges);
  SpState next;
  next.iteration = state.iteration + 1;
  next.to_var.resize(edges.size());
  next.to_clause.resize(edges.size());

  for (std::size_t c = 0; c < b.num_clauses(); ++c) {
    const Sign sign = b.clause(c).sign;
    for (std::size_t e = edges.clause_begin(c); e < edges.clause_end(c); ++e) {
      double all_u = 1.0;  // every other literal forced not to satisfy C
      double all_s = 1.0;  // every other literal forced to satisfy C
      for (std::size_t f = edges.clause_begin(c); f < edges.clause_end(c); ++f) {
        if (f == e) continue;
        all_u *= state.to_clause[f][kU];
        all_s *= state.to_clause[f][kS];
      }
      switch (sign) {
        case Sign::neutral:
          next.to_var[e] = {all_u, all_s};
          break;
        case Sign::plus:
          next.to_var[e] = {0.0, all_s};
          break;
        case Sign::minus:
          next.to_var[e] = {all_u, 0.0};
          break;
      }
    }
  }

  for (std::size_t e = 0; e < edges.size(); ++e) {
    const FieldProducts p = field_products(state, edges, edges.var(e), edges.negated(e), e);
    std::array<double, 3> r{
        std::max(0.0, p.other_not_s * p.same_not_u - p.star),
        std::max(0.0, p.other_not_u * p.same_not_s - p.star),
        p.star,
    };
    normalize(r);
    next.to_clause[e] = r;
  }
  return next;
}

SpState mirror(const SpState& state) {
  SpState out = state;
  for (auto& q : out.to_clause) std::swap(q[kS], q[kU]);
  for (auto& q : out.to_var) std::swap(q[kS], q[kU]);
  return out;
}

WFields sp_field(const SpState& state, const Formula& b, Var x) {
  const SpEdges edges(b);
  check_state(state, edges);
  // Reference polarity "not negated": same = S_x, other = U_x.
  const FieldProducts p = field_products(state, edges, x, false, edges.size());
  WFields w;
  w.w1 = std::max(0.0, p.other_not_s * p.same_not_u - p.star);
  w.w0 = std::max(0.0, p.same_not_s * p.other_not_u - p.star);
  w.wstar = p.star;
  const double sum = (w.w1 + w.w0) + w.wstar;
  if (!(sum > 0)) return WFields{0.0, 0.0, 1.0};
  w.w1 /= sum;
  w.w0 /= sum;
  w.wstar /= sum;
  return w;
}

std::vector<WFields> sp_fields(const SpState& state, const Formula& b) {
  std::vector<WFields> out;
  out.reserve(b.num_vars());
  for (Var x = 0; x < b.num_vars(); ++x) out.push_back(sp_field(state, b, x));
  return out;
}

WFields sp_root_field(const Neighborhood& b, const SpInit& init, int rounds) {
  SpState state = sp_init(b.instance, init);
  for (int t = 0; t < rounds; ++t) state = sp_iterate(state, b.instance);
  return sp_field(state, b.instance, Neighborhood::root());
}

std::string sp_trajectory_json(const Neighborhood& b, const SpInit& init, int rounds) {
  const SpEdges edges(b.instance);
  nlohmann::json j;
  j["edges"] = nlohmann::json::array();
  for (std::size_t e = 0; e < edges.size(); ++e)
    j["edges"].push_back({edges.clause(e), edges.var(e), edges.negated(e)});
  j["states"] = nlohmann::json::array();
  SpState state = sp_init(b.instance, init);
  for (int t = 0;; ++t) {
    j["states"].push_back(
        {{"t", state.iteration}, {"to_clause", state.to_clause}, {"to_var", state.to_var}});
    if (t == rounds) break;
    state = sp_iterate(state, b.instance);
  }
  const WFields w = sp_field(state, b.instance, Neighborhood::root());
  j["root_field"] = {w.w1, w.w0, w.wstar};
  return j.dump();
}

SpRule::SpRule(int rounds, Kind kind, std::size_t samples)
    : rounds_(rounds), kind_(kind), samples_(samples) {
  if (rounds < 1) throw InvalidParameters("sp rule: rounds must be at least 1");
  if (kind == Kind::estimate && samples < 1)
    throw InvalidParameters("sp rule: estimate mode needs at least one sample");
}

double SpRule::evaluate(const Neighborhood& b, AuxStream& aux) const {
  const std::size_t num_edges = SpEdges(b.instance).size();
  auto one_draw = [&]() -> int {
    SpInit init = draw_sp_init(num_edges, aux);
    if (aux.mirrored()) init = swap_init(init);
    const WFields w = sp_root_field(b, init, rounds_);
    if (w.w1 > w.w0) return 2;
    if (w.w1 < w.w0) return 0;
    return 1;
  };
  if (kind_ == Kind::sample) {
    const int outcome = one_draw();
    if (outcome != 1) return outcome == 2 ? 1.0 : 0.0;
    return (aux.coin() != aux.mirrored()) ? 1.0 : 0.0;
  }
  std::size_t halves = 0;  // 2 per win, 1 per tie
  for (std::size_t i = 0; i < samples_; ++i) halves += static_cast<std::size_t>(one_draw());
  return static_cast<double>(halves) / static_cast<double>(2 * samples_);
}

std::unique_ptr<LocalRule> sp_rule(int rounds) {
  return std::make_unique<SpRule>(rounds, SpRule::Kind::sample);
}

std::unique_ptr<LocalRule> sp_estimate_rule(int rounds, std::size_t samples) {
  return std::make_unique<SpRule>(rounds, SpRule::Kind::estimate, samples);
}

}  // namespace naesat
