#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include "naesat/decimation.hpp"
#include "naesat/instance.hpp"

namespace naesat {

/// Edges of a neighborhood's factor graph, clause-major: clause order of the
/// instance, then literal order within each clause.
class SpEdges {
 public:
  explicit SpEdges(const Formula& phi);

  std::size_t size() const { return edge_var_.size(); }
  std::size_t clause_begin(std::size_t c) const { return offset_[c]; }
  std::size_t clause_end(std::size_t c) const { return offset_[c + 1]; }
  Var var(std::size_t e) const { return edge_var_[e]; }
  bool negated(std::size_t e) const { return edge_negated_[e]; }
  std::size_t clause(std::size_t e) const { return edge_clause_[e]; }
  /// Edges incident to v, in increasing edge (hence clause) order.
  const std::vector<std::size_t>& at_var(Var v) const { return var_edges_[v]; }

 private:
  std::vector<std::size_t> offset_;
  std::vector<Var> edge_var_;
  std::vector<bool> edge_negated_;
  std::vector<std::size_t> edge_clause_;
  std::vector<std::vector<std::size_t>> var_edges_;
};

/// Raw uniform draws for one edge before normalization.
struct SpEdgeDraw {
  double var_s = 0;
  double var_u = 0;
  double var_star = 0;
  double clause_s = 0;
  double clause_u = 0;
  friend bool operator==(const SpEdgeDraw&, const SpEdgeDraw&) = default;
};

struct SpInit {
  std::vector<SpEdgeDraw> edges;
  friend bool operator==(const SpInit&, const SpInit&) = default;
};

/// Per edge, in order: var_s, var_u, var_star, clause_s, clause_u.
SpInit draw_sp_init(std::size_t edges, AuxStream& aux);
SpInit draw_sp_init(std::size_t edges, Rng& rng);
/// S and U draws exchanged on every edge; star draws untouched.
SpInit swap_init(const SpInit& init);

enum SpRole { kS = 0, kU = 1, kStar = 2 };

struct SpState {
  std::vector<std::array<double, 3>> to_clause;  // Q_{x,C,S}, Q_{x,C,U}, Q_{x,C,*}
  std::vector<std::array<double, 2>> to_var;     // Q_{C,x,S}, Q_{C,x,U}
  int iteration = 0;
  friend bool operator==(const SpState&, const SpState&) = default;
};

/// Normalized t = 0 state. Throws InvalidInit when the init does not cover
/// exactly the edges of b.
SpState sp_init(const Formula& b, const SpInit& init);
/// One synchronous round.
SpState sp_iterate(const SpState& state, const Formula& b);
/// S and U exchanged on every message.
SpState mirror(const SpState& state);

struct WFields {
  double w1 = 0;
  double w0 = 0;
  double wstar = 1;
  friend bool operator==(const WFields&, const WFields&) = default;
};

/// Normalized fields of every variable of b.
std::vector<WFields> sp_fields(const SpState& state, const Formula& b);
WFields sp_field(const SpState& state, const Formula& b, Var x);

/// Messages after `rounds` iterations from `init`, then the root field.
WFields sp_root_field(const Neighborhood& b, const SpInit& init, int rounds);

/// Per-iteration states as JSON: {"edges":[[clause,var,negated],...],
/// "states":[{"t":..,"to_clause":[[S,U,*],..],"to_var":[[S,U],..]},..],
/// "root_field":[W1,W0,W*]}.
std::string sp_trajectory_json(const Neighborhood& b, const SpInit& init, int rounds);

/// SP-guided decision: one fresh init per call, `rounds` iterations on
/// B(x, 2 rounds). Sample mode returns the bit W(1) > W(0), a coin on exact
/// ties. Estimate mode returns the fraction of `samples` inits with
/// W(1) > W(0), ties counting one half. A mirrored aux stream applies
/// swap_init to every init and flips the tie coin.
class SpRule final : public LocalRule {
 public:
  enum class Kind { sample, estimate };
  SpRule(int rounds, Kind kind, std::size_t samples = 1);

  std::string name() const override { return "sp"; }
  int radius() const override { return 2 * rounds_; }
  Mode mode() const override { return kind_ == Kind::sample ? Mode::sampling : Mode::probability; }
  double evaluate(const Neighborhood& b, AuxStream& aux) const override;

  int rounds() const { return rounds_; }
  Kind kind() const { return kind_; }
  std::size_t samples() const { return samples_; }

 private:
  int rounds_;
  Kind kind_;
  std::size_t samples_;
};

std::unique_ptr<LocalRule> sp_rule(int rounds);
std::unique_ptr<LocalRule> sp_estimate_rule(int rounds, std::size_t samples);

}  // namespace naesat
