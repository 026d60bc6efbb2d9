#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "naesat/decimation.hpp"
#include "naesat/instance.hpp"

namespace naesat {

/// G(phi): variables adjacent iff they share a clause. Adjacency lists are
/// sorted and duplicate-free.
class VariableGraph {
 public:
  explicit VariableGraph(const Formula& phi);

  std::size_t size() const { return adj_.size(); }
  const std::vector<Var>& neighbors(Var v) const { return adj_[v]; }

  /// Variables within `max_hops` of `source` (source included), BFS order.
  std::vector<Var> ball(Var source, std::size_t max_hops) const;
  /// Number of variables at each hop distance 0..max_hops from source.
  std::vector<std::size_t> level_sizes(Var source, std::size_t max_hops) const;

 private:
  std::vector<Var> bfs(Var source, std::size_t max_hops, std::vector<std::size_t>* levels) const;

  std::vector<std::vector<Var>> adj_;
};

struct InfluenceSet {
  Var source = 0;
  std::vector<Var> members;  // sorted, always contains source

  bool contains(Var v) const;
  std::size_t size() const { return members.size(); }
};

/// IR_x: x plus every y reachable by a chain whose consecutive members are
/// within `hops` hops in G and whose ordering weights strictly decrease (each
/// member decided after the previous one). Pass the rule radius as `hops`.
InfluenceSet influence_range(const VariableGraph& g, const Ordering& z, std::size_t hops, Var x);
InfluenceSet influence_range(const Formula& phi, const Ordering& z, std::size_t hops, Var x);

struct InfluenceStats {
  std::size_t max_size = 0;
  Var argmax = 0;
  std::map<std::size_t, std::size_t> histogram;  // |IR| -> number of variables
};

InfluenceStats max_influence_stats(const Formula& phi, const Ordering& z, std::size_t hops);

/// Variables whose decision differs between the runs with seeds u and u2.
/// The seed vectors must differ in exactly one coordinate (a coordinate is a
/// whole DecisionSeed); throws InvalidParameters otherwise. Equal vectors
/// give the empty set.
std::vector<Var> diff_set(const Formula& phi, const Ordering& z, const Seeds& u, const Seeds& u2,
                          const LocalRule& rule);

struct BallGrowthRow {
  std::size_t t = 0;
  double mean = 0;
  std::size_t min = 0;
  std::size_t max = 0;
};

/// |B(x, t)| in G for t = 0..t_max over the given roots, counting x itself.
std::vector<BallGrowthRow> ball_growth(const Formula& phi, std::size_t t_max,
                                       const std::vector<Var>& roots);

/// CSV with header "t,mean,min,max".
std::string ball_growth_csv(const std::vector<BallGrowthRow>& rows);
/// CSV with header "size,count".
std::string histogram_csv(const InfluenceStats& stats);

}  // namespace naesat
