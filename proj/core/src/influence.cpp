#include "naesat/influence.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

#include "naesat/errors.hpp"

namespace naesat {

VariableGraph::VariableGraph(const Formula& phi) : adj_(phi.num_vars()) {
  for (const Clause& c : phi.clauses())
    for (const Literal& a : c.literals)
      for (const Literal& b : c.literals)
        if (a.var != b.var) adj_[a.var].push_back(b.var);
  for (auto& list : adj_) {
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
  }
}

std::vector<Var> VariableGraph::ball(Var source, std::size_t max_hops) const {
  return bfs(source, max_hops, nullptr);
}

std::vector<std::size_t> VariableGraph::level_sizes(Var source, std::size_t max_hops) const {
  std::vector<std::size_t> levels(max_hops + 1, 0);
  bfs(source, max_hops, &levels);
  return levels;
}

std::vector<Var> VariableGraph::bfs(Var source, std::size_t max_hops,
                                    std::vector<std::size_t>* levels) const {
  constexpr auto kUnseen = std::numeric_limits<std::size_t>::max();
  std::vector<Var> out{source};
  std::vector<std::size_t> dist(adj_.size(), kUnseen);
  dist[source] = 0;
  for (std::size_t head = 0; head < out.size(); ++head) {
    const Var v = out[head];
    if (levels) ++(*levels)[dist[v]];
    if (dist[v] == max_hops) continue;
    for (Var w : adj_[v]) {
      if (dist[w] != kUnseen) continue;
      dist[w] = dist[v] + 1;
      out.push_back(w);
    }
  }
  return out;
}

bool InfluenceSet::contains(Var v) const {
  return std::binary_search(members.begin(), members.end(), v);
}

InfluenceSet influence_range(const VariableGraph& g, const Ordering& z, std::size_t hops, Var x) {
  if (hops < 1) throw InvalidParameters("influence_range: hop radius must be at least 1");
  if (z.size() != g.size()) throw InvalidParameters("influence_range: ordering length differs from n");
  std::vector<bool> reached(g.size(), false);
  std::vector<Var> work{x};
  reached[x] = true;
  // Hop-limited BFS around each member; `seen` is stamped per search.
  std::vector<std::uint32_t> seen(g.size(), 0);
  std::vector<std::pair<Var, std::size_t>> frontier;
  std::uint32_t stamp = 0;
  for (std::size_t head = 0; head < work.size(); ++head) {
    const Var y = work[head];
    ++stamp;
    frontier.assign(1, {y, 0});
    seen[y] = stamp;
    for (std::size_t f = 0; f < frontier.size(); ++f) {
      const auto [v, dist] = frontier[f];
      if (!reached[v] && z.precedes(y, v)) {
        reached[v] = true;
        work.push_back(v);
      }
      if (dist == hops) continue;
      for (Var w : g.neighbors(v)) {
        if (seen[w] == stamp) continue;
        seen[w] = stamp;
        frontier.emplace_back(w, dist + 1);
      }
    }
  }
  std::sort(work.begin(), work.end());
  return InfluenceSet{x, std::move(work)};
}

InfluenceSet influence_range(const Formula& phi, const Ordering& z, std::size_t hops, Var x) {
  return influence_range(VariableGraph(phi), z, hops, x);
}

InfluenceStats max_influence_stats(const Formula& phi, const Ordering& z, std::size_t hops) {
  const VariableGraph g(phi);
  InfluenceStats stats;
  for (Var x = 0; x < phi.num_vars(); ++x) {
    const std::size_t s = influence_range(g, z, hops, x).size();
    ++stats.histogram[s];
    if (s > stats.max_size) {
      stats.max_size = s;
      stats.argmax = x;
    }
  }
  return stats;
}

std::vector<Var> diff_set(const Formula& phi, const Ordering& z, const Seeds& u, const Seeds& u2,
                          const LocalRule& rule) {
  if (u.size() != phi.num_vars() || u2.size() != phi.num_vars())
    throw InvalidParameters("diff_set: seed vectors must have length n");
  std::size_t differing = 0;
  for (std::size_t i = 0; i < u.size(); ++i)
    if (!(u[i] == u2[i])) ++differing;
  if (differing == 0) return {};
  if (differing != 1)
    throw InvalidParameters("diff_set: seed vectors differ in " + std::to_string(differing) +
                            " coordinates, expected exactly one");
  const Assignment a = run_assignment(phi, rule, z, u);
  const Assignment b = run_assignment(phi, rule, z, u2);
  std::vector<Var> out;
  for (Var v = 0; v < phi.num_vars(); ++v)
    if (a[v] != b[v]) out.push_back(v);
  return out;
}

std::vector<BallGrowthRow> ball_growth(const Formula& phi, std::size_t t_max,
                                       const std::vector<Var>& roots) {
  if (roots.empty()) throw InvalidParameters("ball_growth: no roots");
  const VariableGraph g(phi);
  std::vector<BallGrowthRow> rows(t_max + 1);
  for (std::size_t t = 0; t <= t_max; ++t) {
    rows[t].t = t;
    rows[t].min = std::numeric_limits<std::size_t>::max();
  }
  std::vector<double> sums(t_max + 1, 0.0);
  for (Var x : roots) {
    if (x >= g.size()) throw InvalidParameters("ball_growth: root out of range");
    const std::vector<std::size_t> per_level = g.level_sizes(x, t_max);
    std::size_t cumulative = 0;
    for (std::size_t t = 0; t <= t_max; ++t) {
      cumulative += per_level[t];
      sums[t] += static_cast<double>(cumulative);
      rows[t].min = std::min(rows[t].min, cumulative);
      rows[t].max = std::max(rows[t].max, cumulative);
    }
  }
  for (std::size_t t = 0; t <= t_max; ++t) rows[t].mean = sums[t] / static_cast<double>(roots.size());
  return rows;
}

std::string ball_growth_csv(const std::vector<BallGrowthRow>& rows) {
  std::ostringstream out;
  out << "t,mean,min,max\n";
  out.precision(10);
  for (const auto& r : rows) out << r.t << ',' << r.mean << ',' << r.min << ',' << r.max << '\n';
  return out.str();
}

std::string histogram_csv(const InfluenceStats& stats) {
  std::ostringstream out;
  out << "size,count\n";
  for (const auto& [size, count] : stats.histogram) out << size << ',' << count << '\n';
  return out.str();
}

}  // namespace naesat
