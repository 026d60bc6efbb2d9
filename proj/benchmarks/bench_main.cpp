#include <benchmark/benchmark.h>

#include "naesat/bp.hpp"
#include "naesat/harness.hpp"
#include "naesat/influence.hpp"
#include "naesat/overlap.hpp"
#include "naesat/sp.hpp"

using namespace naesat;

namespace {

Formula instance(std::size_t n, double d) { return generate(n, 3, d, 17); }

void BM_NeighborhoodExtraction(benchmark::State& state) {
  const Formula phi = instance(10000, 2.0);
  const int r = static_cast<int>(state.range(0));
  Var x = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(neighborhood(phi, x, r));
    x = (x + 7919) % 10000;
  }
}
BENCHMARK(BM_NeighborhoodExtraction)->Arg(2)->Arg(4)->Arg(6);

void BM_WorkingNeighborhood(benchmark::State& state) {
  const Formula phi = instance(10000, 2.0);
  const WorkingFormula w(phi);
  Var x = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(w.neighborhood(x, static_cast<int>(state.range(0))));
    x = (x + 7919) % 10000;
  }
}
BENCHMARK(BM_WorkingNeighborhood)->Arg(2)->Arg(4);

void BM_ExactMarginal(benchmark::State& state) {
  Rng rng(3);
  std::vector<Neighborhood> pool;
  for (int i = 0; i < 64; ++i)
    pool.push_back(sample_reduced_neighborhood(2000, 3, 1.5, static_cast<int>(state.range(0)), 0.3, rng));
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(exact_marginal(pool[i++ % pool.size()]));
}
BENCHMARK(BM_ExactMarginal)->Arg(2)->Arg(4);

void BM_SpRule(benchmark::State& state) {
  Rng rng(4);
  const int rounds = static_cast<int>(state.range(0));
  const SpRule rule(rounds, SpRule::Kind::sample);
  std::vector<Neighborhood> pool;
  for (int i = 0; i < 64; ++i) pool.push_back(sample_reduced_neighborhood(2000, 3, 1.5, 2 * rounds, 0.3, rng));
  std::size_t i = 0;
  for (auto _ : state) {
    AuxStream aux(i, false);
    benchmark::DoNotOptimize(rule.evaluate(pool[i++ % pool.size()], aux));
  }
}
BENCHMARK(BM_SpRule)->Arg(1)->Arg(2)->Arg(3);

void BM_FullRun(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(1));
  const Formula phi = instance(n, 1.5);
  Rng rng(5);
  const Ordering z = draw_ordering(n, rng);
  const Seeds u = draw_seeds(n, rng);
  std::unique_ptr<LocalRule> rule;
  switch (state.range(0)) {
    case 0: rule = unit_clause_rule(); break;
    case 1: rule = bp_rule(2); break;
    default: rule = sp_rule(1); break;
  }
  state.SetLabel(rule->name());
  for (auto _ : state) benchmark::DoNotOptimize(run_assignment(phi, *rule, z, u));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_FullRun)->Args({0, 2000})->Args({1, 2000})->Args({2, 2000})->Unit(benchmark::kMillisecond);

void BM_InfluenceRange(benchmark::State& state) {
  const Formula phi = instance(2000, 1.5);
  Rng rng(6);
  const Ordering z = draw_ordering(2000, rng);
  const VariableGraph g(phi);
  Var x = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(influence_range(g, z, 2, x));
    x = (x + 131) % 2000;
  }
}
BENCHMARK(BM_InfluenceRange);

void BM_Census(benchmark::State& state) {
  const Formula phi = generate(static_cast<std::size_t>(state.range(0)), 3, 1.5, 9);
  const OverlapParams p{0.4, 0.15, 2};
  for (auto _ : state) benchmark::DoNotOptimize(census(phi, p));
}
BENCHMARK(BM_Census)->Arg(14)->Arg(18)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
