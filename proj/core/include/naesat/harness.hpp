#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "naesat/decimation.hpp"
#include "naesat/instance.hpp"
#include "naesat/rng.hpp"

namespace naesat {

enum class Algorithm { uc, bp, sp };

Algorithm parse_algorithm(const std::string& name);
std::string algorithm_name(Algorithm a);

struct ExperimentConfig {
  Algorithm algorithm = Algorithm::uc;
  std::size_t k = 3;
  std::size_t n = 100;
  std::vector<double> densities{1.0};
  int rounds = 1;  // bp radius 2*rounds; sp iterations
  std::size_t trials = 100;
  std::uint64_t seed = 1;
  bool sp_estimate = false;
  std::size_t sp_samples = 1;
  bool timing = false;   // record wall-clock (breaks byte reproducibility)
  std::size_t threads = 0;  // 0: hardware concurrency, capped by NAESAT_THREADS

  /// Throws InvalidParameters.
  void validate() const;
};

std::unique_ptr<LocalRule> make_rule(const ExperimentConfig& config);

struct ResultRecord {
  double density = 0;
  std::size_t trials = 0;
  std::size_t successes = 0;
  double alpha = 0;
  double ci_lo = 0;
  double ci_hi = 0;
  double mean_violations = 0;
  std::size_t max_violations = 0;
  std::optional<double> wall_seconds;
};

/// Test seams: a rule replacing make_rule(config) and a formula source
/// replacing the random generator.
struct Hooks {
  std::shared_ptr<const LocalRule> rule;
  std::function<Formula(std::size_t trial, Rng& rng)> formula;
};

/// Trial streams for one density. The factory's master is derived from the
/// config seed and the density's grid position; each trial i uses labels
/// "phi/i", "z/i", "u/i" and "spinit/i/x" (aux seed of variable x).
StreamFactory density_streams(std::uint64_t master, std::size_t grid_index);
Seeds trial_seeds(const StreamFactory& streams, std::size_t trial, std::size_t n);

struct TrialOutcome {
  bool success = false;
  std::size_t violations = 0;
};

TrialOutcome run_trial(const Formula& phi, const LocalRule& rule, const Ordering& z, const Seeds& u);

ResultRecord estimate_alpha(const ExperimentConfig& config, std::size_t grid_index,
                            const Hooks& hooks = {});
std::vector<ResultRecord> density_sweep(const ExperimentConfig& config, const Hooks& hooks = {});

/// Wilson score interval.
std::pair<double, double> wilson_interval(std::size_t successes, std::size_t trials,
                                          double z = 1.959963984540054);

/// min(requested or hardware concurrency, NAESAT_THREADS if set), at least 1.
std::size_t worker_count(std::size_t requested);

/// Calls fn(i) for i in [0, count) on up to `workers` threads. The first
/// exception thrown by fn is rethrown after all workers stop.
void parallel_for(std::size_t count, std::size_t workers, const std::function<void(std::size_t)>& fn);

std::string records_csv(const ExperimentConfig& config, const std::vector<ResultRecord>& records);
std::string records_json(const ExperimentConfig& config, const std::vector<ResultRecord>& records);

struct SatisfiabilityRecord {
  double density = 0;
  std::size_t instances = 0;
  std::size_t satisfiable = 0;
  double fraction() const {
    return instances == 0 ? 0.0 : static_cast<double>(satisfiable) / static_cast<double>(instances);
  }
};

/// Exhaustive satisfiability frequency of fresh instances per density
/// (instance i at grid point j from label "sat/j/i").
std::vector<SatisfiabilityRecord> satisfiability_sweep(std::size_t n, std::size_t k,
                                                       const std::vector<double>& densities,
                                                       std::size_t instances, std::uint64_t seed,
                                                       std::size_t threads = 0);

/// Density at which the satisfiable fraction first drops to 1/2 or below,
/// linearly interpolated between grid points; nullopt if it never does.
std::optional<double> half_crossing(const std::vector<SatisfiabilityRecord>& records);

/// 2^(K-1) ln 2 - ln 2 / 2 - 1/4.
double asymptotic_threshold(std::size_t k);

/// Fixed-format double for reproducible text output.
std::string format_double(double x);

}  // namespace naesat
