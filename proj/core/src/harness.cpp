#include "naesat/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "naesat/bp.hpp"
#include "naesat/errors.hpp"
#include "naesat/overlap.hpp"
#include "naesat/sp.hpp"

namespace naesat {

Algorithm parse_algorithm(const std::string& name) {
  if (name == "uc") return Algorithm::uc;
  if (name == "bp") return Algorithm::bp;
  if (name == "sp") return Algorithm::sp;
  throw InvalidParameters("unknown algorithm '" + name + "' (expected uc, bp or sp)");
}

std::string algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::uc:
      return "uc";
    case Algorithm::bp:
      return "bp";
    case Algorithm::sp:
      return "sp";
  }
  return "?";
}

void ExperimentConfig::validate() const {
  if (k < 2) throw InvalidParameters("K must be at least 2");
  if (n < 1) throw InvalidParameters("n must be at least 1");
  if (n < k) throw InvalidParameters("n must be at least K");
  if (densities.empty()) throw InvalidParameters("density grid is empty");
  for (double d : densities)
    if (!(d >= 0) || !std::isfinite(d)) throw InvalidParameters("densities must be finite and >= 0");
  if (rounds < 1) throw InvalidParameters("rounds must be at least 1");
  if (trials < 1) throw InvalidParameters("trials must be at least 1");
  if (sp_estimate && sp_samples < 1) throw InvalidParameters("sp estimate mode needs samples >= 1");
}

std::unique_ptr<LocalRule> make_rule(const ExperimentConfig& config) {
  switch (config.algorithm) {
    case Algorithm::uc:
      return unit_clause_rule();
    case Algorithm::bp:
      return bp_rule(2 * config.rounds);
    case Algorithm::sp:
      return config.sp_estimate ? sp_estimate_rule(config.rounds, config.sp_samples)
                                : sp_rule(config.rounds);
  }
  throw InvalidParameters("unknown algorithm");
}

StreamFactory density_streams(std::uint64_t master, std::size_t grid_index) {
  return StreamFactory(StreamFactory(master).seed_for("density/" + std::to_string(grid_index)));
}

Seeds trial_seeds(const StreamFactory& streams, std::size_t trial, std::size_t n) {
  const std::string t = std::to_string(trial);
  Rng u = streams.stream("u/" + t);
  Seeds seeds(n);
  const std::string prefix = "spinit/" + t + "/";
  for (std::size_t x = 0; x < n; ++x) {
    seeds[x].u = u.uniform_open();
    seeds[x].aux = streams.seed_for(prefix + std::to_string(x));
  }
  return seeds;
}

TrialOutcome run_trial(const Formula& phi, const LocalRule& rule, const Ordering& z, const Seeds& u) {
  const RunTrace trace = run(phi, rule, z, u);
  TrialOutcome out;
  out.violations = trace.violations;
  // The engine keeps going past violations; re-evaluate on the original.
  out.success = trace.violations == 0 && evaluate(phi, trace.assignment).sat;
  return out;
}

std::size_t worker_count(std::size_t requested) {
  std::size_t w = requested;
  if (w == 0) w = std::max(1U, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("NAESAT_THREADS")) {
    char* end = nullptr;
    const unsigned long cap = std::strtoul(env, &end, 10);
    if (end != env && *end == '\0' && cap > 0) w = std::min<std::size_t>(w, cap);
  }
  return std::max<std::size_t>(1, w);
}

void parallel_for(std::size_t count, std::size_t workers, const std::function<void(std::size_t)>& fn) {
  workers = std::max<std::size_t>(1, std::min(workers, count));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto work = [&] {
    for (;;) {
      if (failed.load()) return;
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        failed.store(true);
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t t = 0; t < workers; ++t) pool.emplace_back(work);
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

ResultRecord estimate_alpha(const ExperimentConfig& config, std::size_t grid_index, const Hooks& hooks) {
  config.validate();
  if (grid_index >= config.densities.size()) throw InvalidParameters("density index out of range");
  const double d = config.densities[grid_index];
  std::shared_ptr<const LocalRule> rule = hooks.rule;
  if (!rule) rule = make_rule(config);
  const StreamFactory streams = density_streams(config.seed, grid_index);

  const auto start = std::chrono::steady_clock::now();
  std::vector<TrialOutcome> outcomes(config.trials);
  parallel_for(config.trials, worker_count(config.threads), [&](std::size_t i) {
    const std::string t = std::to_string(i);
    Rng phi_rng = streams.stream("phi/" + t);
    const Formula phi =
        hooks.formula ? hooks.formula(i, phi_rng) : generate(config.n, config.k, d, phi_rng);
    Rng z_rng = streams.stream("z/" + t);
    const Ordering z = draw_ordering(phi.num_vars(), z_rng);
    outcomes[i] = run_trial(phi, *rule, z, trial_seeds(streams, i, phi.num_vars()));
  });

  ResultRecord rec;
  rec.density = d;
  rec.trials = config.trials;
  double violation_sum = 0;
  for (const TrialOutcome& o : outcomes) {
    if (o.success) ++rec.successes;
    violation_sum += static_cast<double>(o.violations);
    rec.max_violations = std::max(rec.max_violations, o.violations);
  }
  rec.alpha = static_cast<double>(rec.successes) / static_cast<double>(rec.trials);
  std::tie(rec.ci_lo, rec.ci_hi) = wilson_interval(rec.successes, rec.trials);
  rec.mean_violations = violation_sum / static_cast<double>(rec.trials);
  if (config.timing)
    rec.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

std::vector<ResultRecord> density_sweep(const ExperimentConfig& config, const Hooks& hooks) {
  config.validate();
  std::vector<ResultRecord> out;
  out.reserve(config.densities.size());
  for (std::size_t j = 0; j < config.densities.size(); ++j)
    out.push_back(estimate_alpha(config, j, hooks));
  return out;
}

std::pair<double, double> wilson_interval(std::size_t successes, std::size_t trials, double z) {
  if (trials == 0) return {0.0, 1.0};
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double centre = (p + z2 / (2.0 * n)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  const double lo = successes == 0 ? 0.0 : std::max(0.0, centre - half);
  const double hi = successes == trials ? 1.0 : std::min(1.0, centre + half);
  return {lo, hi};
}

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

std::string records_csv(const ExperimentConfig& config, const std::vector<ResultRecord>& records) {
  std::ostringstream out;
  out << "algorithm,k,n,rounds,density,trials,successes,alpha,ci_lo,ci_hi,mean_violations,"
         "max_violations";
  if (config.timing) out << ",wall_seconds";
  out << '\n';
  for (const ResultRecord& r : records) {
    out << algorithm_name(config.algorithm) << ',' << config.k << ',' << config.n << ','
        << config.rounds << ',' << format_double(r.density) << ',' << r.trials << ','
        << r.successes << ',' << format_double(r.alpha) << ',' << format_double(r.ci_lo) << ','
        << format_double(r.ci_hi) << ',' << format_double(r.mean_violations) << ','
        << r.max_violations;
    if (config.timing) out << ',' << format_double(r.wall_seconds.value_or(0.0));
    out << '\n';
  }
  return out.str();
}

std::string records_json(const ExperimentConfig& config, const std::vector<ResultRecord>& records) {
  nlohmann::json j;
  j["config"] = {{"algorithm", algorithm_name(config.algorithm)},
                 {"k", config.k},
                 {"n", config.n},
                 {"densities", config.densities},
                 {"rounds", config.rounds},
                 {"trials", config.trials},
                 {"seed", config.seed},
                 {"sp_mode", config.sp_estimate ? "estimate" : "sample"},
                 {"sp_samples", config.sp_samples}};
  j["records"] = nlohmann::json::array();
  for (const ResultRecord& r : records) {
    nlohmann::json rec = {{"density", r.density},
                          {"trials", r.trials},
                          {"successes", r.successes},
                          {"alpha", r.alpha},
                          {"ci", {r.ci_lo, r.ci_hi}},
                          {"mean_violations", r.mean_violations},
                          {"max_violations", r.max_violations}};
    if (r.wall_seconds) rec["wall_seconds"] = *r.wall_seconds;
    j["records"].push_back(rec);
  }
  return j.dump(2) + "\n";
}

std::vector<SatisfiabilityRecord> satisfiability_sweep(std::size_t n, std::size_t k,
                                                       const std::vector<double>& densities,
                                                       std::size_t instances, std::uint64_t seed,
                                                       std::size_t threads) {
  const StreamFactory streams(seed);
  std::vector<SatisfiabilityRecord> out;
  for (std::size_t j = 0; j < densities.size(); ++j) {
    std::vector<char> sat(instances, 0);
    parallel_for(instances, worker_count(threads), [&](std::size_t i) {
      Rng rng = streams.stream("sat/" + std::to_string(j) + "/" + std::to_string(i));
      sat[i] = is_satisfiable(generate(n, k, densities[j], rng)) ? 1 : 0;
    });
    SatisfiabilityRecord rec;
    rec.density = densities[j];
    rec.instances = instances;
    rec.satisfiable = static_cast<std::size_t>(std::count(sat.begin(), sat.end(), 1));
    out.push_back(rec);
  }
  return out;
}

std::optional<double> half_crossing(const std::vector<SatisfiabilityRecord>& records) {
  for (std::size_t j = 0; j < records.size(); ++j) {
    const double f = records[j].fraction();
    if (f > 0.5) continue;
    if (j == 0) return records[0].density;
    const double f0 = records[j - 1].fraction();
    const double d0 = records[j - 1].density;
    const double d1 = records[j].density;
    return d0 + (f0 - 0.5) / (f0 - f) * (d1 - d0);
  }
  return std::nullopt;
}

double asymptotic_threshold(std::size_t k) {
  const double ln2 = std::log(2.0);
  return std::ldexp(1.0, static_cast<int>(k) - 1) * ln2 - ln2 / 2.0 - 0.25;
}

}  // namespace naesat
