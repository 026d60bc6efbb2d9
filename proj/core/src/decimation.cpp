#include "naesat/decimation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <nlohmann/json.hpp>

#include "naesat/errors.hpp"

namespace naesat {

Ordering::Ordering(std::vector<double> weights) : weights_(std::move(weights)) {
  const std::size_t n = weights_.size();
  order_.resize(n);
  std::iota(order_.begin(), order_.end(), Var{0});
  std::sort(order_.begin(), order_.end(), [this](Var a, Var b) {
    if (weights_[a] != weights_[b]) return weights_[a] > weights_[b];
    return a > b;
  });
  rank_.resize(n);
  for (std::size_t t = 0; t < n; ++t) rank_[order_[t]] = t;
}

Ordering draw_ordering(std::size_t n, Rng& rng) {
  if (n == 0) throw InvalidParameters("draw_ordering: n must be at least 1");
  std::vector<double> w(n);
  for (double& x : w) x = rng.uniform01();
  return Ordering(std::move(w));
}

Seeds draw_seeds(std::size_t n, Rng& rng) {
  Seeds seeds(n);
  for (DecisionSeed& s : seeds) {
    s.u = rng.uniform_open();
    s.aux = rng.next();
  }
  return seeds;
}

Seeds complemented(const Seeds& seeds) {
  Seeds out = seeds;
  for (DecisionSeed& s : out) {
    s.u = 1.0 - s.u;
    s.mirrored = !s.mirrored;
  }
  return out;
}

Rng& AuxStream::rng() {
  if (!rng_) rng_.emplace(seed_);
  return *rng_;
}

double AuxStream::uniform01() { return rng().uniform01(); }
bool AuxStream::coin() { return rng().coin(); }

FunctionRule::FunctionRule(std::string name, int radius, Fn fn, Mode mode)
    : name_(std::move(name)), radius_(radius), fn_(std::move(fn)), mode_(mode) {
  if (radius_ < 0 || radius_ % 2 != 0) throw InvalidParameters("rule radius must be even");
}

std::unique_ptr<LocalRule> constant_rule(double tau, int radius) {
  if (!(tau >= 0.0 && tau <= 1.0)) throw InvalidParameters("constant rule: tau outside [0, 1]");
  return std::make_unique<FunctionRule>(
      "const", radius, [tau](const Neighborhood&, AuxStream&) { return tau; });
}

double UnitClauseRule::evaluate(const Neighborhood& b, AuxStream&) const {
  bool force_one = false;
  bool force_zero = false;
  for (const Clause& c : b.instance.clauses()) {
    if (c.width() != 1 || c.literals[0].var != Neighborhood::root()) continue;
    // A minus clause needs its literal at 1, a plus clause needs it at 0.
    const bool literal_target = c.sign == Sign::minus;
    const bool root_target = literal_target != c.literals[0].negated;
    (root_target ? force_one : force_zero) = true;
  }
  if (force_one && !force_zero) return 1.0;
  if (force_zero && !force_one) return 0.0;
  return 0.5;
}

std::unique_ptr<LocalRule> unit_clause_rule() { return std::make_unique<UnitClauseRule>(); }

namespace {

RunTrace run_impl(const Formula& phi, const LocalRule& rule, const Ordering& z, const Seeds& u,
                  const RunOptions& options, bool keep_steps) {
  const std::size_t n = phi.num_vars();
  if (z.size() != n) throw InvalidParameters("run: ordering length differs from n");
  if (u.size() != n) throw InvalidParameters("run: seed vector length differs from n");
  const int r = rule.radius();
  if (r < 0 || r % 2 != 0) throw InvalidParameters("run: rule radius must be even");

  WorkingFormula work(phi);
  RunTrace trace;
  trace.assignment = Assignment(n);
  trace.order = z.order();
  if (keep_steps) trace.steps.reserve(n);

  for (Var x : z.order()) {
    const Neighborhood b = work.neighborhood(x, r);
    AuxStream aux(u[x].aux, u[x].mirrored);
    const double tau = rule.evaluate(b, aux);
    if (!(tau >= 0.0 && tau <= 1.0))
      throw Error("rule '" + rule.name() + "' returned a value outside [0, 1]");
    const bool value = u[x].u <= tau;
    const auto effect = work.assign(x, value);
    trace.assignment.set(x, value);
    if (keep_steps) {
      StepRecord step;
      step.variable = x;
      step.tau = tau;
      step.u = u[x].u;
      step.value = value;
      step.satisfied = effect.satisfied;
      step.violated = effect.violated;
      step.shortened = effect.shortened;
      if (options.record_neighborhoods) step.neighborhood = serialize(b.instance);
      trace.steps.push_back(std::move(step));
    }
    if (options.stop_after && *options.stop_after == x) break;
  }
  trace.violations = work.violations();
  return trace;
}

}  // namespace

RunTrace run(const Formula& phi, const LocalRule& rule, const Ordering& z, const Seeds& u,
             const RunOptions& options) {
  return run_impl(phi, rule, z, u, options, true);
}

Assignment run_assignment(const Formula& phi, const LocalRule& rule, const Ordering& z,
                          const Seeds& u) {
  return run_impl(phi, rule, z, u, {}, false).assignment;
}

std::string trace_to_jsonl(const RunTrace& trace) {
  std::string out;
  for (std::size_t i = 0; i < trace.steps.size(); ++i) {
    const StepRecord& s = trace.steps[i];
    nlohmann::json j = {{"step", i},
                        {"var", s.variable + 1},
                        {"tau", s.tau},
                        {"u", s.u},
                        {"value", s.value ? 1 : 0},
                        {"satisfied", s.satisfied},
                        {"violated", s.violated},
                        {"shortened", s.shortened}};
    if (!s.neighborhood.empty()) j["neighborhood"] = s.neighborhood;
    out += j.dump();
    out += '\n';
  }
  return out;
}

BalanceReport check_balance(const LocalRule& rule, const NeighborhoodSampler& sampler,
                            std::size_t count, Rng& rng, double tolerance) {
  if (count == 0) throw InvalidParameters("check_balance: count must be at least 1");
  BalanceReport report;
  for (std::size_t i = 0; i < count; ++i) {
    const Neighborhood b = sampler(rng);
    const Neighborhood bbar = complement(b);
    const std::uint64_t seed = rng.next();
    AuxStream plain(seed, false);
    AuxStream mirrored(seed, true);
    const double tau = rule.evaluate(b, plain);
    const double tau_bar = rule.evaluate(bbar, mirrored);
    const double dev = std::abs(tau_bar - (1.0 - tau));
    ++report.checked;
    report.max_deviation = std::max(report.max_deviation, dev);
    if (dev > tolerance && report.balanced) {
      report.balanced = false;
      report.witness = b;
    }
  }
  return report;
}

}  // namespace naesat
