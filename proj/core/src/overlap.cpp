#include "naesat/overlap.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <limits>

#include <nlohmann/json.hpp>

#include "naesat/errors.hpp"

namespace naesat {

namespace {

// Above this many solutions the pairwise window graph is not materialized.
constexpr std::size_t kMaxCensusSolutions = 1U << 16;

struct MaskClause {
  std::uint32_t vars = 0;     // variables of the clause
  std::uint32_t positive = 0; // variables occurring unnegated
  Sign sign = Sign::neutral;
};

bool mask_clause_ok(const MaskClause& c, std::uint32_t sigma) {
  // Literal value of v is sigma_v XOR negated_v; positive bits mark
  // unnegated literals, so the true literals are ~(sigma ^ positive).
  const std::uint32_t true_lits = ~(sigma ^ c.positive) & c.vars;
  const bool some_true = true_lits != 0;
  const bool some_false = true_lits != c.vars;
  switch (c.sign) {
    case Sign::neutral:
      return some_true && some_false;
    case Sign::plus:
      return some_false;
    case Sign::minus:
      return some_true;
  }
  return false;
}

// Depth-first over variables n-1 down to 0, value 0 before 1, so solutions
// arrive in increasing numeric order. `visit` returns false to stop.
void for_each_solution(const Formula& phi, const std::function<bool(std::uint32_t)>& visit) {
  const std::size_t n = phi.num_vars();
  if (n > kMaxCensusVars)
    throw TooLarge("exhaustive enumeration is limited to " + std::to_string(kMaxCensusVars) +
                   " variables, got " + std::to_string(n));
  // Clauses grouped by their lowest variable: complete once it is assigned.
  std::vector<std::vector<MaskClause>> by_min(n);
  for (const Clause& c : phi.clauses()) {
    MaskClause mc;
    mc.sign = c.sign;
    Var lowest = c.literals.front().var;
    for (const Literal& l : c.literals) {
      mc.vars |= 1U << l.var;
      if (!l.negated) mc.positive |= 1U << l.var;
      lowest = std::min(lowest, l.var);
    }
    by_min[lowest].push_back(mc);
  }
  if (n == 0) {
    visit(0);
    return;
  }
  bool stop = false;
  std::function<void(std::size_t, std::uint32_t)> rec = [&](std::size_t i, std::uint32_t sigma) {
    for (std::uint32_t value = 0; value < 2 && !stop; ++value) {
      const std::uint32_t s = sigma | (value << i);
      bool ok = true;
      for (const MaskClause& c : by_min[i])
        if (!mask_clause_ok(c, s)) {
          ok = false;
          break;
        }
      if (!ok) continue;
      if (i == 0) {
        if (!visit(s)) stop = true;
      } else {
        rec(i - 1, s);
      }
    }
  };
  rec(n - 1, 0);
}

double log_big(const BigCount& x) {
  const std::size_t bits = boost::multiprecision::msb(x) + 1;
  if (bits <= 60) return std::log(x.convert_to<double>());
  const std::size_t shift = bits - 60;
  const BigCount top = x >> shift;
  return std::log(top.convert_to<double>()) + static_cast<double>(shift) * std::log(2.0);
}

}  // namespace

void OverlapParams::validate() const {
  if (!(eta > 0 && eta < beta && beta < 1))
    throw InvalidParameters("overlap parameters need 0 < eta < beta < 1");
  if (m < 1) throw InvalidParameters("overlap parameters need m >= 1");
}

bool OverlapParams::within_half() const { return beta - eta >= 0 && beta <= 0.5; }

OverlapParams default_params(double k, double eps) {
  if (!(k >= 2)) throw InvalidParameters("default_params: K must be at least 2");
  if (!(eps > 0 && eps < 1)) throw InvalidParameters("default_params: eps must lie in (0, 1)");
  const double lk = std::log(k);
  OverlapParams p;
  p.beta = lk / k;
  p.eta = p.beta * p.beta;
  p.m = static_cast<std::size_t>(std::ceil(eps * eps * k / lk));
  return p;
}

DistanceWindow distance_window(std::size_t n, const OverlapParams& p) {
  const double nn = static_cast<double>(n);
  const double lo = std::ceil((p.beta - p.eta) * nn - 1e-9);
  const double hi = std::floor(p.beta * nn + 1e-9);
  DistanceWindow w;
  w.lo = lo <= 0 ? 0 : static_cast<std::size_t>(lo);
  if (hi < 0) {
    w.lo = 1;
    w.hi = 0;
  } else {
    w.hi = static_cast<std::size_t>(hi);
  }
  return w;
}

std::vector<std::uint32_t> enumerate_solutions(const Formula& phi) {
  std::vector<std::uint32_t> out;
  for_each_solution(phi, [&out](std::uint32_t s) {
    out.push_back(s);
    return true;
  });
  return out;
}

bool is_satisfiable(const Formula& phi) {
  bool found = false;
  for_each_solution(phi, [&found](std::uint32_t) {
    found = true;
    return false;
  });
  return found;
}

Assignment mask_to_assignment(std::uint32_t mask, std::size_t n) {
  std::vector<bool> bits(n);
  for (std::size_t v = 0; v < n; ++v) bits[v] = ((mask >> v) & 1U) != 0;
  return Assignment::from_bits(bits);
}

CensusResult census(const Formula& phi, const OverlapParams& p, bool count) {
  p.validate();
  const std::size_t n = phi.num_vars();
  const std::vector<std::uint32_t> sols = enumerate_solutions(phi);
  CensusResult result;
  result.solutions = sols.size();
  const DistanceWindow w = distance_window(n, p);

  if (p.m == 1) {
    result.empty = sols.empty();
    if (!sols.empty()) result.witness.push_back(mask_to_assignment(sols.front(), n));
    if (count) result.tuples = BigCount(sols.size());
    return result;
  }
  if (sols.size() > kMaxCensusSolutions)
    throw TooLarge("census: " + std::to_string(sols.size()) + " solutions exceed the pair graph limit");

  // Window graph as bitsets; i is its own neighbor only when 0 is allowed.
  const std::size_t s = sols.size();
  const std::size_t words = (s + 63) / 64;
  std::vector<std::uint64_t> adj(s * words, 0);
  for (std::size_t i = 0; i < s; ++i)
    for (std::size_t j = 0; j < s; ++j)
      if (w.contains(static_cast<std::size_t>(std::popcount(sols[i] ^ sols[j]))))
        adj[i * words + j / 64] |= std::uint64_t{1} << (j % 64);

  std::vector<std::uint64_t> all(words, 0);
  for (std::size_t j = 0; j < s; ++j) all[j / 64] |= std::uint64_t{1} << (j % 64);

  auto intersect = [&](const std::vector<std::uint64_t>& cands, std::size_t i) {
    std::vector<std::uint64_t> out(words);
    for (std::size_t k = 0; k < words; ++k) out[k] = cands[k] & adj[i * words + k];
    return out;
  };
  auto popcount_all = [&](const std::vector<std::uint64_t>& cands) {
    std::size_t c = 0;
    for (std::uint64_t x : cands) c += static_cast<std::size_t>(std::popcount(x));
    return c;
  };

  // Ordered tuples extending a prefix whose common window-neighbors are `cands`.
  std::function<BigCount(const std::vector<std::uint64_t>&, std::size_t)> count_from =
      [&](const std::vector<std::uint64_t>& cands, std::size_t depth) -> BigCount {
    if (depth + 1 == p.m) return BigCount(popcount_all(cands));
    BigCount total(0);
    for (std::size_t k = 0; k < words; ++k)
      for (std::uint64_t bits = cands[k]; bits != 0; bits &= bits - 1) {
        const std::size_t i = k * 64 + static_cast<std::size_t>(std::countr_zero(bits));
        total += count_from(intersect(cands, i), depth + 1);
      }
    return total;
  };

  std::vector<std::size_t> prefix;
  std::function<bool(const std::vector<std::uint64_t>&)> find_from =
      [&](const std::vector<std::uint64_t>& cands) -> bool {
    for (std::size_t k = 0; k < words; ++k)
      for (std::uint64_t bits = cands[k]; bits != 0; bits &= bits - 1) {
        const std::size_t i = k * 64 + static_cast<std::size_t>(std::countr_zero(bits));
        prefix.push_back(i);
        if (prefix.size() == p.m || find_from(intersect(cands, i))) return true;
        prefix.pop_back();
      }
    return false;
  };

  if (find_from(all)) {
    result.empty = false;
    for (std::size_t i : prefix) result.witness.push_back(mask_to_assignment(sols[i], n));
  }
  if (count) result.tuples = result.empty ? BigCount(0) : count_from(all, 0);
  return result;
}

double pair_unsat_prob(std::size_t k, double x) {
  if (!(x >= 0 && x <= 1)) throw InvalidParameters("pair_unsat_prob: x outside [0, 1]");
  if (k < 2) throw InvalidParameters("pair_unsat_prob: K must be at least 2");
  const double kk = static_cast<double>(k);
  return std::ldexp(std::pow(x, kk) + std::pow(1.0 - x, kk), 1 - static_cast<int>(k));
}

FirstMomentBound first_moment_bound(std::size_t n, std::size_t k, double d, const OverlapParams& p) {
  p.validate();
  if (k < 2) throw InvalidParameters("first_moment_bound: K must be at least 2");
  if (!(d >= 0)) throw InvalidParameters("first_moment_bound: density must be nonnegative");
  FirstMomentBound out;
  out.clauses = static_cast<std::size_t>(std::floor(d * static_cast<double>(n) + 1e-9));

  const DistanceWindow w = distance_window(n, p);
  BigCount sum(0);
  if (!w.empty()) {
    BigCount binom(1);  // C(n, r), advanced incrementally
    for (std::size_t r = 0; r <= std::min(w.hi, n); ++r) {
      if (r > 0) binom = binom * (n - r + 1) / r;
      if (r >= w.lo) sum += binom;
    }
  }
  const double log_pow2 = static_cast<double>(n) * std::log(2.0);
  const double m = static_cast<double>(p.m);
  if (p.m > 1) {
    if (sum == 0) {
      out.log_distance_sum = -std::numeric_limits<double>::infinity();
    } else {
      out.log_distance_sum = log_big(sum);
    }
  }

  const double q = std::ldexp(1.0, 1 - static_cast<int>(k));
  const double kk = static_cast<double>(k);
  auto g = [kk](double x) { return std::pow(x, kk) + std::pow(1.0 - x, kk); };
  // g is convex, so its maximum over the interval sits at an endpoint.
  const double gmax = std::max(g(p.beta - p.eta), g(p.beta));
  out.per_clause = 1.0 - m * q + (m * (m - 1.0) / 2.0) * q * gmax;
  out.valid = out.per_clause > 0 && out.per_clause <= 1;
  if (!out.valid) {
    out.log_bound = std::numeric_limits<double>::infinity();
    return out;
  }
  const double tuples = p.m > 1 ? (m - 1.0) * out.log_distance_sum : 0.0;
  out.log_bound = log_pow2 + tuples + static_cast<double>(out.clauses) * std::log(out.per_clause);
  return out;
}

Seeds interpolation_seeds(const Seeds& u0, const Seeds& uj, const Ordering& z, std::size_t t) {
  if (u0.size() != z.size() || uj.size() != z.size())
    throw InvalidParameters("interpolation_seeds: seed vectors must match the ordering");
  if (t > z.size()) throw InvalidParameters("interpolation_seeds: t exceeds n");
  Seeds v = u0;
  for (std::size_t s = 0; s < t; ++s) {
    const Var x = z.order()[s];
    v[x] = uj[x];
  }
  return v;
}

TupleReport emit_tuple(const Formula& phi, const LocalRule& rule, const Ordering& z,
                       const OverlapParams& p, const std::vector<Seeds>& u, std::size_t t) {
  if (u.size() != p.m) throw InvalidParameters("emit_tuple: need exactly m seed vectors");
  TupleReport report;
  report.params = p;
  report.n = phi.num_vars();
  report.t0 = t;
  report.assignments.push_back(run_assignment(phi, rule, z, u[0]));
  for (std::size_t j = 1; j < p.m; ++j)
    report.assignments.push_back(run_assignment(phi, rule, z, interpolation_seeds(u[0], u[j], z, t)));

  const DistanceWindow w = distance_window(report.n, p);
  report.all_satisfying = true;
  report.window_respected = true;
  report.distances.assign(p.m, std::vector<std::size_t>(p.m, 0));
  for (std::size_t j = 0; j < p.m; ++j) {
    if (!evaluate(phi, report.assignments[j]).sat) report.all_satisfying = false;
    for (std::size_t k = j + 1; k < p.m; ++k) {
      const std::size_t d = hamming(report.assignments[j], report.assignments[k]);
      report.distances[j][k] = report.distances[k][j] = d;
      if (!w.contains(d)) report.window_respected = false;
    }
  }
  return report;
}

TupleReport interpolate(const Formula& phi, const LocalRule& rule, const Ordering& z,
                        const OverlapParams& p, Rng& rng, const InterpolationOptions& options) {
  p.validate();
  const std::size_t n = phi.num_vars();
  if (z.size() != n) throw InvalidParameters("interpolate: ordering length differs from n");
  if (options.replicates < 2) throw InvalidParameters("interpolate: need at least 2 replicates");

  const double target = (p.beta - p.eta / 2.0) * static_cast<double>(n);
  if (p.m == 1) {
    TupleReport report = emit_tuple(phi, rule, z, p, {draw_seeds(n, rng)}, 0);
    report.target_lo = target;
    report.target_hi = target;
    return report;
  }

  // Common random numbers: every candidate t reuses the same replicate pairs.
  const std::size_t reps = options.replicates;
  std::vector<Seeds> base(reps);
  std::vector<Seeds> other(reps);
  std::vector<Assignment> base_runs(reps);
  for (std::size_t r = 0; r < reps; ++r) {
    base[r] = draw_seeds(n, rng);
    other[r] = draw_seeds(n, rng);
    base_runs[r] = run_assignment(phi, rule, z, base[r]);
  }

  struct Estimate {
    double mean = 0;
    double se = 0;
  };
  std::vector<std::optional<Estimate>> cache(n + 1);
  auto estimate = [&](std::size_t t) -> Estimate {
    if (cache[t]) return *cache[t];
    double sum = 0;
    double sum_sq = 0;
    for (std::size_t r = 0; r < reps; ++r) {
      const Assignment s = run_assignment(phi, rule, z, interpolation_seeds(base[r], other[r], z, t));
      const double d = static_cast<double>(hamming(base_runs[r], s));
      sum += d;
      sum_sq += d * d;
    }
    const double rr = static_cast<double>(reps);
    const double mean = sum / rr;
    const double var = std::max(0.0, (sum_sq - rr * mean * mean) / (rr - 1.0));
    cache[t] = Estimate{mean, std::sqrt(var / rr)};
    return *cache[t];
  };
  auto slack_at = [&](const Estimate& e) {
    if (options.slack) return *options.slack;
    return std::max(std::cbrt(static_cast<double>(n)), 2.0 * e.se);
  };
  auto in_window = [&](const Estimate& e) {
    return e.mean >= target && e.mean <= target + slack_at(e);
  };

  if (estimate(n).mean < target)
    throw WindowUnreachable("interpolate: full replacement reaches mean distance " +
                            std::to_string(estimate(n).mean) + " < target " + std::to_string(target));

  // Stride scan to the first grid point at or above the target, then a
  // linear pass from the previous grid point.
  const auto stride = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(n))));
  std::size_t start = 0;
  for (std::size_t t = 0;; t = std::min(n, t + stride)) {
    if (estimate(t).mean >= target) break;
    start = t;
    if (t == n) break;
  }
  std::optional<std::size_t> t0;
  for (std::size_t t = start; t <= n; ++t) {
    if (in_window(estimate(t))) {
      t0 = t;
      break;
    }
  }
  if (!t0)
    throw WindowUnreachable("interpolate: no t has its distance estimate inside [" +
                            std::to_string(target) + ", target + slack]");

  std::vector<Seeds> u(p.m);
  for (Seeds& s : u) s = draw_seeds(n, rng);
  TupleReport report = emit_tuple(phi, rule, z, p, u, *t0);
  const Estimate e = estimate(*t0);
  report.estimate = e.mean;
  report.standard_error = e.se;
  report.target_lo = target;
  report.target_hi = target + slack_at(e);
  return report;
}

std::string tuple_report_json(const TupleReport& report) {
  nlohmann::json j;
  j["params"] = {{"beta", report.params.beta}, {"eta", report.params.eta}, {"m", report.params.m}};
  j["n"] = report.n;
  j["t0"] = report.t0;
  j["estimate"] = report.estimate;
  j["standard_error"] = report.standard_error;
  j["target"] = {report.target_lo, report.target_hi};
  j["assignments"] = nlohmann::json::array();
  for (const Assignment& a : report.assignments) j["assignments"].push_back(a.to_string());
  j["distances"] = report.distances;
  j["all_satisfying"] = report.all_satisfying;
  j["window_respected"] = report.window_respected;
  return j.dump(2);
}

}  // namespace naesat
