#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "naesat/bp.hpp"
#include "naesat/decimation.hpp"
#include "naesat/instance.hpp"

namespace naesat {

/// Tuples of m solutions whose pairwise distances lie in [(beta - eta) n, beta n].
struct OverlapParams {
  double beta = 0;
  double eta = 0;
  std::size_t m = 1;

  /// Throws InvalidParameters unless 0 < eta < beta < 1 and m >= 1.
  void validate() const;
  /// [beta - eta, beta] within [0, 1/2], as the interpolation requires.
  bool within_half() const;
};

/// beta = ln K / K, eta = beta^2, m = ceil(eps^2 K / ln K).
OverlapParams default_params(double k, double eps);

/// Integer distances lo..hi allowed between tuple members.
struct DistanceWindow {
  std::size_t lo = 0;
  std::size_t hi = 0;
  bool empty() const { return lo > hi; }
  bool contains(std::size_t d) const { return lo <= d && d <= hi; }
};

/// lo = ceil((beta - eta) n), hi = floor(beta n), with 1e-9 slack against
/// representation error at exact integers.
DistanceWindow distance_window(std::size_t n, const OverlapParams& p);

inline constexpr std::size_t kMaxCensusVars = 26;

/// Satisfying assignments as bit masks (bit v = value of variable v), in
/// increasing numeric order. Throws TooLarge above kMaxCensusVars.
std::vector<std::uint32_t> enumerate_solutions(const Formula& phi);
bool is_satisfiable(const Formula& phi);
Assignment mask_to_assignment(std::uint32_t mask, std::size_t n);

struct CensusResult {
  bool empty = true;
  std::size_t solutions = 0;
  /// Ordered m-tuples (sigma^1..sigma^m) in the window; set when counting.
  std::optional<BigCount> tuples;
  std::vector<Assignment> witness;  // first tuple in enumeration order
};

/// Decides whether SAT(phi; beta, eta, m) is empty. With `count`, also
/// counts the ordered tuples.
CensusResult census(const Formula& phi, const OverlapParams& p, bool count = true);

/// 2^(1-K) (x^K + (1-x)^K): a uniform random clause (variables drawn with
/// replacement) is NAE-violated by both of two assignments at normalized
/// distance x.
double pair_unsat_prob(std::size_t k, double x);

struct FirstMomentBound {
  double log_bound = 0;          // natural log of the bound on E[#tuples]
  double log_distance_sum = 0;   // ln sum_{r in window} C(n, r)
  double per_clause = 0;         // Bonferroni per-clause factor
  std::size_t clauses = 0;       // floor(d n)
  bool valid = true;             // per_clause in (0, 1]
};

/// ln[2^n (sum_{r in window} C(n, r))^(m-1)] + floor(d n) ln[1 - m 2^(1-K)
/// + C(m, 2) 2^(1-K) max_{x in [beta-eta, beta]} (x^K + (1-x)^K)].
/// When the Bonferroni factor is not in (0, 1], valid is false and
/// log_bound is +inf.
FirstMomentBound first_moment_bound(std::size_t n, std::size_t k, double d, const OverlapParams& p);

/// Seeds of V^{t}: the first t coordinates in decision order from `uj`,
/// the rest from `u0`.
Seeds interpolation_seeds(const Seeds& u0, const Seeds& uj, const Ordering& z, std::size_t t);

struct InterpolationOptions {
  std::size_t replicates = 20;
  /// Fixed slack; default max(n^(1/3), 2 SE) per candidate t.
  std::optional<double> slack;
};

struct TupleReport {
  OverlapParams params;
  std::size_t n = 0;
  std::size_t t0 = 0;
  double estimate = 0;        // estimated E[rho(sigma_U0, sigma_V)] at t0
  double standard_error = 0;
  double target_lo = 0;       // (beta - eta/2) n
  double target_hi = 0;       // target_lo + slack
  std::vector<Assignment> assignments;
  std::vector<std::vector<std::size_t>> distances;
  bool all_satisfying = false;
  bool window_respected = false;
};

/// Runs sigma^0 on U^0 and sigma^j on V^{t,j} for j = 1..m-1 and fills the
/// tuple fields of a report.
TupleReport emit_tuple(const Formula& phi, const LocalRule& rule, const Ordering& z,
                       const OverlapParams& p, const std::vector<Seeds>& u, std::size_t t);

/// Selects t0 as the smallest t whose replicate estimate of
/// E[rho(sigma_U0, sigma_V^t)] lies in the target window, then emits the
/// tuple at t0 from fresh U^0..U^{m-1}. Throws WindowUnreachable when no t
/// qualifies.
TupleReport interpolate(const Formula& phi, const LocalRule& rule, const Ordering& z,
                        const OverlapParams& p, Rng& rng, const InterpolationOptions& options = {});

std::string tuple_report_json(const TupleReport& report);

}  // namespace naesat
