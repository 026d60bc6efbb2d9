#include <cmath>
#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "naesat/bp.hpp"
#include "naesat/decimation.hpp"
#include "naesat/errors.hpp"
#include "naesat/harness.hpp"
#include "naesat/influence.hpp"
#include "naesat/instance.hpp"
#include "naesat/overlap.hpp"
#include "naesat/sp.hpp"

using namespace naesat;
using nlohmann::json;

namespace {

constexpr int kExitInvalid = 2;
constexpr int kExitIo = 3;

struct Common {
  std::uint64_t seed = 1;
  std::string out;
  std::string format = "csv";
};

// Instance source shared by the subcommands that act on one formula.
struct Source {
  std::string in;
  std::size_t n = 100;
  std::size_t k = 3;
  double density = 1.0;

  Formula load(Rng& rng) const {
    if (!in.empty()) return read_formula_file(in);
    return generate(n, k, density, rng);
  }
};

void add_common(CLI::App* cmd, Common& c, const std::vector<std::string>& formats) {
  cmd->add_option("--seed", c.seed, "Master seed");
  cmd->add_option("--out", c.out, "Output file (default stdout)");
  cmd->add_option("--format", c.format, "Output format")->check(CLI::IsMember(formats));
}

void add_source(CLI::App* cmd, Source& s) {
  cmd->add_option("--in", s.in, "Read the instance from a file instead of generating one");
  cmd->add_option("-n,--vars", s.n, "Variables of a generated instance");
  cmd->add_option("-k,--width", s.k, "Clause width K");
  cmd->add_option("-d,--density", s.density, "Clause density d (floor(d n) clauses)");
}

void emit(const Common& c, const std::string& text) {
  if (c.out.empty()) {
    std::cout << text;
    if (!std::cout) throw IoError("write to stdout failed");
  } else {
    write_text_file(c.out, text);
  }
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

std::unique_ptr<LocalRule> rule_for(const std::string& alg, int rounds, bool estimate,
                                    std::size_t samples) {
  ExperimentConfig cfg;
  cfg.algorithm = parse_algorithm(alg);
  cfg.rounds = rounds;
  cfg.sp_estimate = estimate;
  cfg.sp_samples = samples;
  cfg.validate();
  return make_rule(cfg);
}

struct RuleOptions {
  std::string alg = "uc";
  int rounds = 1;
  bool estimate = false;
  std::size_t samples = 1;
};

void add_rule(CLI::App* cmd, RuleOptions& r) {
  cmd->add_option("-a,--alg", r.alg, "Local rule")->check(CLI::IsMember({"uc", "bp", "sp"}));
  cmd->add_option("-t,--rounds", r.rounds, "BP radius 2t / SP iterations t");
  cmd->add_flag("--sp-estimate", r.estimate, "SP returns the fraction of inits favouring 1");
  cmd->add_option("--sp-samples", r.samples, "Inits per SP estimate");
}

struct OverlapOptions {
  std::optional<double> beta, eta, eps;
  std::optional<std::size_t> m;

  OverlapParams resolve(std::size_t k) const {
    OverlapParams p = default_params(static_cast<double>(k), eps.value_or(0.5));
    if (beta) p.beta = *beta;
    if (eta) p.eta = *eta;
    else if (beta) p.eta = *beta * *beta;
    if (m) p.m = *m;
    p.validate();
    return p;
  }
};

void add_overlap(CLI::App* cmd, OverlapOptions& o) {
  cmd->add_option("--beta", o.beta, "Upper distance fraction (default ln K / K)");
  cmd->add_option("--eta", o.eta, "Window width (default beta^2)");
  cmd->add_option("--eps", o.eps, "eps for the default m = ceil(eps^2 K / ln K)");
  cmd->add_option("-m,--members", o.m, "Tuple size m");
}

std::vector<double> density_grid(const std::vector<double>& list, const std::vector<double>& range) {
  if (!list.empty()) return list;
  if (range.size() != 3 || !(range[2] > 0) || range[1] < range[0])
    throw InvalidParameters("--range needs start stop step with step > 0");
  std::vector<double> out;
  const auto steps = static_cast<std::size_t>(std::floor((range[1] - range[0]) / range[2] + 1e-9));
  for (std::size_t i = 0; i <= steps; ++i) out.push_back(range[0] + range[2] * static_cast<double>(i));
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Local decimation algorithms for random NAE-K-SAT"};
  app.require_subcommand(1);

  // gen -------------------------------------------------------------------
  Common gen_c;
  Source gen_s;
  auto* gen = app.add_subcommand("gen", "Generate a random NAE-K-SAT instance");
  add_common(gen, gen_c, {"dimacs", "csv", "json"});
  add_source(gen, gen_s);
  gen_c.format = "dimacs";
  gen->callback([&] {
    Rng rng(gen_c.seed);
    const Formula phi = gen_s.load(rng);
    if (gen_c.format == "dimacs") return emit(gen_c, serialize(phi));
    if (gen_c.format == "csv") {
      std::ostringstream out;
      out << "clause,sign,literals\n";
      for (const Clause& c : phi.clauses()) {
        out << c.id << ',' << sign_char(c.sign) << ',';
        for (std::size_t i = 0; i < c.width(); ++i) {
          const long long v = static_cast<long long>(c.literals[i].var) + 1;
          out << (i ? " " : "") << (c.literals[i].negated ? -v : v);
        }
        out << '\n';
      }
      return emit(gen_c, out.str());
    }
    json j = {{"n", phi.num_vars()}, {"k", phi.k()}, {"clauses", json::array()}};
    for (const Clause& c : phi.clauses()) {
      json lits = json::array();
      for (const Literal& l : c.literals) lits.push_back((l.negated ? -1 : 1) * (static_cast<long long>(l.var) + 1));
      j["clauses"].push_back({{"sign", std::string(1, sign_char(c.sign))}, {"literals", lits}});
    }
    emit(gen_c, dump(j));
  });

  // solve -----------------------------------------------------------------
  Common solve_c;
  Source solve_s;
  RuleOptions solve_r;
  std::string trace_path;
  auto* solve = app.add_subcommand("solve", "Run one decimation on one instance");
  add_common(solve, solve_c, {"csv", "json"});
  add_source(solve, solve_s);
  add_rule(solve, solve_r);
  solve->add_option("--trace", trace_path, "Write a JSONL step trace with neighborhoods");
  solve->callback([&] {
    const StreamFactory streams(solve_c.seed);
    Rng phi_rng = streams.stream("phi/0");
    const Formula phi = solve_s.load(phi_rng);
    Rng z_rng = streams.stream("z/0");
    const Ordering z = draw_ordering(phi.num_vars(), z_rng);
    const Seeds u = trial_seeds(streams, 0, phi.num_vars());
    const auto rule = rule_for(solve_r.alg, solve_r.rounds, solve_r.estimate, solve_r.samples);
    RunOptions opts;
    opts.record_neighborhoods = !trace_path.empty();
    const RunTrace trace = run(phi, *rule, z, u, opts);
    if (!trace_path.empty()) write_text_file(trace_path, trace_to_jsonl(trace));
    const bool sat = trace.violations == 0 && evaluate(phi, trace.assignment).sat;
    if (solve_c.format == "csv") {
      std::ostringstream out;
      out << "algorithm,n,clauses,violations,satisfied,assignment\n"
          << rule->name() << ',' << phi.num_vars() << ',' << phi.num_clauses() << ','
          << trace.violations << ',' << (sat ? 1 : 0) << ',' << trace.assignment.to_string() << '\n';
      return emit(solve_c, out.str());
    }
    emit(solve_c, dump({{"algorithm", rule->name()},
                        {"n", phi.num_vars()},
                        {"clauses", phi.num_clauses()},
                        {"violations", trace.violations},
                        {"satisfied", sat},
                        {"assignment", trace.assignment.to_string()}}));
  });

  // sweep -----------------------------------------------------------------
  Common sweep_c;
  RuleOptions sweep_r;
  ExperimentConfig sweep_cfg;
  std::vector<double> sweep_list, sweep_range;
  bool exhaustive = false;
  auto* sweep = app.add_subcommand("sweep", "Estimate success probability over a density grid");
  add_common(sweep, sweep_c, {"csv", "json"});
  add_rule(sweep, sweep_r);
  sweep->add_option("-n,--vars", sweep_cfg.n, "Variables");
  sweep->add_option("-k,--width", sweep_cfg.k, "Clause width K");
  auto* dens = sweep->add_option("--densities", sweep_list, "Density grid")->delimiter(',');
  sweep->add_option("--range", sweep_range, "Density grid as start stop step")->expected(3)->excludes(dens);
  sweep->add_option("--trials", sweep_cfg.trials, "Trials (or instances) per density");
  sweep->add_option("--threads", sweep_cfg.threads, "Worker threads (0: all cores)");
  sweep->add_flag("--timing", sweep_cfg.timing, "Record wall-clock seconds per density");
  sweep->add_flag("--exhaustive", exhaustive, "Exact satisfiability frequency instead (n <= 26)");
  sweep->callback([&] {
    sweep_cfg.algorithm = parse_algorithm(sweep_r.alg);
    sweep_cfg.rounds = sweep_r.rounds;
    sweep_cfg.sp_estimate = sweep_r.estimate;
    sweep_cfg.sp_samples = sweep_r.samples;
    sweep_cfg.seed = sweep_c.seed;
    sweep_cfg.densities = density_grid(sweep_list, sweep_range.empty() ? std::vector<double>{1.0, 1.0, 1.0} : sweep_range);
    sweep_cfg.validate();
    if (exhaustive) {
      const auto recs = satisfiability_sweep(sweep_cfg.n, sweep_cfg.k, sweep_cfg.densities,
                                             sweep_cfg.trials, sweep_cfg.seed, sweep_cfg.threads);
      const auto cross = half_crossing(recs);
      if (sweep_c.format == "csv") {
        std::ostringstream out;
        out << "k,n,density,instances,satisfiable,fraction\n";
        for (const auto& r : recs)
          out << sweep_cfg.k << ',' << sweep_cfg.n << ',' << format_double(r.density) << ','
              << r.instances << ',' << r.satisfiable << ',' << format_double(r.fraction()) << '\n';
        return emit(sweep_c, out.str());
      }
      json j = {{"k", sweep_cfg.k}, {"n", sweep_cfg.n}, {"records", json::array()}};
      for (const auto& r : recs)
        j["records"].push_back({{"density", r.density}, {"instances", r.instances},
                                {"satisfiable", r.satisfiable}, {"fraction", r.fraction()}});
      j["half_crossing"] = cross ? json(*cross) : json(nullptr);
      j["asymptotic_threshold"] = asymptotic_threshold(sweep_cfg.k);
      return emit(sweep_c, dump(j));
    }
    const auto recs = density_sweep(sweep_cfg);
    emit(sweep_c, sweep_c.format == "csv" ? records_csv(sweep_cfg, recs) : records_json(sweep_cfg, recs));
  });

  // overlap ---------------------------------------------------------------
  Common ov_c;
  Source ov_s;
  RuleOptions ov_r;
  OverlapOptions ov_o;
  InterpolationOptions ov_i;
  auto* overlap = app.add_subcommand("overlap", "Build an m-tuple of outputs by seed interpolation");
  add_common(overlap, ov_c, {"csv", "json"});
  add_source(overlap, ov_s);
  add_rule(overlap, ov_r);
  add_overlap(overlap, ov_o);
  overlap->add_option("--replicates", ov_i.replicates, "Replicate pairs per candidate t");
  overlap->add_option("--slack", ov_i.slack, "Fixed window slack above the target distance");
  overlap->callback([&] {
    const StreamFactory streams(ov_c.seed);
    Rng phi_rng = streams.stream("phi/0");
    const Formula phi = ov_s.load(phi_rng);
    Rng z_rng = streams.stream("z/0");
    const Ordering z = draw_ordering(phi.num_vars(), z_rng);
    Rng u_rng = streams.stream("interpolation");
    const auto rule = rule_for(ov_r.alg, ov_r.rounds, ov_r.estimate, ov_r.samples);
    const TupleReport r = interpolate(phi, *rule, z, ov_o.resolve(phi.k()), u_rng, ov_i);
    if (ov_c.format == "json") return emit(ov_c, tuple_report_json(r) + "\n");
    std::ostringstream out;
    out << "i,j,distance\n";
    for (std::size_t i = 0; i < r.distances.size(); ++i)
      for (std::size_t j = i + 1; j < r.distances.size(); ++j) out << i << ',' << j << ',' << r.distances[i][j] << '\n';
    emit(ov_c, out.str());
  });

  // census ----------------------------------------------------------------
  Common cen_c;
  Source cen_s;
  OverlapOptions cen_o;
  bool no_count = false;
  auto* cen = app.add_subcommand("census", "Exhaustive tuple census of a small instance");
  add_common(cen, cen_c, {"csv", "json"});
  add_source(cen, cen_s);
  add_overlap(cen, cen_o);
  cen_s.n = 14;
  cen->add_flag("--exists-only", no_count, "Stop at the first witness");
  cen->callback([&] {
    Rng rng(cen_c.seed);
    const Formula phi = cen_s.load(rng);
    const OverlapParams p = cen_o.resolve(phi.k());
    const CensusResult r = census(phi, p, !no_count);
    const std::string tuples = r.tuples ? r.tuples->str() : "";
    if (cen_c.format == "csv") {
      std::ostringstream out;
      out << "n,beta,eta,m,solutions,empty,tuples\n"
          << phi.num_vars() << ',' << format_double(p.beta) << ',' << format_double(p.eta) << ','
          << p.m << ',' << r.solutions << ',' << (r.empty ? 1 : 0) << ',' << tuples << '\n';
      return emit(cen_c, out.str());
    }
    json witness = json::array();
    for (const Assignment& a : r.witness) witness.push_back(a.to_string());
    emit(cen_c, dump({{"n", phi.num_vars()},
                      {"params", {{"beta", p.beta}, {"eta", p.eta}, {"m", p.m}}},
                      {"solutions", r.solutions},
                      {"empty", r.empty},
                      {"tuples", r.tuples ? json(tuples) : json(nullptr)},
                      {"witness", witness}}));
  });

  // first-moment ----------------------------------------------------------
  Common fm_c;
  OverlapOptions fm_o;
  std::size_t fm_n = 100, fm_k = 3;
  double fm_d = 1.0;
  auto* fm = app.add_subcommand("first-moment", "First-moment bound on the expected tuple count");
  add_common(fm, fm_c, {"csv", "json"});
  add_overlap(fm, fm_o);
  fm->add_option("-n,--vars", fm_n, "Variables");
  fm->add_option("-k,--width", fm_k, "Clause width K");
  fm->add_option("-d,--density", fm_d, "Clause density");
  fm->callback([&] {
    const OverlapParams p = fm_o.resolve(fm_k);
    const FirstMomentBound b = first_moment_bound(fm_n, fm_k, fm_d, p);
    if (fm_c.format == "csv") {
      std::ostringstream out;
      out << "n,k,density,beta,eta,m,clauses,per_clause,log_distance_sum,log_bound,valid\n"
          << fm_n << ',' << fm_k << ',' << format_double(fm_d) << ',' << format_double(p.beta) << ','
          << format_double(p.eta) << ',' << p.m << ',' << b.clauses << ',' << format_double(b.per_clause)
          << ',' << format_double(b.log_distance_sum) << ',' << format_double(b.log_bound) << ','
          << (b.valid ? 1 : 0) << '\n';
      return emit(fm_c, out.str());
    }
    emit(fm_c, dump({{"n", fm_n},
                     {"k", fm_k},
                     {"density", fm_d},
                     {"params", {{"beta", p.beta}, {"eta", p.eta}, {"m", p.m}}},
                     {"clauses", b.clauses},
                     {"per_clause", b.per_clause},
                     {"log_distance_sum", b.log_distance_sum},
                     {"log_bound", b.valid ? json(b.log_bound) : json(nullptr)},
                     {"valid", b.valid}}));
  });

  // influence -------------------------------------------------------------
  Common inf_c;
  Source inf_s;
  std::size_t hops = 2, t_max = 0, roots = 1000;
  auto* inf = app.add_subcommand("influence", "Influence-range sizes or ball growth");
  add_common(inf, inf_c, {"csv", "json"});
  add_source(inf, inf_s);
  inf->add_option("--hops", hops, "Chain step radius (the rule radius r)");
  inf->add_option("--ball-growth", t_max, "Report |B(x, t)| for t <= this instead");
  inf->add_option("--roots", roots, "Roots sampled for ball growth");
  inf->callback([&] {
    const StreamFactory streams(inf_c.seed);
    Rng phi_rng = streams.stream("phi/0");
    const Formula phi = inf_s.load(phi_rng);
    if (t_max > 0) {
      Rng root_rng = streams.stream("roots");
      std::vector<Var> picks;
      for (std::size_t i = 0; i < roots; ++i) picks.push_back(static_cast<Var>(root_rng.below(phi.num_vars())));
      const auto rows = ball_growth(phi, t_max, picks);
      if (inf_c.format == "csv") return emit(inf_c, ball_growth_csv(rows));
      json j = json::array();
      for (const auto& r : rows) j.push_back({{"t", r.t}, {"mean", r.mean}, {"min", r.min}, {"max", r.max}});
      return emit(inf_c, dump(j));
    }
    Rng z_rng = streams.stream("z/0");
    const Ordering z = draw_ordering(phi.num_vars(), z_rng);
    const InfluenceStats st = max_influence_stats(phi, z, hops);
    if (inf_c.format == "csv") return emit(inf_c, histogram_csv(st));
    json hist = json::array();
    for (const auto& [size, count] : st.histogram) hist.push_back({{"size", size}, {"count", count}});
    emit(inf_c, dump({{"n", phi.num_vars()},
                      {"hops", hops},
                      {"max_size", st.max_size},
                      {"argmax", st.argmax + 1},
                      {"histogram", hist}}));
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInvalid;
  } catch (const IoError& e) {
    std::cerr << "naesat: " << e.what() << '\n';
    return kExitIo;
  } catch (const Error& e) {
    std::cerr << "naesat: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << "naesat: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
