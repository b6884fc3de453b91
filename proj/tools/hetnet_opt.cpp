// hetnet-opt: scenario generation, single-instance solves, and the
// strategy-comparison study, from the command line.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hetnet/association.hpp"
#include "hetnet/corrective_solver.hpp"
#include "hetnet/errors.hpp"
#include "hetnet/fw_solver.hpp"
#include "hetnet/harness.hpp"
#include "hetnet/metrics.hpp"
#include "hetnet/patterns.hpp"
#include "hetnet/rates.hpp"
#include "hetnet/scenario.hpp"
#include "hetnet/serialization.hpp"

namespace {

using namespace hetnet;

struct CommonArgs {
  std::string config_path;
  std::string scenario_path;
  std::uint64_t seed = 42;
  std::string patterns_arg = "all";
  std::string fading_model = "det";
  Index mc_samples = 1000;
  std::uint64_t fading_seed = 0;
  std::string rates_cache;
};

void add_solver_flags(CLI::App* cmd, SolverOptions& opts) {
  cmd->add_option("--epsilon", opts.epsilon, "certificate target for the optimality gap");
  cmd->add_option("--gamma0", opts.initial_step, "first line-search step");
  cmd->add_option("--beta", opts.backtrack, "line-search shrink/grow factor in (0,1)");
  cmd->add_option("--kappa", opts.sufficient_increase,
                  "required fraction of the linear improvement in (0,1)");
  cmd->add_option("--max-iters", opts.max_iters, "iteration budget per relaxed solve");
  cmd->add_option("--inner-epsilon", opts.inner_epsilon,
                  "corrective subproblem certificate (default epsilon/10)");
  cmd->add_option("--max-outer", opts.max_outer, "outer-round budget (corrective / joint)");
  cmd->add_option("--active-tol", opts.active_tol,
                  "share threshold for counting active patterns");
}

ScenarioConfig load_config(const CommonArgs& args) {
  if (args.config_path.empty()) return {};
  return config_from_json(load_json(args.config_path));
}

Scenario load_scenario(const CommonArgs& args) {
  if (!args.scenario_path.empty()) return scenario_from_json(load_json(args.scenario_path));
  return generate_scenario(load_config(args), args.seed);
}

FadingOptions fading_of(const CommonArgs& args) {
  FadingOptions f;
  if (args.fading_model == "det") {
    f.model = FadingOptions::Model::Deterministic;
  } else if (args.fading_model == "mc") {
    f.model = FadingOptions::Model::RayleighMc;
  } else {
    throw InputError("unknown fading model '" + args.fading_model + "' (expected det or mc)");
  }
  f.mc_samples = args.mc_samples;
  f.seed = args.fading_seed;
  return f;
}

PatternSet patterns_of(const CommonArgs& args, const Scenario& s) {
  if (args.patterns_arg.rfind("file:", 0) == 0) {
    PatternSet set = patterns_from_file(args.patterns_arg.substr(5));
    if (set.num_cells != s.num_cells())
      throw InputError("pattern file is for a different cell count");
    return set;
  }
  return build_strategy_patterns(parse_strategy(args.patterns_arg), topology_of(s));
}

RateTensor rates_of(const CommonArgs& args, const Scenario& s, const PatternSet& patterns) {
  const FadingOptions fading = fading_of(args);
  if (!args.rates_cache.empty()) {
    const std::string path = rate_cache_path(args.rates_cache, rate_cache_key(s, patterns, fading));
    RateTensor cached;
    if (load_rate_cache(path, cached)) return cached;
    RateTensor fresh = compute_rate_matrix(s, patterns, fading);
    save_rate_cache(path, fresh);
    return fresh;
  }
  return compute_rate_matrix(s, patterns, fading);
}

void emit(const Json& j, const std::string& out_path) {
  if (out_path.empty())
    std::cout << j.dump(2) << '\n';
  else
    save_json(out_path, j);
}

int run_generate(const CommonArgs& args, const std::string& out_path) {
  const Scenario s = generate_scenario(load_config(args), args.seed);
  emit(to_json(s), out_path);
  return 0;
}

int run_solve(const CommonArgs& args, const SolverOptions& opts, const std::string& mode,
              const std::string& alg_name, double re_bias_db, const std::string& trace_path,
              const std::string& out_path) {
  const Scenario s = load_scenario(args);
  const PatternSet patterns = patterns_of(args, s);
  const RateTensor rates = rates_of(args, s, patterns);
  const VectorX<double> weights = s.weights();
  const RelaxedAlg alg = parse_relaxed_alg(alg_name);

  Json j;
  bool certified = false;
  if (mode == "relaxed") {
    const SolverResult res = solve_relaxed(rates, weights, opts, alg);
    if (!trace_path.empty()) write_trace_csv(trace_path, res.trace);
    j = to_json(res);
    j["metrics"] = to_json(metrics(res.user_rates));
    certified = res.certified;
  } else if (mode == "joint") {
    const JointResult res = solve_single_bs(rates, weights, opts, alg);
    j = to_json(res);
    j["metrics"] = to_json(metrics(res.user_rates));
    certified = res.certified;
  } else if (mode == "fixed") {
    const Association assoc = re_association(s, re_bias_db);
    const JointResult res = solve_fixed_association(rates, weights, assoc, opts, alg);
    j = to_json(res);
    j["metrics"] = to_json(metrics(res.user_rates));
    certified = res.certified;
  } else {
    throw InputError("unknown mode '" + mode + "' (expected relaxed, joint, or fixed)");
  }
  j["mode"] = mode;
  j["alg"] = alg_name;
  j["patterns"] = to_json(patterns);
  emit(j, out_path);
  return certified ? 0 : 1;
}

int run_comparison_cmd(const CommonArgs& args, const SolverOptions& opts,
                       const std::string& strategies_csv, Index drops,
                       const std::string& alg_name, const std::vector<double>& re_biases,
                       const std::string& out_dir, bool svg) {
  const ScenarioConfig config = load_config(args);
  std::vector<StrategySpec> specs = parse_strategy_list(strategies_csv);
  const std::vector<StrategySpec> re_rows = re_bias_strategies(re_biases);
  specs.insert(specs.end(), re_rows.begin(), re_rows.end());

  const ComparisonReport report = run_comparison(config, specs, drops, args.seed, opts,
                                                 parse_relaxed_alg(alg_name), fading_of(args));
  if (out_dir.empty()) {
    std::cout << to_json(report).dump(2) << '\n';
  } else {
    write_report_files(out_dir, report, svg);
    std::cout << "wrote " << out_dir << "/report.json, metrics.csv and "
              << report.aggregates.size() << " CDF files\n";
  }
  bool all_ok = true;
  for (const RunRecord& rec : report.runs) all_ok = all_ok && rec.ok && rec.certified;
  return all_ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pattern-based multi-cell scheduling: scenarios, solves, comparisons"};
  app.require_subcommand(1);

  CommonArgs args;
  SolverOptions opts;
  std::string out_path;
  std::string out_dir;
  std::string mode = "relaxed";
  std::string alg_name = "fw";
  std::string trace_path;
  std::string strategies_csv = "all,feature,od1,od3,abs,reuse1";
  std::vector<double> re_biases;
  double re_bias_db = 0.0;
  Index drops = 5;
  bool svg = false;

  auto add_common = [&](CLI::App* cmd, bool wants_scenario) {
    cmd->add_option("--config", args.config_path, "scenario config JSON");
    if (wants_scenario)
      cmd->add_option("--scenario", args.scenario_path, "frozen scenario JSON (skips generation)");
    cmd->add_option("--seed", args.seed, "base RNG seed");
    cmd->add_option("--fading", args.fading_model, "small-scale fading: det or mc");
    cmd->add_option("--mc-samples", args.mc_samples, "Monte-Carlo samples per link");
    cmd->add_option("--fading-seed", args.fading_seed, "fading stream seed");
  };

  CLI::App* generate = app.add_subcommand("generate", "generate and print/save a scenario");
  add_common(generate, false);
  generate->add_option("--out", out_path, "output JSON path (stdout if omitted)");

  CLI::App* solve = app.add_subcommand("solve", "solve one instance");
  add_common(solve, true);
  solve->add_option("--patterns", args.patterns_arg,
                    "all|reuse1|od1|od3|abs|feature|file:<path>");
  solve->add_option("--mode", mode, "relaxed (multi-BS), joint (alternating), fixed (RE bias)");
  solve->add_option("--alg", alg_name, "relaxed solver: fw or fc");
  solve->add_option("--re-bias", re_bias_db, "pico bias (dB) for --mode fixed");
  solve->add_option("--trace", trace_path, "write the iteration trace CSV here");
  solve->add_option("--rates-cache", args.rates_cache, "directory for the binary rate cache");
  solve->add_option("--out", out_path, "result JSON path (stdout if omitted)");
  add_solver_flags(solve, opts);

  CLI::App* run = app.add_subcommand("run", "strategy comparison across drops");
  add_common(run, false);
  run->add_option("--strategies", strategies_csv, "comma list: all,feature,od1,od3,abs,reuse1");
  run->add_option("--drops", drops, "number of independent scenario drops");
  run->add_option("--alg", alg_name, "relaxed solver: fw or fc");
  run->add_option("--re-bias", re_biases,
                  "pico biases (dB); adds fixed-association rows on feature and reuse1")
      ->delimiter(',');
  run->add_option("--out", out_dir, "output directory (JSON to stdout if omitted)");
  run->add_flag("--svg", svg, "also write a self-contained CDF plot");
  add_solver_flags(run, opts);

  CLI11_PARSE(app, argc, argv);

  try {
    if (generate->parsed()) return run_generate(args, out_path);
    if (solve->parsed())
      return run_solve(args, opts, mode, alg_name, re_bias_db, trace_path, out_path);
    if (run->parsed())
      return run_comparison_cmd(args, opts, strategies_csv, drops, alg_name, re_biases, out_dir,
                                svg);
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << '\n';
    return 2;
  }
  return 2;
}
