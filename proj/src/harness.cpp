#include "hetnet/harness.hpp"

#include <algorithm>
#include <chrono>
#include <map>
#include <sstream>
#include <utility>

#include "hetnet/errors.hpp"
#include "hetnet/rng.hpp"

namespace hetnet {

namespace {

StrategySpec joint_spec(PatternStrategy p) {
  return {to_string(p), p, StrategySpec::Mode::Joint, 0.0};
}

std::string bias_label(PatternStrategy p, double bias_db) {
  std::ostringstream s;
  s << to_string(p) << "_RE" << bias_db << "dB";
  return s.str();
}

}  // namespace

std::vector<StrategySpec> default_strategies() {
  return {joint_spec(PatternStrategy::AllPattern), joint_spec(PatternStrategy::FeaPattern),
          joint_spec(PatternStrategy::MacroABS),  joint_spec(PatternStrategy::OD1),
          joint_spec(PatternStrategy::OD3),       joint_spec(PatternStrategy::Reuse1)};
}

std::vector<StrategySpec> parse_strategy_list(const std::string& csv) {
  std::vector<StrategySpec> out;
  std::istringstream stream(csv);
  std::string token;
  while (std::getline(stream, token, ',')) {
    if (token.empty()) continue;
    out.push_back(joint_spec(parse_strategy(token)));
  }
  if (out.empty()) throw InputError("strategy list is empty");
  return out;
}

std::vector<StrategySpec> re_bias_strategies(const std::vector<double>& biases_db) {
  std::vector<StrategySpec> out;
  for (const PatternStrategy p : {PatternStrategy::FeaPattern, PatternStrategy::Reuse1})
    for (const double bias : biases_db)
      out.push_back({bias_label(p, bias), p, StrategySpec::Mode::FixedRE, bias});
  return out;
}

ComparisonReport run_comparison(const ScenarioConfig& config,
                                const std::vector<StrategySpec>& strategies, Index drops,
                                std::uint64_t seed, const SolverOptions& opts, RelaxedAlg alg,
                                const FadingOptions& fading) {
  if (strategies.empty()) throw InputError("run_comparison: no strategies given");
  if (drops < 1) throw InputError("run_comparison: drops must be >= 1");
  config.validate();
  opts.validate();
  fading.validate();

  ComparisonReport report;
  report.config = config;
  report.seed = seed;
  report.drops = drops;
  report.alg = alg;
  report.opts = opts;
  report.fading = fading;

  for (Index drop = 0; drop < drops; ++drop) {
    const Scenario scenario = generate_scenario(config, mix_seed(seed, 1 + static_cast<std::uint64_t>(drop)));
    const Topology topo = topology_of(scenario);
    std::map<PatternStrategy, RateTensor> tensors;  // shared across rows of this drop
    auto rates_for = [&](PatternStrategy p) -> const RateTensor& {
      auto it = tensors.find(p);
      if (it == tensors.end()) {
        const PatternSet patterns = build_strategy_patterns(p, topo);
        it = tensors.emplace(p, compute_rate_matrix(scenario, patterns, fading)).first;
      }
      return it->second;
    };

    for (const StrategySpec& spec : strategies) {
      RunRecord rec;
      rec.strategy = spec.label;
      rec.drop = drop;
      const auto start = std::chrono::steady_clock::now();
      try {
        const RateTensor& rates = rates_for(spec.patterns);
        JointResult jr;
        if (spec.mode == StrategySpec::Mode::Joint) {
          jr = solve_single_bs(rates, scenario.weights(), opts, alg);
        } else {
          const Association assoc = re_association(scenario, spec.re_bias_db);
          jr = solve_fixed_association(rates, scenario.weights(), assoc, opts, alg);
        }
        rec.metrics = metrics(jr.user_rates);
        rec.relaxed_bound = jr.relaxed_bound;
        rec.bound_gap = jr.bound_gap;
        rec.outer_iterations = jr.outer_iterations;
        rec.certified = jr.certified;
        rec.ok = true;
      } catch (const std::exception& err) {
        rec.error = err.what();
      }
      rec.solve_seconds =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      report.runs.push_back(std::move(rec));
    }
  }

  for (const StrategySpec& spec : strategies) {
    StrategyAggregate agg;
    agg.strategy = spec.label;
    agg.all_certified = true;
    std::vector<double> pooled;
    for (const RunRecord& rec : report.runs) {
      if (rec.strategy != spec.label || !rec.ok) continue;
      ++agg.completed_drops;
      agg.all_certified = agg.all_certified && rec.certified;
      agg.geometric_mean += rec.metrics.geometric_mean;
      agg.sum_rate += rec.metrics.sum_rate;
      agg.p05 += rec.metrics.p05;
      agg.p50 += rec.metrics.p50;
      agg.p95 += rec.metrics.p95;
      agg.utility += rec.metrics.utility;
      pooled.insert(pooled.end(), rec.metrics.cdf_samples.begin(), rec.metrics.cdf_samples.end());
    }
    if (agg.completed_drops > 0) {
      const double n = static_cast<double>(agg.completed_drops);
      agg.geometric_mean /= n;
      agg.sum_rate /= n;
      agg.p05 /= n;
      agg.p50 /= n;
      agg.p95 /= n;
      agg.utility /= n;
    } else {
      agg.all_certified = false;
    }
    std::sort(pooled.begin(), pooled.end());
    agg.pooled_cdf = Eigen::Map<const VectorX<double>>(pooled.data(),
                                                       static_cast<Index>(pooled.size()));
    report.aggregates.push_back(std::move(agg));
  }
  return report;
}

}  // namespace hetnet
