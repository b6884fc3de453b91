#ifndef HETNET_HARNESS_HPP
#define HETNET_HARNESS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "hetnet/association.hpp"
#include "hetnet/metrics.hpp"
#include "hetnet/patterns.hpp"
#include "hetnet/rates.hpp"
#include "hetnet/scenario.hpp"
#include "hetnet/types.hpp"

namespace hetnet {

// One row of the comparison study: a pattern-candidate recipe plus how the
// association is decided (jointly optimised, or frozen by range-expansion
// biasing before the allocation solve).
struct StrategySpec {
  enum class Mode { Joint, FixedRE };

  std::string label;
  PatternStrategy patterns = PatternStrategy::Reuse1;
  Mode mode = Mode::Joint;
  double re_bias_db = 0.0;
};

// The six joint rows of the comparison table.
std::vector<StrategySpec> default_strategies();

// Parse a comma-separated list: all,feature,od1,od3,abs,reuse1.
std::vector<StrategySpec> parse_strategy_list(const std::string& csv);

// Fixed range-expansion rows: for each bias, an allocation-only solve on
// the feature patterns and on reuse-1.
std::vector<StrategySpec> re_bias_strategies(const std::vector<double>& biases_db);

struct RunRecord {
  std::string strategy;
  Index drop = 0;
  bool ok = false;
  std::string error;
  MetricsReport metrics;
  double relaxed_bound = 0;
  double bound_gap = 0;
  Index outer_iterations = 0;
  bool certified = false;
  double solve_seconds = 0;
};

struct StrategyAggregate {
  std::string strategy;
  Index completed_drops = 0;
  bool all_certified = false;
  double geometric_mean = 0;  // mean of per-drop geometric means
  double sum_rate = 0;
  double p05 = 0;
  double p50 = 0;
  double p95 = 0;
  double utility = 0;
  VectorX<double> pooled_cdf;  // all completed drops' rates, sorted
};

struct ComparisonReport {
  ScenarioConfig config;
  std::uint64_t seed = 0;
  Index drops = 0;
  RelaxedAlg alg = RelaxedAlg::FrankWolfe;
  SolverOptions opts;
  FadingOptions fading;
  std::vector<RunRecord> runs;  // drop-major, strategies in request order
  std::vector<StrategyAggregate> aggregates;
};

// Run every strategy on `drops` independent scenario drops (drop d uses a
// seed derived from `seed` and d) and aggregate per-strategy means.
// Solver failures are recorded in the affected run, never fatal. The
// report is a pure function of the arguments.
ComparisonReport run_comparison(const ScenarioConfig& config,
                                const std::vector<StrategySpec>& strategies, Index drops,
                                std::uint64_t seed, const SolverOptions& opts = {},
                                RelaxedAlg alg = RelaxedAlg::FrankWolfe,
                                const FadingOptions& fading = {});

}  // namespace hetnet

#endif  // HETNET_HARNESS_HPP
