#ifndef HETNET_SERIALIZATION_HPP
#define HETNET_SERIALIZATION_HPP

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "hetnet/allocation.hpp"
#include "hetnet/association.hpp"
#include "hetnet/fw_solver.hpp"
#include "hetnet/harness.hpp"
#include "hetnet/patterns.hpp"
#include "hetnet/rates.hpp"
#include "hetnet/scenario.hpp"

namespace hetnet {

using Json = nlohmann::json;

// --- JSON round-trips -------------------------------------------------
// Positions are metres, powers dBm, gains dB; linear quantities are
// converted on load.

Json to_json(const ScenarioConfig& config);
ScenarioConfig config_from_json(const Json& j);

Json to_json(const Scenario& s);
Scenario scenario_from_json(const Json& j);

// Pattern sets are arrays of ON/OFF bitstrings; string position j is cell j.
Json to_json(const PatternSet& patterns);
PatternSet patterns_from_json(const Json& j);
PatternSet patterns_from_file(const std::string& path);

// Allocations serialize sparsely: pattern shares plus [user, cell,
// pattern, share] quadruplets for every nonzero user share.
Json to_json(const Allocation& alloc);
Allocation allocation_from_json(const Json& j);

Json to_json(const Association& assoc);
Association association_from_json(const Json& j);

Json to_json(const SolverResult& result);
Json to_json(const JointResult& result);
Json to_json(const MetricsReport& report);
Json to_json(const ComparisonReport& report);

Json load_json(const std::string& path);
void save_json(const std::string& path, const Json& j);

// --- Iteration trace CSV ----------------------------------------------
// Columns: iteration, utility, gap, step, active_count, working_set.
void write_trace_csv(const std::string& path, const std::vector<TracePoint>& trace);

// --- Comparison-report files -------------------------------------------
// metrics.csv: one row per (strategy, drop) plus per-strategy mean rows.
// cdf_<strategy>.csv: pooled sorted rates with cumulative fractions.
void write_metrics_csv(const std::string& path, const ComparisonReport& report);
void write_cdf_csv(const std::string& path, const StrategyAggregate& aggregate);

// Self-contained SVG line plot of every strategy's pooled rate CDF.
void write_cdf_svg(const std::string& path, const ComparisonReport& report);

// Writes report.json, metrics.csv, cdf_<strategy>.csv (and optionally
// cdf.svg) under `dir`, creating it if needed.
void write_report_files(const std::string& dir, const ComparisonReport& report, bool svg);

// --- Rate-tensor cache --------------------------------------------------
// Binary layout: 8-byte magic "HNRATES1", three little-endian int64 dims
// (users, cells, patterns), the rate values as row-major IEEE doubles,
// then the cell-activity grid as row-major doubles.
void save_rate_cache(const std::string& path, const RateTensor& rates);
bool load_rate_cache(const std::string& path, RateTensor& rates);

// Cache key: FNV-1a over the scenario (seed, geometry, gains), the
// pattern bitstrings, and the fading options.
std::uint64_t rate_cache_key(const Scenario& s, const PatternSet& patterns,
                             const FadingOptions& fading);
std::string rate_cache_path(const std::string& dir, std::uint64_t key);

}  // namespace hetnet

#endif  // HETNET_SERIALIZATION_HPP
