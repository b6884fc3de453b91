#ifndef HETNET_METRICS_HPP
#define HETNET_METRICS_HPP

#include <vector>

#include "hetnet/types.hpp"

namespace hetnet {

// Summary statistics of a per-user rate vector (bit/s).
struct MetricsReport {
  VectorX<double> rates;        // as given
  VectorX<double> cdf_samples;  // sorted ascending, plot-ready
  double geometric_mean = 0;
  double arithmetic_mean = 0;
  double sum_rate = 0;
  double p05 = 0;
  double p50 = 0;
  double p95 = 0;
  double utility = 0;  // unweighted sum of natural logs
};

// Percentile with linear interpolation between order statistics:
// index = (n - 1) * q / 100 on the sorted samples.
double percentile(const VectorX<double>& sorted_ascending, double q);

MetricsReport metrics(const VectorX<double>& rates);

}  // namespace hetnet

#endif  // HETNET_METRICS_HPP
