#include "hetnet/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "hetnet/errors.hpp"

namespace hetnet {

double percentile(const VectorX<double>& sorted, double q) {
  const Index n = sorted.size();
  if (n < 1) throw InputError("percentile: empty sample");
  if (q < 0.0 || q > 100.0) throw InputError("percentile: q must lie in [0, 100]");
  const double pos = static_cast<double>(n - 1) * q / 100.0;
  const Index lo = static_cast<Index>(std::floor(pos));
  const Index hi = std::min(lo + 1, n - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

MetricsReport metrics(const VectorX<double>& rates) {
  if (rates.size() < 1) throw InputError("metrics: empty rate vector");
  if (!(rates.minCoeff() > 0)) throw InputError("metrics: rates must be positive");
  MetricsReport r;
  r.rates = rates;
  r.cdf_samples = rates;
  std::sort(r.cdf_samples.begin(), r.cdf_samples.end());
  r.utility = rates.array().log().sum();
  r.geometric_mean = std::exp(r.utility / static_cast<double>(rates.size()));
  r.sum_rate = rates.sum();
  r.arithmetic_mean = r.sum_rate / static_cast<double>(rates.size());
  r.p05 = percentile(r.cdf_samples, 5.0);
  r.p50 = percentile(r.cdf_samples, 50.0);
  r.p95 = percentile(r.cdf_samples, 95.0);
  return r;
}

}  // namespace hetnet
