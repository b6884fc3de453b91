#include <doctest.h>

#include <cmath>

#include "hetnet/errors.hpp"
#include "hetnet/metrics.hpp"
#include "hetnet/rng.hpp"
#include "hetnet/types.hpp"

using namespace hetnet;

TEST_CASE("summary statistics on hand values") {
  VectorX<double> rates(2);
  rates << 2.0, 8.0;
  const MetricsReport m = metrics(rates);
  CHECK(m.geometric_mean == doctest::Approx(4.0).epsilon(1e-14));
  CHECK(m.arithmetic_mean == doctest::Approx(5.0));
  CHECK(m.sum_rate == doctest::Approx(10.0));
  CHECK(m.utility == doctest::Approx(std::log(2.0) + std::log(8.0)).epsilon(1e-14));
  CHECK(m.cdf_samples[0] == 2.0);
  CHECK(m.cdf_samples[1] == 8.0);
  CHECK(m.p50 == doctest::Approx(5.0));  // midpoint of two samples
}

TEST_CASE("a constant sample collapses every statistic") {
  const VectorX<double> rates = VectorX<double>::Constant(7, 3e6);
  const MetricsReport m = metrics(rates);
  CHECK(m.geometric_mean == doctest::Approx(3e6).epsilon(1e-12));
  CHECK(m.arithmetic_mean == doctest::Approx(3e6));
  CHECK(m.p05 == doctest::Approx(3e6));
  CHECK(m.p50 == doctest::Approx(3e6));
  CHECK(m.p95 == doctest::Approx(3e6));
}

TEST_CASE("percentiles interpolate between order statistics") {
  VectorX<double> sorted(5);
  sorted << 1.0, 2.0, 3.0, 4.0, 5.0;
  // position = (n-1) q / 100: 5% of 4 = 0.2 -> 1.2; 50% -> 3; 95% -> 4.8
  CHECK(percentile(sorted, 5.0) == doctest::Approx(1.2));
  CHECK(percentile(sorted, 50.0) == doctest::Approx(3.0));
  CHECK(percentile(sorted, 95.0) == doctest::Approx(4.8));
  CHECK(percentile(sorted, 0.0) == doctest::Approx(1.0));
  CHECK(percentile(sorted, 100.0) == doctest::Approx(5.0));
  CHECK_THROWS_AS(percentile(sorted, -1.0), InputError);
  CHECK_THROWS_AS(percentile(sorted, 101.0), InputError);
  CHECK_THROWS_AS(percentile(VectorX<double>(), 50.0), InputError);
}

TEST_CASE("the geometric mean matches the sequential product form") {
  Rng rng(71);
  VectorX<double> rates(50);
  for (Index k = 0; k < rates.size(); ++k) rates[k] = rng.uniform(1e4, 1e7);
  const MetricsReport m = metrics(rates);

  double product_form = 1.0;
  for (Index k = 0; k < rates.size(); ++k)
    product_form *= std::pow(rates[k], 1.0 / static_cast<double>(rates.size()));
  CHECK(m.geometric_mean == doctest::Approx(product_form).epsilon(1e-12));
  // the geometric mean never exceeds the arithmetic mean
  CHECK(m.geometric_mean <= m.arithmetic_mean);
  // sorting leaves the original vector untouched
  CHECK(m.rates == rates);
}

TEST_CASE("metrics reject unusable inputs") {
  CHECK_THROWS_AS(metrics(VectorX<double>()), InputError);
  VectorX<double> with_zero(3);
  with_zero << 1.0, 0.0, 2.0;
  CHECK_THROWS_AS(metrics(with_zero), InputError);
  VectorX<double> negative(2);
  negative << 1.0, -2.0;
  CHECK_THROWS_AS(metrics(negative), InputError);
}
