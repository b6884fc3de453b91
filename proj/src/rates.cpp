#include "hetnet/rates.hpp"

#include <cmath>

#include "hetnet/errors.hpp"
#include "hetnet/rng.hpp"

namespace hetnet {

namespace {

constexpr double kLog2 = 0.6931471805599453094172321214581766;

}  // namespace

void FadingOptions::validate() const {
  if (model == Model::RayleighMc && mc_samples < 100)
    throw InputError("fading: Monte-Carlo averaging needs at least 100 samples");
}

RateTensor compute_rate_matrix(const Scenario& s, const PatternSet& patterns,
                               const FadingOptions& fading) {
  fading.validate();
  patterns.validate();
  if (patterns.num_cells != s.num_cells())
    throw InputError("compute_rate_matrix: pattern set covers a different cell count");

  const Index k_total = s.num_users();
  const Index b_total = s.num_cells();
  const Index i_total = patterns.size();
  const double w_hz = s.bandwidth_hz;

  RateTensor r;
  r.num_users = k_total;
  r.num_cells = b_total;
  r.num_patterns = i_total;
  r.activity = patterns.activity();
  r.values.setZero(k_total * b_total, i_total);

  // Received power spectral density of every link, W/Hz.
  MatrixX<double> rx(k_total, b_total);
  for (Index b = 0; b < b_total; ++b) rx.col(b) = s.gain.col(b) * s.cells[b].tx_psd;

  if (fading.model == FadingOptions::Model::Deterministic) {
    // Total received PSD per (user, pattern) in one product, then per-cell
    // SINR by subtracting the serving cell back out.
    const MatrixX<double> total = rx * r.activity;  // K x I
    for (Index i = 0; i < i_total; ++i) {
      Eigen::Map<MatrixX<double>> slice(r.values.col(i).data(), k_total, b_total);
      for (Index b = 0; b < b_total; ++b) {
        if (r.activity(b, i) == 0.0) continue;
        for (Index k = 0; k < k_total; ++k) {
          const double signal = rx(k, b);
          const double interference = total(k, i) - signal;
          const double sinr = signal / (s.noise_psd + interference);
          slice(k, b) = w_hz * std::log1p(sinr) / kLog2;
        }
      }
    }
    return r;
  }

  // Rayleigh Monte-Carlo: average spectral efficiency over per-link
  // unit-mean exponential power factors. One stream per user, seeded
  // independently of loop order, so results do not depend on scheduling.
  const Index samples = fading.mc_samples;
  VectorX<double> h(b_total);
  for (Index k = 0; k < k_total; ++k) {
    Rng rng(mix_seed(fading.seed, static_cast<std::uint64_t>(k)));
    MatrixX<double> acc = MatrixX<double>::Zero(b_total, i_total);
    for (Index n = 0; n < samples; ++n) {
      for (Index b = 0; b < b_total; ++b) h[b] = rng.exponential();
      for (Index i = 0; i < i_total; ++i) {
        double total = 0.0;
        for (Index b = 0; b < b_total; ++b)
          if (r.activity(b, i) != 0.0) total += rx.col(b).coeff(k) * h[b];
        for (Index b = 0; b < b_total; ++b) {
          if (r.activity(b, i) == 0.0) continue;
          const double signal = rx(k, b) * h[b];
          acc(b, i) += std::log1p(signal / (s.noise_psd + total - signal)) / kLog2;
        }
      }
    }
    for (Index i = 0; i < i_total; ++i)
      for (Index b = 0; b < b_total; ++b)
        r.values(k + k_total * b, i) = w_hz * acc(b, i) / static_cast<double>(samples);
  }
  return r;
}

}  // namespace hetnet
