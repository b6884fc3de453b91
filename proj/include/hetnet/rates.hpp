#ifndef HETNET_RATES_HPP
#define HETNET_RATES_HPP

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "hetnet/patterns.hpp"
#include "hetnet/scenario.hpp"
#include "hetnet/types.hpp"

namespace hetnet {

// Long-term service rate of user k from cell b under pattern i, in bit/s.
// Stored as a (K*B) x I matrix whose column i is the K x B slice in
// column-major order (user index fastest), so a pattern slice maps straight
// onto an Eigen block without copying.
template <typename Scalar>
struct RateTensorT {
  Index num_users = 0;
  Index num_cells = 0;
  Index num_patterns = 0;

  MatrixX<Scalar> values;    // (K*B) x I
  MatrixX<Scalar> activity;  // B x I, 0/1: does cell b transmit under pattern i

  Eigen::Map<const MatrixX<Scalar>> pattern_slice(Index i) const {
    return Eigen::Map<const MatrixX<Scalar>>(values.col(i).data(), num_users, num_cells);
  }

  Scalar at(Index k, Index b, Index i) const { return values(k + num_users * b, i); }
  Scalar& at(Index k, Index b, Index i) { return values(k + num_users * b, i); }

  template <typename Other>
  RateTensorT<Other> cast() const {
    RateTensorT<Other> out;
    out.num_users = num_users;
    out.num_cells = num_cells;
    out.num_patterns = num_patterns;
    out.values = values.template cast<Other>();
    out.activity = activity.template cast<Other>();
    return out;
  }
};

using RateTensor = RateTensorT<double>;

struct FadingOptions {
  enum class Model { Deterministic, RayleighMc };
  Model model = Model::Deterministic;
  Index mc_samples = 1000;  // >= 100 when model == RayleighMc
  std::uint64_t seed = 0;

  void validate() const;
};

// Fills the rate tensor from wideband SINR: flat power allocation across
// the band, interference summed over the co-scheduled cells of each
// pattern. The deterministic model pins the small-scale power factor at
// one; the Monte-Carlo model averages over unit-mean exponential draws
// per link (deterministic in `seed`, independent of evaluation order).
RateTensor compute_rate_matrix(const Scenario& s, const PatternSet& patterns,
                               const FadingOptions& fading = {});

// Users whose rate is zero for every (cell, pattern) combination; such
// rows make the log-utility objective unusable downstream.
template <typename Scalar>
std::vector<Index> zero_rate_users(const RateTensorT<Scalar>& rates) {
  std::vector<Index> out;
  for (Index k = 0; k < rates.num_users; ++k) {
    bool any = false;
    for (Index b = 0; b < rates.num_cells && !any; ++b)
      if (rates.values.row(k + rates.num_users * b).maxCoeff() > Scalar(0)) any = true;
    if (!any) out.push_back(k);
  }
  return out;
}

}  // namespace hetnet

#endif  // HETNET_RATES_HPP
