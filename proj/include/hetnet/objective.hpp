#ifndef HETNET_OBJECTIVE_HPP
#define HETNET_OBJECTIVE_HPP

#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Core>

#include "hetnet/allocation.hpp"
#include "hetnet/errors.hpp"
#include "hetnet/rates.hpp"
#include "hetnet/types.hpp"

namespace hetnet {

// Long-term rate of each user under an allocation: R_k = sum over
// (cell, pattern) of user_share * rate. Streams one pattern slice at a
// time so no (K*B) x I temporary is materialised.
template <typename Scalar>
VectorX<Scalar> user_rates(const RateTensorT<Scalar>& rates, const AllocationT<Scalar>& a) {
  if (rates.num_users != a.num_users || rates.num_cells != a.num_cells ||
      rates.num_patterns != a.num_patterns())
    throw InputError("user_rates: allocation and rate tensor dimensions differ");
  VectorX<Scalar> r = VectorX<Scalar>::Zero(rates.num_users);
  VectorX<Scalar> col(rates.num_users * rates.num_cells);
  for (Index i = 0; i < rates.num_patterns; ++i) {
    col = rates.values.col(i).cwiseProduct(a.user_share.col(i));
    Eigen::Map<const MatrixX<Scalar>> slice(col.data(), rates.num_users, rates.num_cells);
    r += slice.rowwise().sum();
  }
  return r;
}

// Weighted proportional-fair utility, natural log, rates in bit/s.
// Throws if any user rate is nonpositive: the caller's allocation (often
// its initialisation) must give every user something.
template <typename Scalar>
Scalar utility(const VectorX<Scalar>& rates_per_user, const VectorX<Scalar>& weights) {
  if (rates_per_user.size() != weights.size())
    throw InputError("utility: weights size mismatch");
  Scalar u = 0;
  for (Index k = 0; k < rates_per_user.size(); ++k) {
    if (!(rates_per_user[k] > Scalar(0)))
      throw DegenerateAllocation("utility: user " + std::to_string(k) +
                                 " has zero rate; fix the allocation or its initialisation");
    u += weights[k] * std::log(rates_per_user[k]);
  }
  return u;
}

// Line-search variant: zero rates map to -infinity instead of throwing,
// so a tentative full step toward a vertex can simply fail the acceptance
// test rather than abort.
template <typename Scalar>
Scalar utility_or_lowest(const VectorX<Scalar>& rates_per_user, const VectorX<Scalar>& weights) {
  Scalar u = 0;
  for (Index k = 0; k < rates_per_user.size(); ++k) {
    if (!(rates_per_user[k] > Scalar(0))) return -std::numeric_limits<Scalar>::infinity();
    u += weights[k] * std::log(rates_per_user[k]);
  }
  return u;
}

template <typename Scalar>
struct UtilityGradient {
  Scalar value = 0;
  MatrixX<Scalar> gradient;  // (K*B) x I, same layout as the shares
};

// Utility plus its gradient in the user shares: d utility / d share(k,b,i)
// = weight_k * rate(k,b,i) / R_k. The utility is invariant in
// pattern_share directly, so the gradient covers user_share only.
template <typename Scalar>
UtilityGradient<Scalar> utility_and_gradient(const AllocationT<Scalar>& a,
                                             const RateTensorT<Scalar>& rates,
                                             const VectorX<Scalar>& weights) {
  UtilityGradient<Scalar> out;
  const VectorX<Scalar> r = user_rates(rates, a);
  out.value = utility(r, weights);
  const VectorX<Scalar> scale = weights.cwiseQuotient(r);  // K
  out.gradient.resizeLike(rates.values);
  for (Index i = 0; i < rates.num_patterns; ++i) {
    Eigen::Map<const MatrixX<Scalar>> rate_slice(rates.values.col(i).data(), rates.num_users,
                                                 rates.num_cells);
    Eigen::Map<MatrixX<Scalar>> grad_slice(out.gradient.col(i).data(), rates.num_users,
                                           rates.num_cells);
    grad_slice = rate_slice.array().colwise() * scale.array();
  }
  return out;
}

}  // namespace hetnet

#endif  // HETNET_OBJECTIVE_HPP
