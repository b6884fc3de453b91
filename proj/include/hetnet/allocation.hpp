#ifndef HETNET_ALLOCATION_HPP
#define HETNET_ALLOCATION_HPP

#include <algorithm>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "hetnet/errors.hpp"
#include "hetnet/types.hpp"

namespace hetnet {

// A point of the relaxed feasible set: pattern_share[i] is the fraction of
// time pattern i is scheduled (a probability vector), user_share(k,b,i) the
// fraction of total time cell b serves user k under pattern i. Layout
// mirrors RateTensorT: user_share is (K*B) x I with column i holding the
// K x B slice, user index fastest.
//
// Feasible means: everything nonnegative, sum_i pattern_share = 1, and for
// every (cell, pattern) column sum_k user_share(k,b,i) <= pattern_share[i].
template <typename Scalar>
struct AllocationT {
  Index num_users = 0;
  Index num_cells = 0;

  MatrixX<Scalar> user_share;     // (K*B) x I
  VectorX<Scalar> pattern_share;  // I

  Index num_patterns() const { return pattern_share.size(); }

  Scalar at(Index k, Index b, Index i) const { return user_share(k + num_users * b, i); }
  Scalar& at(Index k, Index b, Index i) { return user_share(k + num_users * b, i); }

  Eigen::Map<const MatrixX<Scalar>> pattern_slice(Index i) const {
    return Eigen::Map<const MatrixX<Scalar>>(user_share.col(i).data(), num_users, num_cells);
  }

  static AllocationT zeros(Index num_users, Index num_cells, Index num_patterns) {
    AllocationT a;
    a.num_users = num_users;
    a.num_cells = num_cells;
    a.user_share = MatrixX<Scalar>::Zero(num_users * num_cells, num_patterns);
    a.pattern_share = VectorX<Scalar>::Zero(num_patterns);
    return a;
  }

  template <typename Other>
  AllocationT<Other> cast() const {
    AllocationT<Other> out;
    out.num_users = num_users;
    out.num_cells = num_cells;
    out.user_share = user_share.template cast<Other>();
    out.pattern_share = pattern_share.template cast<Other>();
    return out;
  }
};

using Allocation = AllocationT<double>;

// Per-(cell, pattern) column sums of the user shares: a B x I matrix whose
// entry (b, i) must stay below pattern_share[i].
template <typename Scalar>
MatrixX<Scalar> cell_share_sums(const AllocationT<Scalar>& a) {
  MatrixX<Scalar> sums(a.num_cells, a.num_patterns());
  for (Index i = 0; i < a.num_patterns(); ++i)
    sums.col(i) = a.pattern_slice(i).colwise().sum().transpose();
  return sums;
}

// Largest constraint violation: max of negative entries (as positives),
// column-sum excess over pattern_share, and |sum(pattern_share) - 1|.
template <typename Scalar>
Scalar feasibility_violation(const AllocationT<Scalar>& a) {
  Scalar v = std::abs(a.pattern_share.sum() - Scalar(1));
  if (a.pattern_share.size() > 0) v = std::max(v, -a.pattern_share.minCoeff());
  if (a.user_share.size() > 0) v = std::max(v, -a.user_share.minCoeff());
  const MatrixX<Scalar> sums = cell_share_sums(a);
  for (Index i = 0; i < a.num_patterns(); ++i) {
    const Scalar excess = (sums.col(i).array() - a.pattern_share[i]).maxCoeff();
    v = std::max(v, excess);
  }
  return std::max(v, Scalar(0));
}

template <typename Scalar>
void check_feasible(const AllocationT<Scalar>& a, Scalar tol = Scalar(1e-12)) {
  if (a.num_users < 1 || a.num_cells < 1 || a.num_patterns() < 1)
    throw InputError("allocation: empty dimensions");
  if (a.user_share.rows() != a.num_users * a.num_cells ||
      a.user_share.cols() != a.num_patterns())
    throw InputError("allocation: share matrix shape mismatch");
  const Scalar v = feasibility_violation(a);
  if (!(v <= tol))
    throw InputError("allocation: infeasible (violation " + std::to_string(static_cast<double>(v)) +
                     ")");
}

// Patterns holding more than `threshold` of the schedule.
template <typename Scalar>
std::vector<Index> active_patterns(const AllocationT<Scalar>& a, Scalar threshold) {
  std::vector<Index> out;
  for (Index i = 0; i < a.num_patterns(); ++i)
    if (a.pattern_share[i] > threshold) out.push_back(i);
  return out;
}

// Largest count, over the patterns, of users holding more than `threshold`
// of share on two or more cells under that common pattern. At exact optima
// of the relaxed problem this count stays below the number of cells for
// every pattern; users splitting under *different* patterns do not add up,
// because the optimality conditions only tie shares within one pattern.
template <typename Scalar>
Index multi_associated_users(const AllocationT<Scalar>& a, Scalar threshold) {
  Index worst = 0;
  for (Index i = 0; i < a.num_patterns(); ++i) {
    Index count = 0;
    for (Index k = 0; k < a.num_users; ++k) {
      Index cells_here = 0;
      for (Index b = 0; b < a.num_cells; ++b)
        if (a.at(k, b, i) > threshold) ++cells_here;
      if (cells_here >= 2) ++count;
    }
    worst = std::max(worst, count);
  }
  return worst;
}

}  // namespace hetnet

#endif  // HETNET_ALLOCATION_HPP
