#ifndef HETNET_ASSOCIATION_HPP
#define HETNET_ASSOCIATION_HPP

#include <string>
#include <vector>

#include "hetnet/allocation.hpp"
#include "hetnet/corrective_solver.hpp"
#include "hetnet/errors.hpp"
#include "hetnet/fw_solver.hpp"
#include "hetnet/rates.hpp"
#include "hetnet/scenario.hpp"
#include "hetnet/types.hpp"

namespace hetnet {

// Which cells may serve each user. Rows are users, columns cells. The
// relaxed problem uses the all-on association; the single-BS problem keeps
// every row one-hot.
struct Association {
  BoolGrid active;  // users x cells

  Index num_users() const { return active.rows(); }
  Index num_cells() const { return active.cols(); }

  static Association all_on(Index users, Index cells) {
    return {BoolGrid::Constant(users, cells, true)};
  }

  bool single_bs() const {
    for (Index k = 0; k < active.rows(); ++k)
      if (active.row(k).count() != 1) return false;
    return true;
  }

  // Cell of user k under a one-hot row (-1 if the row is not one-hot).
  Index cell_of(Index k) const {
    if (active.row(k).count() != 1) return -1;
    for (Index b = 0; b < active.cols(); ++b)
      if (active(k, b)) return b;
    return -1;
  }

  friend bool operator==(const Association& x, const Association& y) {
    return x.active.rows() == y.active.rows() && x.active.cols() == y.active.cols() &&
           (x.active == y.active).all();
  }
};

// Rates with every non-associated (user, cell) pair zeroed, so the relaxed
// solvers run unchanged while resources granted off-association earn
// nothing. Throws InfeasibleAssociation when a user is left without a
// positive rate on any associated cell under any pattern.
template <typename Scalar>
RateTensorT<Scalar> effective_rates(const RateTensorT<Scalar>& rates, const Association& assoc) {
  if (assoc.num_users() != rates.num_users || assoc.num_cells() != rates.num_cells)
    throw InputError("association: shape does not match the rate tensor");
  RateTensorT<Scalar> out = rates;
  for (Index b = 0; b < rates.num_cells; ++b)
    for (Index k = 0; k < rates.num_users; ++k)
      if (!assoc.active(k, b)) out.values.row(k + rates.num_users * b).setZero();
  for (const Index k : zero_rate_users(out))
    throw InfeasibleAssociation("association strands user " + std::to_string(k) +
                                ": zero rate on every associated cell and pattern");
  return out;
}

struct AssociationUpdate {
  Association association;
  std::vector<Index> carried;  // users kept on their previous cell (zero allocated rate)
};

// Single-BS association step: each user moves to the cell providing the
// largest share-weighted rate under the current allocation, ties to the
// lowest cell index. A user the allocation gives no rate at all keeps its
// previous cell (flagged in `carried`); without a previous association
// that is an error.
template <typename Scalar>
AssociationUpdate association_update(const AllocationT<Scalar>& alloc,
                                     const RateTensorT<Scalar>& rates,
                                     const Association* prev = nullptr) {
  const Index k_total = rates.num_users;
  const Index b_total = rates.num_cells;
  if (alloc.num_users != k_total || alloc.num_cells != b_total ||
      alloc.num_patterns() != rates.num_patterns)
    throw InputError("association_update: allocation/rates shape mismatch");
  AssociationUpdate out;
  out.association.active = BoolGrid::Constant(k_total, b_total, false);
  for (Index k = 0; k < k_total; ++k) {
    Index pick = -1;
    Scalar best = 0;
    for (Index b = 0; b < b_total; ++b) {
      const Scalar got =
          alloc.user_share.row(k + k_total * b).dot(rates.values.row(k + k_total * b));
      if (got > best) {
        best = got;
        pick = b;
      }
    }
    if (pick < 0) {
      if (!prev || prev->active.row(k).count() == 0)
        throw InfeasibleAssociation("association_update: user " + std::to_string(k) +
                                    " has zero rate and no previous cell to keep");
      out.association.active.row(k) = prev->active.row(k);
      out.carried.push_back(k);
    } else {
      out.association.active(k, pick) = true;
    }
  }
  return out;
}

enum class RelaxedAlg { FrankWolfe, FullyCorrective };

RelaxedAlg parse_relaxed_alg(const std::string& name);
std::string to_string(RelaxedAlg alg);

template <typename Scalar>
SolverResultT<Scalar> solve_relaxed(const RateTensorT<Scalar>& rates, const VectorX<Scalar>& weights,
                                    const SolverOptions& opts, RelaxedAlg alg,
                                    const AllocationT<Scalar>* init = nullptr,
                                    const BoolGrid* allowed = nullptr) {
  return alg == RelaxedAlg::FrankWolfe ? solve_relaxed_fw(rates, weights, opts, init, allowed)
                                       : solve_relaxed_fc(rates, weights, opts, init, allowed);
}

template <typename Scalar>
struct JointResultT {
  Association association;
  AllocationT<Scalar> allocation;
  VectorX<Scalar> user_rates;
  Scalar utility = 0;
  Scalar relaxed_bound = 0;  // utility of the unrestricted relaxed solve
  Scalar bound_gap = 0;      // relaxed_bound - utility
  Index outer_iterations = 0;
  std::vector<double> utility_trace;  // one entry per single-BS round
  bool certified = false;             // every inner solve certified
  std::string note;
};

using JointResult = JointResultT<double>;

// Alternating single-BS association and allocation (joint solve). Starts
// from the all-on association, whose relaxed solve doubles as the
// multi-BS upper bound; then alternates a fixed-association relaxed solve
// on the effective rates with an association step, warm-starting each
// solve from the previous allocation (the moved users keep at least their
// old rates, so the round trace is nondecreasing).
JointResult solve_single_bs(const RateTensor& rates, const VectorX<double>& weights,
                            const SolverOptions& opts = {},
                            RelaxedAlg alg = RelaxedAlg::FrankWolfe);

// Range-expansion association: strongest downlink received power with a
// common bias (dB) added to every pico cell, ties to the lowest cell.
Association re_association(const Scenario& scenario, double pico_bias_db);

// Allocation under a frozen association: relaxed solve on the effective
// rates. The default initial point falls back to a uniform schedule when
// the association starves the single-pattern start.
JointResult solve_fixed_association(const RateTensor& rates, const VectorX<double>& weights,
                                    const Association& assoc, const SolverOptions& opts = {},
                                    RelaxedAlg alg = RelaxedAlg::FrankWolfe);

}  // namespace hetnet

#endif  // HETNET_ASSOCIATION_HPP
