#ifndef HETNET_CORRECTIVE_SOLVER_HPP
#define HETNET_CORRECTIVE_SOLVER_HPP

#include <algorithm>
#include <string>
#include <utility>
#include <vector>

#include "hetnet/allocation.hpp"
#include "hetnet/errors.hpp"
#include "hetnet/fw_solver.hpp"
#include "hetnet/objective.hpp"
#include "hetnet/rates.hpp"
#include "hetnet/types.hpp"

namespace hetnet {

// Rate tensor restricted to a subset of the candidate patterns (columns
// gathered in subset order).
template <typename Scalar>
RateTensorT<Scalar> gather_patterns(const RateTensorT<Scalar>& rates,
                                    const std::vector<Index>& subset) {
  if (subset.empty()) throw InputError("gather: empty pattern subset");
  RateTensorT<Scalar> out;
  out.num_users = rates.num_users;
  out.num_cells = rates.num_cells;
  out.num_patterns = static_cast<Index>(subset.size());
  out.values.resize(rates.values.rows(), out.num_patterns);
  out.activity.resize(rates.num_cells, out.num_patterns);
  for (Index j = 0; j < out.num_patterns; ++j) {
    const Index i = subset[static_cast<std::size_t>(j)];
    if (i < 0 || i >= rates.num_patterns) throw InputError("gather: pattern index out of range");
    out.values.col(j) = rates.values.col(i);
    out.activity.col(j) = rates.activity.col(i);
  }
  return out;
}

// Allocation restricted to a pattern subset. The caller guarantees the
// allocation puts (essentially) no mass outside the subset; anything it
// does is dropped, so the pattern shares are renormalised to keep the
// schedule mass at one.
template <typename Scalar>
AllocationT<Scalar> gather_allocation(const AllocationT<Scalar>& full,
                                      const std::vector<Index>& subset) {
  AllocationT<Scalar> out =
      AllocationT<Scalar>::zeros(full.num_users, full.num_cells, static_cast<Index>(subset.size()));
  for (Index j = 0; j < out.num_patterns(); ++j) {
    const Index i = subset[static_cast<std::size_t>(j)];
    out.user_share.col(j) = full.user_share.col(i);
    out.pattern_share[j] = full.pattern_share[i];
  }
  const Scalar mass = out.pattern_share.sum();
  if (!(mass > 0)) throw InputError("gather: allocation has no mass on the subset");
  out.pattern_share /= mass;
  out.user_share /= mass;
  return out;
}

// Expand a subset-space allocation back to the full candidate list.
template <typename Scalar>
AllocationT<Scalar> scatter_allocation(const AllocationT<Scalar>& sub,
                                       const std::vector<Index>& subset, Index num_patterns) {
  AllocationT<Scalar> out =
      AllocationT<Scalar>::zeros(sub.num_users, sub.num_cells, num_patterns);
  for (Index j = 0; j < sub.num_patterns(); ++j) {
    const Index i = subset[static_cast<std::size_t>(j)];
    out.user_share.col(i) = sub.user_share.col(j);
    out.pattern_share[i] = sub.pattern_share[j];
  }
  return out;
}

// Correction subproblem: re-solve the relaxed problem exactly over the
// working set of patterns, warm-started from the current (full-space)
// iterate. Returns a full-space result whose gap certifies the subproblem
// only. Raises InnerSolveFailure (carrying the best full-space iterate)
// when the subproblem cannot be certified.
template <typename Scalar>
SolverResultT<Scalar> restricted_solve(const RateTensorT<Scalar>& rates,
                                       const std::vector<Index>& subset,
                                       const VectorX<Scalar>& weights, double inner_epsilon,
                                       const SolverOptions& base_opts,
                                       const AllocationT<Scalar>* warm = nullptr,
                                       const BoolGrid* allowed = nullptr) {
  const RateTensorT<Scalar> sub_rates = gather_patterns(rates, subset);
  SolverOptions opts = base_opts;
  opts.epsilon = inner_epsilon;
  opts.active_tol = base_opts.effective_active_tol(rates.num_patterns);

  SolverResultT<Scalar> sub;
  try {
    if (warm) {
      const AllocationT<Scalar> sub_init = gather_allocation(*warm, subset);
      sub = solve_relaxed_fw(sub_rates, weights, opts, &sub_init, allowed);
    } else {
      sub = solve_relaxed_fw(sub_rates, weights, opts,
                             static_cast<const AllocationT<Scalar>*>(nullptr), allowed);
    }
  } catch (const NumericalStall& stall) {
    InnerSolveFailure fail(std::string("correction subproblem stalled: ") + stall.what());
    if (stall.iterate)
      fail.iterate = std::make_shared<const AllocationT<double>>(
          scatter_allocation(*stall.iterate, subset, rates.num_patterns));
    throw fail;
  }

  SolverResultT<Scalar> out;
  out.allocation = scatter_allocation(sub.allocation, subset, rates.num_patterns);
  out.user_rates = std::move(sub.user_rates);
  out.utility = sub.utility;
  out.gap = sub.gap;
  out.iterations = sub.iterations;
  out.certified = sub.certified;
  out.active = active_patterns(out.allocation, opts.active_tol);
  if (!sub.certified) {
    InnerSolveFailure fail("correction subproblem exhausted its budget uncertified");
    fail.iterate =
        std::make_shared<const AllocationT<double>>(out.allocation.template cast<double>());
    throw fail;
  }
  return out;
}

// Fully-corrective variant: alternate a full linear oracle with an exact
// re-optimisation over every pattern discovered so far. While corrections
// certify, the working set grows by at least one pattern per round (a
// pattern already in the set cannot beat the subproblem certificate), so
// the loop terminates within the candidate count. A correction that runs
// out of budget still hands back its best iterate — feasible and no worse
// than the warm start — so the loop adopts it and continues: the stopping
// certificate is the full-set gap computed at the top of each round, not
// the subproblem's. Only a failed round with no utility progress (or the
// outer budget) ends the loop early. Trace rows are per outer round;
// `working_set` records the set size entering the round.
template <typename Scalar>
SolverResultT<Scalar> solve_relaxed_fc(const RateTensorT<Scalar>& rates,
                                       const VectorX<Scalar>& weights,
                                       const SolverOptions& opts = {},
                                       const AllocationT<Scalar>* init = nullptr,
                                       const BoolGrid* allowed = nullptr) {
  opts.validate();
  const Index i_total = rates.num_patterns;
  const double inner_eps = opts.effective_inner_epsilon();
  const double tol_active = opts.effective_active_tol(i_total);
  const Scalar sum_w = weights.sum();

  AllocationT<Scalar> current = init ? *init : default_init(rates, allowed);
  check_feasible(current, Scalar(1e-12));
  std::vector<Index> working;
  for (Index i = 0; i < i_total; ++i)
    if (current.pattern_share[i] > 0) working.push_back(i);

  SolverResultT<Scalar> result;
  bool certified = false;
  std::string note;
  Index inner_failures = 0;
  Index outer = 0;
  for (; outer < opts.max_outer; ++outer) {
    const VectorX<Scalar> r_user = user_rates(rates, current);
    const Scalar u_now = utility(r_user, weights);
    const VectorX<Scalar> scale = weights.cwiseQuotient(r_user);
    const LmoVertex<Scalar> vertex = lmo_scaled(rates, scale, allowed);
    const Scalar gap = vertex.objective - sum_w;
    result.trace.push_back({static_cast<double>(u_now), static_cast<double>(gap), 0.0,
                            static_cast<Index>(active_patterns(current, tol_active).size()),
                            static_cast<Index>(working.size())});
    if (gap <= static_cast<Scalar>(opts.epsilon)) {
      certified = true;
      break;
    }
    const auto at = std::lower_bound(working.begin(), working.end(), vertex.pattern);
    if (at == working.end() || *at != vertex.pattern) working.insert(at, vertex.pattern);
    try {
      SolverResultT<Scalar> corrected =
          restricted_solve(rates, working, weights, inner_eps, opts, &current, allowed);
      current = std::move(corrected.allocation);
    } catch (const InnerSolveFailure& fail) {
      ++inner_failures;
      note = fail.what();
      if (!fail.iterate || fail.iterate->num_patterns() != i_total) break;
      AllocationT<Scalar> adopted = fail.iterate->template cast<Scalar>();
      const Scalar u_adopted = utility(user_rates(rates, adopted), weights);
      const bool progressed = u_adopted > u_now;
      current = std::move(adopted);
      if (!progressed) break;  // stalled: further rounds would replay the same solve
    }
  }
  if (!certified && note.empty() && outer == opts.max_outer)
    note = "outer-round budget exhausted before certificate";

  result.allocation = std::move(current);
  result.user_rates = user_rates(rates, result.allocation);
  result.utility = utility(result.user_rates, weights);
  const VectorX<Scalar> final_scale = weights.cwiseQuotient(result.user_rates);
  result.gap = lmo_scaled(rates, final_scale, allowed).objective - sum_w;
  result.certified = result.gap <= static_cast<Scalar>(opts.epsilon);
  if (result.certified && inner_failures > 0)
    note = std::to_string(inner_failures) +
           " correction round(s) ran out of budget; continued on their best iterates";
  result.iterations = outer;
  check_feasible(result.allocation, Scalar(1e-12));
  result.active = active_patterns(result.allocation, static_cast<Scalar>(tol_active));
  result.trace.push_back({static_cast<double>(result.utility), static_cast<double>(result.gap),
                          0.0, static_cast<Index>(result.active.size()),
                          static_cast<Index>(working.size())});
  result.note = std::move(note);
  return result;
}

}  // namespace hetnet

#endif  // HETNET_CORRECTIVE_SOLVER_HPP
