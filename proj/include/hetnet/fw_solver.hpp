#ifndef HETNET_FW_SOLVER_HPP
#define HETNET_FW_SOLVER_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "hetnet/allocation.hpp"
#include "hetnet/errors.hpp"
#include "hetnet/objective.hpp"
#include "hetnet/rates.hpp"
#include "hetnet/types.hpp"

namespace hetnet {

struct SolverOptions {
  double epsilon = 1.0;              // certificate target for the optimality gap
  double initial_step = 1e-4;        // line-search step tried at the first iteration
  double backtrack = 0.8;            // step shrink/grow factor, in (0, 1)
  double sufficient_increase = 0.1;  // required fraction of the linear improvement, in (0, 1)
  Index max_iters = 200000;
  double active_tol = 0.0;      // absolute share threshold; 0 = auto, 1e-6 of a uniform split
  double inner_epsilon = 0.0;   // corrective subproblem certificate; 0 = auto, epsilon / 10
  Index max_outer = 512;        // corrective / alternating outer-round budget

  void validate() const {
    if (!(epsilon > 0)) throw InputError("options: epsilon must be positive");
    if (!(initial_step > 0) || initial_step > 1)
      throw InputError("options: initial_step must lie in (0, 1]");
    if (!(backtrack > 0) || !(backtrack < 1))
      throw InputError("options: backtrack must lie in (0, 1)");
    if (!(sufficient_increase > 0) || !(sufficient_increase < 1))
      throw InputError("options: sufficient_increase must lie in (0, 1)");
    if (max_iters < 1) throw InputError("options: max_iters must be >= 1");
    if (active_tol < 0) throw InputError("options: active_tol must be >= 0");
    if (inner_epsilon < 0) throw InputError("options: inner_epsilon must be >= 0");
    if (max_outer < 1) throw InputError("options: max_outer must be >= 1");
  }

  double effective_active_tol(Index num_patterns) const {
    return active_tol > 0 ? active_tol : 1e-6 / static_cast<double>(num_patterns);
  }

  double effective_inner_epsilon() const {
    return inner_epsilon > 0 ? inner_epsilon : epsilon / 10.0;
  }
};

// One extreme point of the feasible set: a single pattern gets the whole
// schedule and every cell hands its full share to one user (-1 = cell
// leaves its share unused, which only arises under an association mask).
template <typename Scalar>
struct LmoVertex {
  Index pattern = -1;
  std::vector<Index> user_for_cell;
  Scalar objective = 0;  // inner product of the vertex with the gradient
};

namespace detail {

constexpr Index kExactStateEntries = Index(1) << 21;  // refresh every iteration below this
constexpr Index kRefreshEvery = 64;                   // drift-control cadence above it
constexpr double kStepFloor = 1e-15;
constexpr double kShareDriftGuard = 1e-10;
constexpr double kFeasibilitySlack = 1e-12;

// The absolute guards above are calibrated for double; wider-epsilon
// scalars get proportionally wider guards.
template <typename Scalar>
double share_drift_guard() {
  return std::max(kShareDriftGuard,
                  1e3 * static_cast<double>(std::numeric_limits<Scalar>::epsilon()));
}

template <typename Scalar>
double feasibility_slack() {
  return std::max(kFeasibilitySlack,
                  1e2 * static_cast<double>(std::numeric_limits<Scalar>::epsilon()));
}

}  // namespace detail

// Linear maximisation over the extreme points: for each (cell, pattern)
// pick the user with the largest gradient entry, then the pattern with the
// largest per-cell sum. Ties break toward the lowest index. Because the
// per-cell budgets are inequalities, a cell whose entries are all
// nonpositive maximises by leaving its share unused (-1). `gradient` is
// (K*B) x I in the allocation layout.
template <typename Scalar>
LmoVertex<Scalar> lmo(const MatrixX<Scalar>& gradient, Index num_users, Index num_cells) {
  if (num_users < 1 || num_cells < 1 || gradient.rows() != num_users * num_cells ||
      gradient.cols() < 1)
    throw InputError("lmo: gradient shape does not match (users * cells) x patterns");
  LmoVertex<Scalar> best;
  std::vector<Index> users(static_cast<std::size_t>(num_cells));
  for (Index i = 0; i < gradient.cols(); ++i) {
    Eigen::Map<const MatrixX<Scalar>> slice(gradient.col(i).data(), num_users, num_cells);
    Scalar score = 0;
    for (Index b = 0; b < num_cells; ++b) {
      Index k = 0;
      const Scalar val = slice.col(b).maxCoeff(&k);  // first maximum: lowest user wins ties
      users[static_cast<std::size_t>(b)] = val > 0 ? k : -1;
      if (val > 0) score += val;
    }
    if (best.pattern < 0 || score > best.objective) {
      best.pattern = i;
      best.objective = score;
      best.user_for_cell = users;
    }
  }
  return best;
}

// Fused variant used inside the solvers: the gradient entry for (k, b, i)
// is scale[k] * rate(k, b, i), evaluated on the fly so no gradient tensor
// is materialised. `allowed` (users x cells) optionally masks which users
// each cell may serve; a cell with no admissible user keeps its share
// unused under that pattern.
template <typename Scalar>
LmoVertex<Scalar> lmo_scaled(const RateTensorT<Scalar>& rates, const VectorX<Scalar>& scale,
                             const BoolGrid* allowed = nullptr) {
  const Index k_total = rates.num_users;
  const Index b_total = rates.num_cells;
  if (scale.size() != k_total) throw InputError("lmo: scale size mismatch");
  if (allowed && (allowed->rows() != k_total || allowed->cols() != b_total))
    throw InputError("lmo: association mask shape mismatch");
  LmoVertex<Scalar> best;
  std::vector<Index> users(static_cast<std::size_t>(b_total));
  for (Index i = 0; i < rates.num_patterns; ++i) {
    auto slice = rates.pattern_slice(i);
    Scalar score = 0;
    for (Index b = 0; b < b_total; ++b) {
      Index pick = -1;
      Scalar val = 0;
      if (!allowed) {
        Index k = 0;
        val = (scale.array() * slice.col(b).array()).maxCoeff(&k);
        if (val > 0) pick = k;
      } else {
        for (Index k = 0; k < k_total; ++k) {
          if (!(*allowed)(k, b)) continue;
          const Scalar v = scale[k] * slice(k, b);
          if (v > val && v > 0) {
            val = v;
            pick = k;
          }
        }
      }
      if (pick < 0) val = 0;  // all-nonpositive column: leave the share unused
      users[static_cast<std::size_t>(b)] = pick;
      score += val;
    }
    if (best.pattern < 0 || score > best.objective) {
      best.pattern = i;
      best.objective = score;
      best.user_for_cell = users;
    }
  }
  return best;
}

// Rate each user would get at a vertex (full share from every cell that
// picked them under the vertex pattern).
template <typename Scalar>
VectorX<Scalar> vertex_user_rates(const LmoVertex<Scalar>& v, const RateTensorT<Scalar>& rates) {
  VectorX<Scalar> r = VectorX<Scalar>::Zero(rates.num_users);
  for (Index b = 0; b < rates.num_cells; ++b) {
    const Index k = v.user_for_cell[static_cast<std::size_t>(b)];
    if (k >= 0) r[k] += rates.at(k, b, v.pattern);
  }
  return r;
}

template <typename Scalar>
AllocationT<Scalar> vertex_allocation(const LmoVertex<Scalar>& v, Index num_users, Index num_cells,
                                      Index num_patterns) {
  AllocationT<Scalar> a = AllocationT<Scalar>::zeros(num_users, num_cells, num_patterns);
  a.pattern_share[v.pattern] = 1;
  for (Index b = 0; b < num_cells; ++b) {
    const Index k = v.user_for_cell[static_cast<std::size_t>(b)];
    if (k >= 0) a.at(k, b, v.pattern) = 1;
  }
  return a;
}

template <typename Scalar>
struct LineSearch {
  Scalar step = 0;
  Scalar value = 0;
  int evals = 0;
};

// Warm-started backtracking line search on a concave 1-D slice. Accepts a
// step g when value_at(g) >= value0 + sufficient_increase * g * slope.
// Starting from the previous accepted step: if the test already holds the
// step is grown by 1 / backtrack (capped at 1) while it keeps holding;
// otherwise it is shrunk by backtrack until it holds. Underflow below
// 1e-15 raises NumericalStall.
template <typename Scalar, typename F>
LineSearch<Scalar> armijo_search(F&& value_at, Scalar value0, Scalar slope, Scalar prev_step,
                                 const SolverOptions& opts) {
  if (!(slope > 0)) throw InputError("armijo: directional derivative must be positive");
  if (!(prev_step > 0)) throw InputError("armijo: previous step must be positive");
  const Scalar kappa = static_cast<Scalar>(opts.sufficient_increase);
  const Scalar beta = static_cast<Scalar>(opts.backtrack);
  auto acceptable = [&](Scalar g, Scalar v) { return v >= value0 + kappa * g * slope; };

  LineSearch<Scalar> out;
  Scalar step = std::min(prev_step, Scalar(1));
  Scalar value = value_at(step);
  ++out.evals;
  if (acceptable(step, value)) {
    while (step < 1) {
      const Scalar grown = std::min(step / beta, Scalar(1));
      const Scalar v = value_at(grown);
      ++out.evals;
      if (!acceptable(grown, v)) break;
      step = grown;
      value = v;
    }
  } else {
    for (;;) {
      step *= beta;
      if (step < static_cast<Scalar>(detail::kStepFloor))
        throw NumericalStall("armijo: step underflow, no acceptable step above the floor",
                             static_cast<double>(step));
      value = value_at(step);
      ++out.evals;
      if (acceptable(step, value)) break;
    }
  }
  out.step = step;
  out.value = value;
  return out;
}

// Spec-level step: line search along (vertex - current) with the exact
// utility, returning the accepted step and the blended next iterate.
// gap_dir is the directional derivative at the current point.
template <typename Scalar>
std::pair<Scalar, AllocationT<Scalar>> armijo_step(const AllocationT<Scalar>& current,
                                                   const AllocationT<Scalar>& vertex,
                                                   Scalar gap_dir, Scalar prev_step,
                                                   const SolverOptions& opts,
                                                   const RateTensorT<Scalar>& rates,
                                                   const VectorX<Scalar>& weights) {
  opts.validate();
  const VectorX<Scalar> r0 = user_rates(rates, current);
  const VectorX<Scalar> r1 = user_rates(rates, vertex);
  const Scalar u0 = utility(r0, weights);
  const auto value_at = [&](Scalar g) {
    const VectorX<Scalar> blend = (1 - g) * r0 + g * r1;
    return utility_or_lowest(blend, weights);
  };
  const LineSearch<Scalar> ls = armijo_search(value_at, u0, gap_dir, prev_step, opts);
  AllocationT<Scalar> next = current;
  next.user_share = (1 - ls.step) * current.user_share + ls.step * vertex.user_share;
  next.pattern_share = (1 - ls.step) * current.pattern_share + ls.step * vertex.pattern_share;
  return {ls.step, std::move(next)};
}

struct TracePoint {
  double utility = 0;
  double gap = 0;
  double step = 0;       // 0 on terminal / corrective rows
  Index active = 0;      // patterns above the active threshold
  Index working_set = 0; // corrective solver only
};

template <typename Scalar>
struct SolverResultT {
  AllocationT<Scalar> allocation;
  VectorX<Scalar> user_rates;
  Scalar utility = 0;
  Scalar gap = std::numeric_limits<Scalar>::infinity();
  Index iterations = 0;
  bool certified = false;
  std::vector<Index> active;
  std::vector<TracePoint> trace;
  std::string note;
};

using SolverResult = SolverResultT<double>;

namespace detail {

template <typename Scalar>
bool all_on_column(const RateTensorT<Scalar>& rates, Index i) {
  return (rates.activity.col(i).array() > Scalar(0)).all();
}

template <typename Scalar>
std::shared_ptr<const AllocationT<double>> snapshot(const AllocationT<Scalar>& stored,
                                                    Scalar fold) {
  AllocationT<Scalar> copy = stored;
  copy.user_share *= fold;
  copy.pattern_share *= fold;
  return std::make_shared<const AllocationT<double>>(copy.template cast<double>());
}

}  // namespace detail

// Default starting point: the all-on pattern when the candidate list has
// one (else candidate 0) takes the whole schedule, every user goes one-hot
// to its best admissible cell under that pattern, and each cell splits its
// share uniformly over the users that chose it. If that leaves some user
// with zero rate (possible on restricted candidate lists under a fixed
// association), fall back to a uniform split over every pattern with the
// same per-pattern best-cell rule, which covers every coverable user.
template <typename Scalar>
AllocationT<Scalar> default_init(const RateTensorT<Scalar>& rates,
                                 const BoolGrid* allowed = nullptr) {
  const Index k_total = rates.num_users;
  const Index b_total = rates.num_cells;
  const Index i_total = rates.num_patterns;
  if (k_total < 1 || b_total < 1 || i_total < 1) throw InputError("init: empty rate tensor");

  auto best_cell = [&](Index k, Index i) -> std::pair<Index, Scalar> {
    Index pick = -1;
    Scalar val = 0;
    for (Index b = 0; b < b_total; ++b) {
      if (allowed && !(*allowed)(k, b)) continue;
      const Scalar v = rates.at(k, b, i);
      if (pick < 0 || v > val) {
        pick = b;
        val = v;
      }
    }
    return {pick, val};
  };

  Index start = 0;
  for (Index i = 0; i < i_total; ++i)
    if (detail::all_on_column(rates, i)) {
      start = i;
      break;
    }

  AllocationT<Scalar> a = AllocationT<Scalar>::zeros(k_total, b_total, i_total);
  std::vector<Index> choice(static_cast<std::size_t>(k_total), -1);
  VectorX<Scalar> load = VectorX<Scalar>::Zero(b_total);
  bool covered = true;
  for (Index k = 0; k < k_total; ++k) {
    const auto [b, v] = best_cell(k, start);
    if (b < 0 || !(v > 0)) {
      covered = false;
      break;
    }
    choice[static_cast<std::size_t>(k)] = b;
    load[b] += 1;
  }
  if (covered) {
    a.pattern_share[start] = 1;
    for (Index k = 0; k < k_total; ++k) {
      const Index b = choice[static_cast<std::size_t>(k)];
      a.at(k, b, start) = Scalar(1) / load[b];
    }
    return a;
  }

  // Uniform-schedule fallback.
  a.user_share.setZero();
  a.pattern_share.setConstant(Scalar(1) / static_cast<Scalar>(i_total));
  VectorX<Scalar> any_rate = VectorX<Scalar>::Zero(k_total);
  for (Index i = 0; i < i_total; ++i) {
    std::vector<Index> pick(static_cast<std::size_t>(k_total), -1);
    load.setZero();
    for (Index k = 0; k < k_total; ++k) {
      const auto [b, v] = best_cell(k, i);
      if (b >= 0 && v > 0) {
        pick[static_cast<std::size_t>(k)] = b;
        load[b] += 1;
        any_rate[k] += v;
      }
    }
    for (Index k = 0; k < k_total; ++k) {
      const Index b = pick[static_cast<std::size_t>(k)];
      if (b >= 0) a.at(k, b, i) = a.pattern_share[i] / load[b];
    }
  }
  for (Index k = 0; k < k_total; ++k)
    if (!(any_rate[k] > 0))
      throw InputError("init: user " + std::to_string(k) +
                       " has zero rate on every admissible (cell, pattern)");
  return a;
}

// Certified conditional-gradient solve of the relaxed scheduling problem:
// maximise the weighted log-utility over feasible allocations. Iterates
// LMO -> duality-gap certificate -> warm-started backtracking step, and
// stops once the gap drops to opts.epsilon (certified) or the iteration
// budget runs out (flagged, not an error). The iterate is kept folded
// behind a scalar so one iteration costs O(K*B*I) reads for the LMO but
// only O(B) writes.
//
// `init` (optional) must be feasible; `allowed` masks which users each
// cell may serve, for fixed-association solves.
template <typename Scalar>
SolverResultT<Scalar> solve_relaxed_fw(const RateTensorT<Scalar>& rates,
                                       const VectorX<Scalar>& weights,
                                       const SolverOptions& opts = {},
                                       const AllocationT<Scalar>* init = nullptr,
                                       const BoolGrid* allowed = nullptr) {
  opts.validate();
  const Index k_total = rates.num_users;
  const Index b_total = rates.num_cells;
  const Index i_total = rates.num_patterns;
  if (k_total < 1 || b_total < 1 || i_total < 1) throw InputError("solve: empty rate tensor");
  if (rates.values.rows() != k_total * b_total || rates.values.cols() != i_total)
    throw InputError("solve: rate tensor shape mismatch");
  if (weights.size() != k_total) throw InputError("solve: weights size mismatch");
  if (!(weights.minCoeff() > 0)) throw InputError("solve: weights must be positive");
  if (rates.values.size() > 0 && rates.values.minCoeff() < 0)
    throw InputError("solve: rates must be nonnegative");

  AllocationT<Scalar> stored = init ? *init : default_init(rates, allowed);
  if (stored.num_users != k_total || stored.num_cells != b_total ||
      stored.num_patterns() != i_total)
    throw InputError("solve: init dimensions mismatch");
  check_feasible(stored, Scalar(detail::feasibility_slack<Scalar>()));
  Scalar fold = 1;  // true allocation = fold * stored

  const Scalar sum_w = weights.sum();
  VectorX<Scalar> r_user = user_rates(rates, stored);
  Scalar u_now = utility(r_user, weights);  // throws DegenerateAllocation on a zero rate
  MatrixX<Scalar> cell_sums = cell_share_sums(stored);

  const bool exact_state = k_total * b_total * i_total <= detail::kExactStateEntries;
  const double tol_active = opts.effective_active_tol(i_total);
  Scalar prev_step = std::min(static_cast<Scalar>(opts.initial_step), Scalar(1));

  SolverResultT<Scalar> result;
  bool certified = false;
  Index iter = 0;

  auto refresh = [&]() {
    r_user = fold * user_rates(rates, stored);
    u_now = utility(r_user, weights);
  };
  auto active_count = [&]() -> Index {
    return (stored.pattern_share.array() > static_cast<Scalar>(tol_active) / fold).count();
  };

  for (; iter < opts.max_iters; ++iter) {
    bool fresh = exact_state || (iter % detail::kRefreshEvery == 0);
    if (fresh) refresh();
    VectorX<Scalar> scale = weights.cwiseQuotient(r_user);
    LmoVertex<Scalar> vertex = lmo_scaled(rates, scale, allowed);
    Scalar gap = vertex.objective - sum_w;
    if (gap <= static_cast<Scalar>(opts.epsilon) && !fresh) {
      refresh();  // certify against drift-free numbers only
      scale = weights.cwiseQuotient(r_user);
      vertex = lmo_scaled(rates, scale, allowed);
      gap = vertex.objective - sum_w;
    }
    if (gap <= static_cast<Scalar>(opts.epsilon)) {
      certified = true;
      break;
    }

    const VectorX<Scalar> r_vertex = vertex_user_rates(vertex, rates);
    const auto value_at = [&](Scalar g) {
      return utility_or_lowest(VectorX<Scalar>(((1 - g) * r_user + g * r_vertex)), weights);
    };
    LineSearch<Scalar> ls;
    try {
      ls = armijo_search(value_at, u_now, gap, prev_step, opts);
    } catch (NumericalStall& stall) {
      stall.iterate = detail::snapshot(stored, fold);
      throw;
    }
    const Scalar step = ls.step;
    result.trace.push_back({static_cast<double>(u_now), static_cast<double>(gap),
                            static_cast<double>(step), active_count(), 0});

    if (step >= 1) {
      stored.user_share.setZero();
      stored.pattern_share.setZero();
      cell_sums.setZero();
      fold = 1;
      stored.pattern_share[vertex.pattern] = 1;
      for (Index b = 0; b < b_total; ++b) {
        const Index k = vertex.user_for_cell[static_cast<std::size_t>(b)];
        if (k >= 0) {
          stored.at(k, b, vertex.pattern) = 1;
          cell_sums(b, vertex.pattern) += 1;
        }
      }
    } else {
      fold *= (1 - step);
      const Scalar add = step / fold;
      stored.pattern_share[vertex.pattern] += add;
      for (Index b = 0; b < b_total; ++b) {
        const Index k = vertex.user_for_cell[static_cast<std::size_t>(b)];
        if (k >= 0) {
          stored.user_share(k + k_total * b, vertex.pattern) += add;
          cell_sums(b, vertex.pattern) += add;
        }
      }
    }

    // Keep the schedule mass pinned to one. The drift guard fires only on
    // real numerical trouble; renormalising through the shared fold keeps
    // the per-cell sums paired with the pattern shares exactly.
    const Scalar mass = fold * stored.pattern_share.sum();
    if (std::abs(static_cast<double>(mass) - 1.0) > detail::share_drift_guard<Scalar>()) {
      NumericalStall stall("solve: schedule mass drifted beyond the guard",
                           static_cast<double>(step));
      stall.iterate = detail::snapshot(stored, fold);
      throw stall;
    }
    fold /= mass;

    const Scalar worst =
        fold * (cell_sums.array().rowwise() - stored.pattern_share.transpose().array())
                   .maxCoeff();
    if (static_cast<double>(worst) > detail::feasibility_slack<Scalar>()) {
      NumericalStall stall("solve: per-cell share sums drifted above the pattern share",
                           static_cast<double>(step));
      stall.iterate = detail::snapshot(stored, fold);
      throw stall;
    }

    r_user = (1 - step) * r_user + step * r_vertex;
    u_now = ls.value;
    prev_step = step;

    if (fold < Scalar(1e-100)) {
      stored.user_share *= fold;
      stored.pattern_share *= fold;
      cell_sums *= fold;
      fold = 1;
    }
  }

  // Materialise the iterate and recompute everything it reports from
  // scratch so the returned certificate never rests on maintained state.
  result.allocation = std::move(stored);
  result.allocation.user_share *= fold;
  result.allocation.pattern_share *= fold;
  result.user_rates = user_rates(rates, result.allocation);
  result.utility = utility(result.user_rates, weights);
  const VectorX<Scalar> final_scale = weights.cwiseQuotient(result.user_rates);
  result.gap = lmo_scaled(rates, final_scale, allowed).objective - sum_w;
  result.certified = certified || result.gap <= static_cast<Scalar>(opts.epsilon);
  result.iterations = iter;
  check_feasible(result.allocation, Scalar(detail::feasibility_slack<Scalar>()));
  result.active = active_patterns(result.allocation, static_cast<Scalar>(tol_active));
  result.trace.push_back({static_cast<double>(result.utility), static_cast<double>(result.gap),
                          0.0, static_cast<Index>(result.active.size()), 0});
  if (!result.certified) result.note = "iteration budget exhausted before certificate";
  return result;
}

}  // namespace hetnet

#endif  // HETNET_FW_SOLVER_HPP
