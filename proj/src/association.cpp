#include "hetnet/association.hpp"

#include <cmath>
#include <deque>
#include <string>
#include <utility>

namespace hetnet {

RelaxedAlg parse_relaxed_alg(const std::string& name) {
  if (name == "fw") return RelaxedAlg::FrankWolfe;
  if (name == "fc") return RelaxedAlg::FullyCorrective;
  throw InputError("unknown relaxed algorithm '" + name + "' (expected fw or fc)");
}

std::string to_string(RelaxedAlg alg) {
  return alg == RelaxedAlg::FrankWolfe ? "fw" : "fc";
}

namespace {

// Drop allocation mass sitting on non-associated (user, cell) pairs. Such
// mass earns a zero effective rate, so removing it changes no user rate
// and only loosens the per-cell budget constraints.
void strip_off_association(Allocation& alloc, const Association& assoc) {
  for (Index b = 0; b < alloc.num_cells; ++b)
    for (Index k = 0; k < alloc.num_users; ++k)
      if (!assoc.active(k, b)) alloc.user_share.row(k + alloc.num_users * b).setZero();
}

double off_association_mass(const Allocation& alloc, const Association& assoc) {
  double worst = 0.0;
  for (Index b = 0; b < alloc.num_cells; ++b)
    for (Index k = 0; k < alloc.num_users; ++k)
      if (!assoc.active(k, b))
        worst = std::max(worst, alloc.user_share.row(k + alloc.num_users * b).maxCoeff());
  return worst;
}

// The solvers place no mass off-association (those rates are zero, and the
// oracle leaves nonpositive entries unused), so any leak is a bug.
void check_no_leak(const Allocation& alloc, const Association& assoc, double tol) {
  const double leak = off_association_mass(alloc, assoc);
  if (leak > tol)
    throw InfeasibleAssociation("fixed-association solve leaked " + std::to_string(leak) +
                                " share onto a non-associated pair");
}

}  // namespace

JointResult solve_single_bs(const RateTensor& rates, const VectorX<double>& weights,
                            const SolverOptions& opts, RelaxedAlg alg) {
  opts.validate();
  const double tol_active = opts.effective_active_tol(rates.num_patterns);

  // All-on association round: the unrestricted relaxed solve, reused as
  // the multi-BS upper bound.
  SolverResult relaxed = solve_relaxed(rates, weights, opts, alg);
  JointResult out;
  out.relaxed_bound = relaxed.utility;
  bool inner_certified = relaxed.certified;
  std::string note = relaxed.note;

  AssociationUpdate upd = association_update(relaxed.allocation, rates, nullptr);
  Association a = std::move(upd.association);
  Allocation warm = std::move(relaxed.allocation);

  std::deque<Association> window;  // recently solved associations, cycle guard
  constexpr std::size_t kCycleWindow = 8;
  std::string stop;
  Index rounds = 0;
  while (rounds < opts.max_outer) {
    strip_off_association(warm, a);
    const RateTensor eff = effective_rates(rates, a);
    SolverResult res = solve_relaxed(eff, weights, opts, alg, &warm, nullptr);
    ++rounds;
    check_no_leak(res.allocation, a, tol_active);
    out.utility_trace.push_back(res.utility);
    inner_certified = inner_certified && res.certified;

    out.association = a;
    out.user_rates = std::move(res.user_rates);
    out.utility = res.utility;
    warm = std::move(res.allocation);

    const std::size_t n = out.utility_trace.size();
    if (n >= 2 && out.utility_trace[n - 1] - out.utility_trace[n - 2] < opts.epsilon / 10.0) {
      stop = "utility improvement below threshold";
      break;
    }
    upd = association_update(warm, rates, &a);
    if (upd.association == a) {
      stop = "association reached a fixed point";
      break;
    }
    bool cycled = false;
    for (const Association& seen : window)
      if (upd.association == seen) {
        cycled = true;
        break;
      }
    if (cycled) {
      stop = "association cycle detected; keeping the best iterate";
      break;
    }
    window.push_back(a);
    if (window.size() > kCycleWindow) window.pop_front();
    a = std::move(upd.association);
  }
  if (stop.empty()) stop = "outer-round budget exhausted";

  out.allocation = std::move(warm);
  out.bound_gap = out.relaxed_bound - out.utility;
  out.outer_iterations = rounds;
  out.certified = inner_certified;
  out.note = note.empty() ? stop : note + "; " + stop;
  return out;
}

Association re_association(const Scenario& s, double pico_bias_db) {
  if (!std::isfinite(pico_bias_db)) throw InputError("re_association: bias must be finite");
  const Index k_total = s.num_users();
  const Index b_total = s.num_cells();
  Association out{BoolGrid::Constant(k_total, b_total, false)};
  for (Index k = 0; k < k_total; ++k) {
    Index pick = 0;
    double best = -std::numeric_limits<double>::infinity();
    for (Index b = 0; b < b_total; ++b) {
      const double bias = s.cells[static_cast<std::size_t>(b)].kind == CellKind::Pico
                              ? pico_bias_db
                              : 0.0;
      const double metric = received_power_dbm(s, k, b) + bias;
      if (metric > best) {
        best = metric;
        pick = b;
      }
    }
    out.active(k, pick) = true;
  }
  return out;
}

JointResult solve_fixed_association(const RateTensor& rates, const VectorX<double>& weights,
                                    const Association& assoc, const SolverOptions& opts,
                                    RelaxedAlg alg) {
  opts.validate();
  const RateTensor eff = effective_rates(rates, assoc);
  const SolverResult res = solve_relaxed(eff, weights, opts, alg);
  check_no_leak(res.allocation, assoc, opts.effective_active_tol(rates.num_patterns));
  JointResult out;
  out.association = assoc;
  out.allocation = res.allocation;
  out.user_rates = res.user_rates;
  out.utility = res.utility;
  // No unrestricted solve here: report this solve's own certificate bound.
  out.relaxed_bound = res.utility + std::max(res.gap, 0.0);
  out.bound_gap = out.relaxed_bound - out.utility;
  out.outer_iterations = 1;
  out.utility_trace = {res.utility};
  out.certified = res.certified;
  out.note = res.note;
  return out;
}

}  // namespace hetnet
