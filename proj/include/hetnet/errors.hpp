#ifndef HETNET_ERRORS_HPP
#define HETNET_ERRORS_HPP

#include <memory>
#include <stdexcept>
#include <string>

namespace hetnet {

template <typename Scalar>
struct AllocationT;

// Invalid argument, option, or precondition violation by the caller.
struct InputError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Placement rejection sampling exhausted its attempt budget.
struct GenerationFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// An allocation leaves some user with zero long-term rate, so the
// logarithmic utility is undefined there.
struct DegenerateAllocation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// An association strands a user with no positive rate on any cell/pattern.
struct InfeasibleAssociation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// The line search (or a feasibility-drift guard) could not make progress.
// Carries the iterate the solver was at when it gave up.
struct NumericalStall : std::runtime_error {
  NumericalStall(const std::string& what, double step_arg = 0.0)
      : std::runtime_error(what), step(step_arg) {}
  double step = 0.0;
  std::shared_ptr<const AllocationT<double>> iterate;  // may be null
};

// A restricted subproblem missed its certificate within the iteration
// budget. Carries the best iterate found (mapped back to full indexing).
struct InnerSolveFailure : std::runtime_error {
  explicit InnerSolveFailure(const std::string& what) : std::runtime_error(what) {}
  std::shared_ptr<const AllocationT<double>> iterate;  // may be null
};

}  // namespace hetnet

#endif  // HETNET_ERRORS_HPP
