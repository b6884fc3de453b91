#include <doctest.h>

#include <cmath>
#include <vector>

#include "hetnet/corrective_solver.hpp"
#include "hetnet/errors.hpp"
#include "hetnet/fw_solver.hpp"
#include "hetnet/objective.hpp"
#include "test_util.hpp"

using namespace hetnet;

TEST_CASE("pattern gathering copies the chosen columns in order") {
  Rng rng(51);
  const RateTensor r = testutil::random_rates(rng, 3, 2, 4);
  const std::vector<Index> subset{2, 0};
  const RateTensor sub = gather_patterns(r, subset);
  REQUIRE(sub.num_patterns == 2);
  CHECK(sub.values.col(0) == r.values.col(2));
  CHECK(sub.values.col(1) == r.values.col(0));
  CHECK(sub.activity.col(0) == r.activity.col(2));

  CHECK_THROWS_AS(gather_patterns(r, {}), InputError);
  CHECK_THROWS_AS(gather_patterns(r, {4}), InputError);
  CHECK_THROWS_AS(gather_patterns(r, {-1}), InputError);
}

TEST_CASE("allocation gathering and scattering round-trip") {
  Rng rng(52);
  Allocation a = testutil::random_feasible(rng, 3, 2, 3);
  // move pattern 1's mass onto pattern 0 so the support is {0, 2}
  a.pattern_share[0] += a.pattern_share[1];
  a.user_share.col(0) += a.user_share.col(1);
  a.pattern_share[1] = 0.0;
  a.user_share.col(1).setZero();
  REQUIRE(feasibility_violation(a) <= 1e-12);

  const std::vector<Index> subset{0, 2};
  const Allocation sub = gather_allocation(a, subset);
  CHECK(sub.num_patterns() == 2);
  CHECK(sub.pattern_share.sum() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(sub.pattern_share[0] == doctest::Approx(a.pattern_share[0]));
  CHECK(sub.at(1, 1, 1) == doctest::Approx(a.at(1, 1, 2)));

  const Allocation back = scatter_allocation(sub, subset, 3);
  CHECK((back.user_share - a.user_share).cwiseAbs().maxCoeff() <= 1e-14);
  CHECK((back.pattern_share - a.pattern_share).cwiseAbs().maxCoeff() <= 1e-14);

  CHECK_THROWS_AS(gather_allocation(a, {1}), InputError);  // no mass there
}

TEST_CASE("restricted solve over the full set matches the direct solve") {
  Rng rng(53);
  const RateTensor r = testutil::random_rates(rng, 4, 2, 3);
  const VectorX<double> w = testutil::random_weights(rng, 4);
  SolverOptions opts;
  opts.epsilon = 1e-4;

  const SolverResult direct = solve_relaxed_fw(r, w, opts);
  const SolverResult restricted = restricted_solve(r, {0, 1, 2}, w, opts.epsilon, opts);
  CHECK(restricted.certified);
  CHECK(restricted.allocation.num_patterns() == 3);
  CHECK(restricted.utility == doctest::Approx(direct.utility).epsilon(1e-7));

  // warm start from a feasible point is accepted and not worsened
  const Allocation warm = testutil::random_feasible(rng, 4, 2, 3);
  const double u0 = utility(user_rates(r, warm), w);
  const SolverResult warmed = restricted_solve(r, {0, 1, 2}, w, opts.epsilon, opts, &warm);
  CHECK(warmed.utility >= u0 - 1e-9);
}

TEST_CASE("an uncertifiable subproblem raises a typed failure with the iterate") {
  Rng rng(54);
  const RateTensor r = testutil::random_rates(rng, 4, 2, 3);
  const VectorX<double> w = testutil::unit_weights(4);
  SolverOptions opts;
  opts.max_iters = 1;

  try {
    restricted_solve(r, {0, 1, 2}, w, 1e-12, opts);
    FAIL("expected InnerSolveFailure");
  } catch (const InnerSolveFailure& fail) {
    REQUIRE(fail.iterate != nullptr);
    CHECK(fail.iterate->num_patterns() == 3);  // scattered back to full space
    CHECK_NOTHROW(check_feasible(*fail.iterate));
  }
}

TEST_CASE("corrective and conditional-gradient solves agree within tolerance") {
  Rng rng(55);
  for (int rep = 0; rep < 5; ++rep) {
    const Index k_total = 2 + static_cast<Index>(rng.raw() % 4);
    const RateTensor r = testutil::random_rates(rng, k_total, 3, 5);
    const VectorX<double> w = testutil::random_weights(rng, k_total);
    SolverOptions opts;
    opts.epsilon = 1e-4;

    const SolverResult fw = solve_relaxed_fw(r, w, opts);
    const SolverResult fc = solve_relaxed_fc(r, w, opts);
    REQUIRE(fw.certified);
    REQUIRE(fc.certified);
    CHECK(fc.gap <= opts.epsilon);
    CHECK(feasibility_violation(fc.allocation) <= 1e-12);
    // both sit within epsilon of the same optimum
    CHECK(std::abs(fc.utility - fw.utility) <= opts.epsilon + 1e-9);
  }
}

TEST_CASE("corrective bookkeeping: outer trace and working set") {
  Rng rng(56);
  const RateTensor r = testutil::random_rates(rng, 5, 3, 6);
  const VectorX<double> w = testutil::random_weights(rng, 5);
  SolverOptions opts;
  opts.epsilon = 1e-4;
  const SolverResult res = solve_relaxed_fc(r, w, opts);
  REQUIRE(res.certified);

  REQUIRE(res.trace.size() >= 2);
  for (std::size_t t = 1; t < res.trace.size(); ++t) {
    CHECK(res.trace[t].utility >= res.trace[t - 1].utility - 1e-9);
    CHECK(res.trace[t].working_set >= res.trace[t - 1].working_set);
  }
  for (std::size_t t = 0; t + 1 < res.trace.size(); ++t) CHECK(res.trace[t].step == 0.0);
  CHECK(res.trace.back().utility == doctest::Approx(res.utility));
  CHECK(res.trace.back().gap == doctest::Approx(res.gap));

  // the sparse representation never uses more patterns than it examined
  CHECK(static_cast<Index>(res.active.size()) <= res.trace.back().working_set);
  // outer rounds grow the working set by at most one pattern each
  CHECK(res.trace.back().working_set <=
        res.trace.front().working_set + static_cast<Index>(res.iterations));
}

TEST_CASE("a single-candidate instance certifies without corrections") {
  RateTensor r;
  r.num_users = 2;
  r.num_cells = 1;
  r.num_patterns = 1;
  r.values = MatrixX<double>::Constant(2, 1, 2e6);
  r.activity = MatrixX<double>::Ones(1, 1);

  const SolverResult res = solve_relaxed_fc(r, testutil::unit_weights(2), SolverOptions{});
  CHECK(res.certified);
  CHECK(res.iterations == 0);
  CHECK(res.utility == doctest::Approx(2.0 * std::log(1e6)).epsilon(1e-12));
  CHECK(res.gap <= 1e-9);
}

TEST_CASE("corrective solve reaches the single-user closed form") {
  Rng rng(57);
  const RateTensor r = testutil::random_rates(rng, 1, 3, 5);
  SolverOptions opts;
  opts.epsilon = 1e-6;
  const SolverResult res = solve_relaxed_fc(r, testutil::unit_weights(1), opts);

  double best = 0.0;
  for (Index i = 0; i < 5; ++i) {
    double sum = 0.0;
    for (Index b = 0; b < 3; ++b) sum += r.at(0, b, i);
    best = std::max(best, sum);
  }
  CHECK(res.certified);
  CHECK(res.utility <= std::log(best) + 1e-9);
  CHECK(res.utility >= std::log(best) - opts.epsilon - 1e-9);
}

TEST_CASE("a caller-supplied start seeds the working set") {
  Rng rng(58);
  const RateTensor r = testutil::random_rates(rng, 1, 2, 4);
  LmoVertex<double> v;
  v.pattern = 2;
  v.user_for_cell = {r.at(0, 0, 2) > 0 ? Index{0} : Index{-1},
                     r.at(0, 1, 2) > 0 ? Index{0} : Index{-1}};
  const Allocation init = vertex_allocation(v, 1, 2, 4);

  SolverOptions opts;
  opts.epsilon = 1e-6;
  const SolverResult res = solve_relaxed_fc(r, testutil::unit_weights(1), opts, &init);
  REQUIRE(!res.trace.empty());
  CHECK(res.trace.front().working_set == 1);
  CHECK(res.certified);
}
