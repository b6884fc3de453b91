#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "hetnet/errors.hpp"
#include "hetnet/fw_solver.hpp"
#include "hetnet/objective.hpp"
#include "test_util.hpp"

using namespace hetnet;

TEST_CASE("analytic linear oracle matches vertex enumeration") {
  Rng rng(31);
  for (int rep = 0; rep < 150; ++rep) {
    const Index k_total = 1 + static_cast<Index>(rng.raw() % 5);
    const Index b_total = 1 + static_cast<Index>(rng.raw() % 4);
    const Index i_total = 1 + static_cast<Index>(rng.raw() % 6);
    MatrixX<double> gradient(k_total * b_total, i_total);
    for (Index c = 0; c < gradient.cols(); ++c)
      for (Index r = 0; r < gradient.rows(); ++r) gradient(r, c) = rng.uniform(0.01, 5.0);

    const LmoVertex<double> fast = lmo(gradient, k_total, b_total);
    const LmoVertex<double> slow = testutil::brute_force_lmo(gradient, k_total, b_total);
    REQUIRE(fast.pattern == slow.pattern);
    CHECK(fast.user_for_cell == slow.user_for_cell);
    CHECK(fast.objective == doctest::Approx(slow.objective).epsilon(1e-13));
  }
}

TEST_CASE("oracle leaves all-nonpositive cells unused") {
  MatrixX<double> g(4, 2);  // 2 users x 2 cells
  // pattern 0: cell 0 strictly negative, cell 1 positive
  g.col(0) << -1.0, -2.0, 3.0, 1.0;
  // pattern 1: cell 0 tied positive, cell 1 all zero
  g.col(1) << 1.0, 1.0, 0.0, 0.0;

  const LmoVertex<double> v = lmo(g, 2, 2);
  CHECK(v.pattern == 0);
  CHECK(v.objective == doctest::Approx(3.0));
  CHECK(v.user_for_cell == std::vector<Index>{-1, 0});

  MatrixX<double> all_bad = MatrixX<double>::Constant(4, 2, -1.0);
  const LmoVertex<double> idle = lmo(all_bad, 2, 2);
  CHECK(idle.pattern == 0);
  CHECK(idle.objective == 0.0);
  CHECK(idle.user_for_cell == std::vector<Index>{-1, -1});
}

TEST_CASE("oracle ties break to the lowest index") {
  MatrixX<double> g = MatrixX<double>::Constant(6, 3, 1.0);  // 3 users x 2 cells x 3 patterns
  const LmoVertex<double> v = lmo(g, 3, 2);
  CHECK(v.pattern == 0);
  CHECK(v.user_for_cell == std::vector<Index>{0, 0});
  CHECK(v.objective == doctest::Approx(2.0));
}

TEST_CASE("fused oracle equals the oracle on the assembled gradient") {
  Rng rng(32);
  for (int rep = 0; rep < 20; ++rep) {
    const RateTensor r = testutil::random_rates(rng, 5, 3, 4);
    const Allocation a = testutil::random_feasible(rng, 5, 3, 4);
    const VectorX<double> w = testutil::random_weights(rng, 5);
    const UtilityGradient<double> ug = utility_and_gradient(a, r, w);
    const VectorX<double> scale = w.cwiseQuotient(user_rates(r, a));

    const LmoVertex<double> via_gradient = lmo(ug.gradient, 5, 3);
    const LmoVertex<double> fused = lmo_scaled(r, scale);
    CHECK(fused.pattern == via_gradient.pattern);
    CHECK(fused.user_for_cell == via_gradient.user_for_cell);
    CHECK(fused.objective == doctest::Approx(via_gradient.objective).epsilon(1e-12));
  }
}

TEST_CASE("fused oracle honours an association mask") {
  Rng rng(33);
  RateTensor r = testutil::random_rates(rng, 4, 3, 3);
  r.activity.setOnes();
  for (Index c = 0; c < r.values.cols(); ++c)
    for (Index row = 0; row < r.values.rows(); ++row) r.values(row, c) = rng.uniform(1e5, 1e6);

  BoolGrid allowed = BoolGrid::Constant(4, 3, false);
  for (Index k = 0; k < 4; ++k) allowed(k, k % 3) = true;

  const VectorX<double> scale = VectorX<double>::Ones(4);
  const LmoVertex<double> v = lmo_scaled(r, scale, &allowed);
  REQUIRE(v.pattern >= 0);
  double expected = 0.0;
  for (Index b = 0; b < 3; ++b) {
    const Index k = v.user_for_cell[static_cast<std::size_t>(b)];
    REQUIRE(k >= 0);
    CHECK(allowed(k, b));
    expected += r.at(k, b, v.pattern);
  }
  CHECK(v.objective == doctest::Approx(expected).epsilon(1e-13));

  // a cell with no admissible user leaves its share unused
  BoolGrid none = allowed;
  none.col(2).setConstant(false);
  const LmoVertex<double> idle = lmo_scaled(r, scale, &none);
  CHECK(idle.user_for_cell[2] == -1);
}

TEST_CASE("oracle input validation") {
  MatrixX<double> g = MatrixX<double>::Ones(6, 2);
  CHECK_THROWS_AS(lmo(g, 4, 2), InputError);  // 4*2 != 6

  Rng rng(34);
  const RateTensor r = testutil::random_rates(rng, 3, 2, 2);
  const VectorX<double> short_scale = VectorX<double>::Ones(2);
  CHECK_THROWS_AS(lmo_scaled(r, short_scale), InputError);
  const VectorX<double> scale = VectorX<double>::Ones(3);
  BoolGrid wrong = BoolGrid::Constant(2, 2, true);
  CHECK_THROWS_AS(lmo_scaled(r, scale, &wrong), InputError);
}

TEST_CASE("vertex expansion helpers") {
  Rng rng(35);
  const RateTensor r = testutil::random_rates(rng, 3, 3, 2);
  LmoVertex<double> v;
  v.pattern = 1;
  v.user_for_cell = {0, -1, 2};

  const VectorX<double> vr = vertex_user_rates(v, r);
  CHECK(vr[0] == doctest::Approx(r.at(0, 0, 1)));
  CHECK(vr[1] == 0.0);
  CHECK(vr[2] == doctest::Approx(r.at(2, 2, 1)));

  const Allocation a = vertex_allocation(v, 3, 3, 2);
  CHECK_NOTHROW(check_feasible(a));
  CHECK(a.pattern_share[1] == 1.0);
  CHECK(a.at(0, 0, 1) == 1.0);
  CHECK(a.at(2, 2, 1) == 1.0);
  CHECK(a.user_share.col(0).cwiseAbs().maxCoeff() == 0.0);
  CHECK(a.user_share.col(1).sum() == doctest::Approx(2.0));
}

TEST_CASE("backtracking line search, scripted slices") {
  SolverOptions opts;  // backtrack 0.8, sufficient_increase 0.1

  SUBCASE("a linear slice grows the warm step all the way to one") {
    const auto ls = armijo_search([](double g) { return g; }, 0.0, 1.0, 1e-4, opts);
    CHECK(ls.step == 1.0);
    CHECK(ls.value == doctest::Approx(1.0));
  }
  SUBCASE("growth stops at the first rejected enlargement") {
    // rises with slope 1 to 0.4, then falls with slope -2
    const auto hinge = [](double g) { return g <= 0.4 ? g : 0.4 - 2.0 * (g - 0.4); };
    const auto ls = armijo_search<double>(hinge, 0.0, 1.0, 0.5, opts);
    CHECK(ls.step == doctest::Approx(0.5));
    CHECK(ls.evals == 2);  // accept 0.5, reject 0.625
  }
  SUBCASE("a too-large previous step is clamped then backtracked") {
    const auto hinge = [](double g) { return g <= 0.4 ? g : 0.4 - 2.0 * (g - 0.4); };
    const auto ls = armijo_search<double>(hinge, 0.0, 1.0, 2.0, opts);
    // 1 and 0.8 and 0.64 fail the sufficient-increase test, 0.512 passes
    CHECK(ls.step == doctest::Approx(0.512));
    CHECK(ls.evals == 4);
  }
  SUBCASE("an unimprovable slice stalls out below the floor") {
    const auto bad = [](double) { return -std::numeric_limits<double>::infinity(); };
    CHECK_THROWS_AS(armijo_search<double>(bad, 0.0, 1.0, 0.5, opts), NumericalStall);
  }
  SUBCASE("direction and warm step must be positive") {
    const auto id = [](double g) { return g; };
    CHECK_THROWS_AS(armijo_search<double>(id, 0.0, 0.0, 0.5, opts), InputError);
    CHECK_THROWS_AS(armijo_search<double>(id, 0.0, 1.0, 0.0, opts), InputError);
  }
}

TEST_CASE("blended step moves toward the oracle vertex") {
  Rng rng(36);
  const RateTensor r = testutil::random_rates(rng, 4, 2, 3);
  const Allocation cur = testutil::random_feasible(rng, 4, 2, 3);
  const VectorX<double> w = testutil::unit_weights(4);

  const VectorX<double> scale = w.cwiseQuotient(user_rates(r, cur));
  const LmoVertex<double> v = lmo_scaled(r, scale);
  const double gap = v.objective - w.sum();
  REQUIRE(gap > 0);  // a random interior point is never optimal
  const Allocation vtx = vertex_allocation(v, 4, 2, 3);

  const auto [step, next] = armijo_step(cur, vtx, gap, 1e-3, SolverOptions{}, r, w);
  CHECK(step > 0);
  CHECK(step <= 1.0);
  const MatrixX<double> expect =
      (1.0 - step) * cur.user_share + step * vtx.user_share;
  CHECK((next.user_share - expect).cwiseAbs().maxCoeff() <= 1e-15);
  CHECK(utility(user_rates(r, next), w) > utility(user_rates(r, cur), w));
  CHECK_NOTHROW(check_feasible(next));
}

TEST_CASE("single-user instances are solved to the closed form") {
  Rng rng(37);
  for (int rep = 0; rep < 5; ++rep) {
    const RateTensor r = testutil::random_rates(rng, 1, 3, 4);
    SolverOptions opts;
    opts.epsilon = 1e-6;
    const SolverResult res = solve_relaxed_fw(r, testutil::unit_weights(1), opts);

    double best = 0.0;
    for (Index i = 0; i < 4; ++i) {
      double sum = 0.0;
      for (Index b = 0; b < 3; ++b) sum += r.at(0, b, i);
      best = std::max(best, sum);
    }
    const double ideal = std::log(best);
    CHECK(res.certified);
    CHECK(res.gap <= opts.epsilon);
    CHECK(res.utility <= ideal + 1e-9);
    CHECK(res.utility >= ideal - opts.epsilon - 1e-9);
  }
}

TEST_CASE("one shared cell splits in proportion to the weights") {
  RateTensor r;
  r.num_users = 2;
  r.num_cells = 1;
  r.num_patterns = 1;
  r.values = MatrixX<double>::Constant(2, 1, 2e6);
  r.activity = MatrixX<double>::Ones(1, 1);

  SolverOptions opts;
  opts.epsilon = 1e-7;

  SUBCASE("equal weights halve the cell") {
    const SolverResult res = solve_relaxed_fw(r, testutil::unit_weights(2), opts);
    CHECK(res.certified);
    CHECK(res.utility == doctest::Approx(2.0 * std::log(1e6)).epsilon(1e-7));
    CHECK(res.user_rates[0] == doctest::Approx(1e6).epsilon(1e-3));
  }
  SUBCASE("weights tilt the split") {
    VectorX<double> w(2);
    w << 1.0, 3.0;
    const SolverResult res = solve_relaxed_fw(r, w, opts);
    const double ideal = std::log(2e6 * 0.25) + 3.0 * std::log(2e6 * 0.75);
    CHECK(res.certified);
    CHECK(res.utility <= ideal + 1e-9);
    CHECK(res.utility >= ideal - opts.epsilon - 1e-9);
  }
}

TEST_CASE("certificate dominates every feasible point") {
  Rng rng(38);
  const RateTensor r = testutil::random_rates(rng, 5, 3, 4);
  const VectorX<double> w = testutil::random_weights(rng, 5);
  SolverOptions opts;
  opts.epsilon = 1e-4;
  const SolverResult res = solve_relaxed_fw(r, w, opts);
  REQUIRE(res.certified);
  for (int rep = 0; rep < 20; ++rep) {
    const Allocation y = testutil::random_feasible(rng, 5, 3, 4);
    CHECK(utility(user_rates(r, y), w) <= res.utility + res.gap + 1e-9);
  }
}

TEST_CASE("solve bookkeeping: trace, certificate, feasibility") {
  Rng rng(39);
  const RateTensor r = testutil::random_rates(rng, 6, 3, 5);
  const VectorX<double> w = testutil::random_weights(rng, 6);
  SolverOptions opts;
  opts.epsilon = 1e-5;
  const SolverResult res = solve_relaxed_fw(r, w, opts);

  REQUIRE(res.certified);
  CHECK(res.gap <= opts.epsilon);
  CHECK(res.gap >= -1e-9);
  CHECK(feasibility_violation(res.allocation) <= 1e-12);
  CHECK(res.user_rates.minCoeff() > 0);

  REQUIRE(!res.trace.empty());
  for (std::size_t t = 1; t < res.trace.size(); ++t)
    CHECK(res.trace[t].utility >= res.trace[t - 1].utility - 1e-9);
  for (std::size_t t = 0; t + 1 < res.trace.size(); ++t) {
    CHECK(res.trace[t].step > 0);
    CHECK(res.trace[t].step <= 1.0);
    CHECK(res.trace[t].gap > opts.epsilon);  // iteration rows are pre-certificate
  }
  const TracePoint& last = res.trace.back();
  CHECK(last.utility == doctest::Approx(res.utility));
  CHECK(last.gap == doctest::Approx(res.gap));
  CHECK(last.step == 0.0);
  CHECK(last.active == static_cast<Index>(res.active.size()));

  for (const Index i : res.active) {
    CHECK(i >= 0);
    CHECK(i < r.num_patterns);
    CHECK(res.allocation.pattern_share[i] > opts.effective_active_tol(r.num_patterns));
  }
}

TEST_CASE("iteration budget exhaustion is flagged, not fatal") {
  Rng rng(40);
  const RateTensor r = testutil::random_rates(rng, 5, 3, 4);
  SolverOptions opts;
  opts.epsilon = 1e-12;
  opts.max_iters = 1;
  const SolverResult res = solve_relaxed_fw(r, testutil::unit_weights(5), opts);
  CHECK_FALSE(res.certified);
  CHECK(res.iterations == 1);
  CHECK(!res.note.empty());
  CHECK_NOTHROW(check_feasible(res.allocation));
}

TEST_CASE("a caller-supplied start is respected and never worsened") {
  Rng rng(41);
  const RateTensor r = testutil::random_rates(rng, 4, 2, 3);
  const VectorX<double> w = testutil::unit_weights(4);
  const Allocation init = testutil::random_feasible(rng, 4, 2, 3);
  const double u0 = utility(user_rates(r, init), w);

  SolverOptions opts;
  opts.epsilon = 1e-5;
  const SolverResult res = solve_relaxed_fw(r, w, opts, &init);
  CHECK(res.utility >= u0 - 1e-9);

  Allocation bad = init;
  bad.pattern_share[0] += 0.5;  // schedule mass 1.5
  CHECK_THROWS_AS(solve_relaxed_fw(r, w, opts, &bad), InputError);

  const Allocation wrong = Allocation::zeros(4, 2, 2);
  CHECK_THROWS_AS(solve_relaxed_fw(r, w, opts, &wrong), InputError);
}

TEST_CASE("an association mask confines the allocation") {
  Rng rng(42);
  RateTensor r = testutil::random_rates(rng, 5, 3, 3);
  r.activity.setOnes();
  for (Index c = 0; c < r.values.cols(); ++c)
    for (Index row = 0; row < r.values.rows(); ++row) r.values(row, c) = rng.uniform(1e5, 3e6);

  BoolGrid allowed = BoolGrid::Constant(5, 3, false);
  for (Index k = 0; k < 5; ++k) allowed(k, k % 3) = true;

  SolverOptions opts;
  opts.epsilon = 1e-5;
  const SolverResult res = solve_relaxed_fw(r, testutil::unit_weights(5), opts,
                                            static_cast<const Allocation*>(nullptr), &allowed);
  CHECK(res.certified);
  CHECK(res.user_rates.minCoeff() > 0);
  double off_mass = 0.0;
  for (Index k = 0; k < 5; ++k)
    for (Index b = 0; b < 3; ++b) {
      if (allowed(k, b)) continue;
      for (Index i = 0; i < 3; ++i) off_mass = std::max(off_mass, res.allocation.at(k, b, i));
    }
  CHECK(off_mass == 0.0);
}

TEST_CASE("solver input validation") {
  Rng rng(43);
  RateTensor r = testutil::random_rates(rng, 3, 2, 2);
  const VectorX<double> w = testutil::unit_weights(3);

  const VectorX<double> short_w = VectorX<double>::Ones(2);
  CHECK_THROWS_AS(solve_relaxed_fw(r, short_w), InputError);
  VectorX<double> zero_w = VectorX<double>::Zero(3);
  CHECK_THROWS_AS(solve_relaxed_fw(r, zero_w), InputError);

  SolverOptions bad;
  bad.epsilon = 0.0;
  CHECK_THROWS_AS(solve_relaxed_fw(r, w, bad), InputError);
  bad = SolverOptions{};
  bad.backtrack = 1.0;
  CHECK_THROWS_AS(solve_relaxed_fw(r, w, bad), InputError);

  r.values(0, 0) = -1.0;
  CHECK_THROWS_AS(solve_relaxed_fw(r, w), InputError);
}

TEST_CASE("default start: one-pattern split, with a uniform fallback") {
  SUBCASE("an everything-on pattern seeds a single-pattern start") {
    Rng rng(44);
    RateTensor r = testutil::random_rates(rng, 4, 2, 3);
    r.activity.col(1).setOnes();
    for (Index b = 0; b < 2; ++b)
      for (Index k = 0; k < 4; ++k) r.at(k, b, 1) = rng.uniform(1e5, 1e6);
    const Allocation a = default_init(r);
    CHECK_NOTHROW(check_feasible(a));
    CHECK((a.pattern_share.array() > 0).count() == 1);
    Index seeded = -1;
    a.pattern_share.maxCoeff(&seeded);
    CHECK((r.activity.col(seeded).array() == 1.0).all());  // the seed is everything-on
    CHECK(utility(user_rates(r, a), testutil::unit_weights(4)) > -1e30);
  }
  SUBCASE("a user starved on the seeding pattern forces the uniform fallback") {
    RateTensor r;
    r.num_users = 2;
    r.num_cells = 2;
    r.num_patterns = 2;
    r.values = MatrixX<double>::Zero(4, 2);
    r.activity = MatrixX<double>::Zero(2, 2);
    r.activity.col(0).setOnes();  // pattern 0 is all-on but worthless to user 0
    r.activity(0, 1) = 1.0;
    r.at(1, 0, 0) = 5e5;
    r.at(1, 1, 0) = 4e5;
    r.at(0, 0, 1) = 6e5;
    r.at(1, 0, 1) = 1e5;

    const Allocation a = default_init(r);
    CHECK_NOTHROW(check_feasible(a));
    CHECK(a.pattern_share[0] == doctest::Approx(0.5));
    CHECK(a.pattern_share[1] == doctest::Approx(0.5));
    const VectorX<double> got = user_rates(r, a);
    CHECK(got.minCoeff() > 0);
  }
  SUBCASE("a user with no service anywhere is an input error") {
    RateTensor r;
    r.num_users = 2;
    r.num_cells = 1;
    r.num_patterns = 1;
    r.values = MatrixX<double>::Zero(2, 1);
    r.activity = MatrixX<double>::Ones(1, 1);
    r.at(1, 0, 0) = 1e6;
    CHECK_THROWS_AS(default_init(r), InputError);
  }
}

TEST_CASE("float instantiation smoke test") {
  Rng rng(45);
  const RateTensor rd = testutil::random_rates(rng, 4, 2, 3);
  const RateTensorT<float> rf = rd.cast<float>();
  const VectorX<float> wf = VectorX<float>::Ones(4);
  SolverOptions opts;
  opts.epsilon = 0.5;
  const SolverResultT<float> res = solve_relaxed_fw(rf, wf, opts);
  CHECK(res.certified);
  CHECK(std::isfinite(res.utility));
  CHECK(feasibility_violation(res.allocation) <= 1e-5f);
}
