#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "defire/firing.hpp"
#include "defire/weak_coupling.hpp"
#include "support/generators.hpp"

using namespace defire;

TEST_CASE("apply_L integrates against the lower trace") {
  const Trace half = compute_traces(StepProfile{{0.5, 0.5}, {0.5, 1.0}});
  const Params params(1.0, 0.05);

  const auto ones = apply_L(half, {1.0, 1.0}, params);
  CHECK(ones[0] == 0.0);
  CHECK(ones[1] == doctest::Approx(0.025).epsilon(1e-15));

  const auto zeros = apply_L(half, {0.0, 0.0}, params);
  CHECK(zeros == std::vector<double>{0.0, 0.0});

  const Trace single = compute_traces(StepProfile{{1.0}, {1.0}});
  CHECK(apply_L(single, {0.7}, params) == std::vector<double>{0.0});

  CHECK_THROWS_AS(apply_L(half, {1.0}, params), std::invalid_argument);
}

TEST_CASE("solve_T1_neumann reproduces the two-cluster firing times") {
  const auto result = solve_T1_neumann(StepProfile{{0.5, 0.5}, {0.5, 1.0}}, Params(0.5, 0.1), 1e-13);
  REQUIRE(result.firing.times.size() == 2);
  CHECK(result.firing.times[0] == doctest::Approx(0.4125).epsilon(1e-12));
  CHECK(result.firing.times[1] == doctest::Approx(0.9103125).epsilon(1e-12));
}

TEST_CASE("solve_T1_neumann on the uniform profile") {
  const auto result = solve_T1_neumann(StepProfile{{1.0}, {1.0}}, Params(0.5, 0.1), 1e-13);
  CHECK(result.firing.times[0] == doctest::Approx(0.9).epsilon(1e-13));
}

TEST_CASE("solve_T1_neumann rejects firings from level zero") {
  CHECK_THROWS_AS(solve_T1_neumann(StepProfile{{0.5, 0.5}, {0.1, 1.0}}, Params(3.0, 0.1), 1e-13),
                  std::domain_error);
}

TEST_CASE("Neumann times match the event engine on no-merge instances") {
  Lcg64 rng(73);
  for (int trial = 0; trial < 60; ++trial) {
    const double eta = testing::uniform(rng, 0.02, 0.4);
    const double eps = testing::uniform(rng, 0.05, 1.0);
    const Params params(eps, eta);
    const std::size_t n = 2 + rng.next_index(15);
    const StepProfile p = testing::random_valid_profile(rng, n, params);

    const auto neumann = solve_T1_neumann(p, params, 1e-13);
    const CycleResult cycle = full_cycle(p, params);
    REQUIRE(cycle.merges.empty());
    REQUIRE(cycle.firing_times.size() == n);
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(neumann.firing.times[i] == doctest::Approx(cycle.firing_times[i]).epsilon(1e-10));
    }
    // Geometric convergence: the iteration count stays within the
    // L-operator-norm budget.
    const double budget = std::log(1e-13) / std::log(params.mu()) + 2.0;
    CHECK(static_cast<double>(neumann.iterations) <= budget);
  }
}

TEST_CASE("contraction_constant worked values") {
  CHECK(contraction_constant(0.0) == 1.0);
  CHECK(contraction_constant(0.3) == doctest::Approx(0.8435290708442295).epsilon(1e-12));
  CHECK(contraction_constant(mu_critical()) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK_THROWS_AS(contraction_constant(-0.1), std::invalid_argument);
  CHECK_THROWS_AS(contraction_constant(1.0), std::invalid_argument);
}

TEST_CASE("contraction_constant crosses 1 from below exactly at mu_critical") {
  const double mc = mu_critical();
  CHECK(contraction_constant(mc - 1e-6) < 1.0);
  CHECK(contraction_constant(mc + 1e-6) > 1.0);
  // Strictly increasing through the crossing region.
  double prev = contraction_constant(0.40);
  for (double mu = 0.41; mu < 0.50; mu += 0.01) {
    const double value = contraction_constant(mu);
    CHECK(value > prev);
    prev = value;
  }
}

TEST_CASE("mu_critical lands in the stated interval") {
  const double mc = mu_critical();
  CHECK(mc > 0.46);
  CHECK(mc < 0.47);
  CHECK(mc == doctest::Approx(0.4659350788809371).epsilon(1e-11));
  const double residual = std::exp(mc) + mc * mc / (1.0 - mc) - 2.0;
  CHECK(std::abs(residual) <= 1e-11);
}

TEST_CASE("verify_cycle_contraction on the two-cluster pair") {
  const Params params(0.5, 0.1);
  const StepProfile u{{0.5, 0.5}, {0.5, 1.0}};
  const StepProfile v{{0.5, 0.5}, {0.55, 1.0}};
  const double ratio = verify_cycle_contraction(u, v, params);
  // Both trajectories contract along the one-dimensional firing map with
  // slope 0.975 per firing, hence 0.975^2 over the two-firing cycle.
  CHECK(ratio == doctest::Approx(0.950625).epsilon(1e-12));
  CHECK(ratio <= contraction_constant(params.mu()) + 1e-9);
  CHECK(contraction_constant(params.mu()) == doctest::Approx(0.9526951337661696).epsilon(1e-12));

  CHECK(verify_cycle_contraction(u, u, params) == 0.0);
}

TEST_CASE("verify_cycle_contraction rejects mismatched traces") {
  const Params params(0.5, 0.1);
  const StepProfile u{{0.5, 0.5}, {0.5, 1.0}};
  const StepProfile w{{0.25, 0.75}, {0.5, 1.0}};
  CHECK_THROWS_AS(verify_cycle_contraction(u, w, params), std::invalid_argument);
}

TEST_CASE("cycle contraction holds across random same-trace pairs") {
  Lcg64 rng(79);
  for (int trial = 0; trial < 60; ++trial) {
    const double eta = testing::uniform(rng, 0.02, 0.4);
    const double eps = testing::uniform(rng, 0.05, 1.0);
    const Params params(eps, eta);
    const std::size_t n = 2 + rng.next_index(8);
    StepProfile u = testing::random_valid_profile(rng, n, params);
    StepProfile v = u;
    v.levels = testing::random_levels(rng, n, params.eta + 0.02);
    const double ratio = verify_cycle_contraction(u, v, params);
    CHECK(ratio <= contraction_constant(params.mu()) + 1e-9);
  }
}

TEST_CASE("discontinuity_limit worked example") {
  const Params params(0.5, 0.1);
  const DiscontinuityDemo demo = discontinuity_limit(0.4, 0.5, params, 1000000);
  CHECK(demo.unperturbed_time == doctest::Approx(0.415).epsilon(1e-15));
  CHECK(demo.limit_lower_region == doctest::Approx(0.415).epsilon(1e-15));
  CHECK(demo.limit_jump_region == doctest::Approx(0.42415).epsilon(1e-14));

  REQUIRE(demo.perturbed_times.size() == 3);
  // The depressed half converges to the unperturbed time at rate 0.96/n.
  CHECK(demo.perturbed_times[0] ==
        doctest::Approx(0.415 - 0.96e-6).epsilon(1e-12));
  // The untouched half of the plateau jumps to the strictly larger limit.
  CHECK(std::abs(demo.perturbed_times[1] - 0.42415) <= 1e-5);
  CHECK(demo.perturbed_times[1] > demo.unperturbed_time);
}

TEST_CASE("discontinuity gap appears whenever the plateau fires above zero") {
  Lcg64 rng(83);
  for (int trial = 0; trial < 25; ++trial) {
    const double eta = testing::uniform(rng, 0.02, 0.3);
    const double eps = testing::uniform(rng, 0.1, 1.0);
    const Params params(eps, eta);
    const double x1 = testing::uniform(rng, 0.1, 0.8);
    const double base = testing::uniform(rng, std::max(0.2, eta + 0.05), 0.9);
    const DiscontinuityDemo demo = discontinuity_limit(x1, base, params, 100000);
    // 0 <= u(x1) - T1(x1) < 1 always holds here, so the limit must sit
    // strictly above the unperturbed value on the upper half.
    CHECK(demo.limit_jump_region > demo.unperturbed_time);
    CHECK(std::abs(demo.perturbed_times[1] - demo.limit_jump_region) <= 1e-3);
    CHECK(std::abs(demo.perturbed_times[0] - demo.unperturbed_time) <= 1e-3);
  }
}

TEST_CASE("discontinuity_limit sentinel returns the unperturbed values") {
  const DiscontinuityDemo demo = discontinuity_limit(0.4, 0.5, Params(0.5, 0.1), 0);
  CHECK(demo.perturbed_times[0] == demo.unperturbed_time);
  CHECK(demo.perturbed_times[1] == demo.unperturbed_time);
}

TEST_CASE("discontinuity_limit validates its inputs") {
  CHECK_THROWS_AS(discontinuity_limit(0.4, 0.5, Params(2.0, 0.1), 100),
                  std::invalid_argument);
  CHECK_THROWS_AS(discontinuity_limit(0.0, 0.5, Params(0.5, 0.1), 100),
                  std::invalid_argument);
  // Depression below zero level.
  CHECK_THROWS_AS(discontinuity_limit(0.4, 0.5, Params(0.5, 0.1), 1),
                  std::invalid_argument);
}

TEST_CASE("Neumann iteration tail obeys the geometric error bound") {
  const Params params(0.9, 0.3);  // mu = 0.27, slow enough to see the tail
  const StepProfile p{{0.25, 0.25, 0.5}, {0.4, 0.7, 1.0}};
  const auto tight = solve_T1_neumann(p, params, 1e-14);
  for (double tol : {1e-4, 1e-7, 1e-10}) {
    const auto loose = solve_T1_neumann(p, params, tol);
    double err = 0.0;
    for (std::size_t i = 0; i < 3; ++i) {
      err = std::max(err, std::abs(loose.firing.times[i] - tight.firing.times[i]));
    }
    // One fixed-point step past the stopping change keeps the residual
    // within mu/(1-mu) of the last observed change.
    CHECK(err <= tol * params.mu() / (1.0 - params.mu()) + 1e-15);
  }
}
