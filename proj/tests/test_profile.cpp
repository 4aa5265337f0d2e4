#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <stdexcept>

#include "defire/params.hpp"
#include "defire/profile.hpp"
#include "support/generators.hpp"

using namespace defire;

TEST_CASE("Params enforces the admissible range") {
  CHECK_NOTHROW(Params(0.5, 0.1));
  CHECK_NOTHROW(Params(9.9, 0.1));
  CHECK_THROWS_AS(Params(0.5, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(Params(0.5, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(Params(0.0, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(Params(10.0, 0.1), std::invalid_argument);  // 1/eta exactly
  CHECK(Params(3.0, 0.1).mu() == doctest::Approx(0.3));
}

TEST_CASE("validate_profile accepts a well-formed two-cluster instance") {
  const StepProfile p{{0.5, 0.5}, {0.5, 1.0}};
  const auto report = validate_profile(p, Params(0.5, 0.1));
  CHECK(report.ok());
}

TEST_CASE("validate_profile reports epsilon out of range") {
  const StepProfile p{{0.5, 0.5}, {0.5, 1.0}};
  const auto report = validate_profile(p, 12.0, 0.1);
  REQUIRE_FALSE(report.ok());
  CHECK(report.issues.front() == "epsilon out of range");
}

TEST_CASE("validate_profile reports a repressor level at or below threshold") {
  // M at cluster 0 is 0.1*0.01 + 0.9*(0.9*0.01 + 0.1*1) = 0.0991 <= 0.1.
  const StepProfile p{{0.9, 0.1}, {0.01, 1.0}};
  const auto report = validate_profile(p, Params(9.0, 0.1));
  REQUIRE_FALSE(report.ok());
  CHECK(report.issues.front() == "Mu(0+0) <= eta at cluster 0");
}

TEST_CASE("validate_profile reports shape violations") {
  const Params params(0.5, 0.1);
  CHECK_FALSE(validate_profile(StepProfile{{0.5, 0.4}, {0.5, 1.0}}, params).ok());
  CHECK_FALSE(validate_profile(StepProfile{{0.5, 0.5}, {0.9, 0.5}}, params).ok());
  CHECK_FALSE(validate_profile(StepProfile{{0.5, 0.5}, {0.5, 0.9}}, params).ok());
  CHECK_FALSE(validate_profile(StepProfile{{0.5, -0.5}, {0.5, 1.0}}, params).ok());
  CHECK_FALSE(validate_profile(StepProfile{{}, {}}, params).ok());
  // Single uniform cluster at level 1 is the admitted degenerate case.
  CHECK(validate_profile(StepProfile{{1.0}, {1.0}}, params).ok());
}

TEST_CASE("l1_distance on identical and shifted profiles") {
  const StepProfile p{{0.5, 0.5}, {0.5, 1.0}};
  const StepProfile q{{0.5, 0.5}, {0.6, 1.0}};
  CHECK(l1_distance(p, p) == 0.0);
  CHECK(l1_distance(p, q) == doctest::Approx(0.05).epsilon(1e-14));
}

TEST_CASE("l1_distance refines mismatched partitions") {
  const StepProfile p{{0.5, 0.5}, {0.5, 1.0}};
  const StepProfile q{{0.25, 0.75}, {0.5, 1.0}};
  // They differ only on (0.25, 0.5], where p holds 0.5 and q holds 1.
  CHECK(l1_distance(p, q) == doctest::Approx(0.125).epsilon(1e-14));
  CHECK(l1_distance(q, p) == doctest::Approx(0.125).epsilon(1e-14));
}

TEST_CASE("l1_distance rejects partitions of different total length") {
  const StepProfile p{{0.5, 0.5}, {0.5, 1.0}};
  const StepProfile q{{0.5, 0.4}, {0.5, 1.0}};
  CHECK_THROWS_AS(l1_distance(p, q), std::invalid_argument);
}

TEST_CASE("rotate_profile relabels cyclically") {
  const StepProfile p{{0.2, 0.8}, {1.0, 0.6}};
  const StepProfile r = rotate_profile(p, 1);
  CHECK(r.lengths == std::vector<double>{0.8, 0.2});
  CHECK(r.levels == std::vector<double>{0.6, 1.0});

  const StepProfile id = rotate_profile(p, 0);
  CHECK(id.lengths == p.lengths);
  CHECK(id.levels == p.levels);

  CHECK_THROWS_AS(rotate_profile(p, 2), std::invalid_argument);
}

TEST_CASE("canonicalize folds equal-level neighbours") {
  const StepProfile p{{0.2, 0.3, 0.5}, {0.4, 0.4, 1.0}};
  const StepProfile c = canonicalize(p);
  REQUIRE(c.size() == 2);
  CHECK(c.lengths[0] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(c.levels[0] == 0.4);
  CHECK(c.levels[1] == 1.0);
}

TEST_CASE("l1_distance is a metric on random profiles") {
  Lcg64 rng(2024);
  for (int trial = 0; trial < 200; ++trial) {
    const Params params = testing::random_params(rng, 0.1, 0.9);
    const std::size_t n = 2 + rng.next_index(6);
    const StepProfile a = testing::random_valid_profile(rng, n, params);
    const StepProfile b = testing::random_valid_profile(rng, n, params);
    const StepProfile c = testing::random_valid_profile(rng, n, params);
    const double ab = l1_distance(a, b);
    const double ba = l1_distance(b, a);
    CHECK(ab == doctest::Approx(ba).epsilon(1e-12));
    CHECK(ab >= 0.0);
    CHECK(l1_distance(a, c) <= ab + l1_distance(b, c) + 1e-12);
  }
}
