// Copyright 2026 cevnorm developers
// SPDX-License-Identifier: Apache-2.0
#include "cevnorm/optimize.hpp"

#include <cmath>

#include "cevnorm/error.hpp"
#include "doctest.h"

using namespace cevnorm;

TEST_CASE("minimizes the Rosenbrock valley") {
  auto rosenbrock = [](std::span<const double> x) {
    return 100.0 * std::pow(x[1] - x[0] * x[0], 2) + std::pow(1.0 - x[0], 2);
  };
  const std::vector<double> steps{0.5, 0.5};
  NelderMeadOptions opts;
  opts.max_evaluations = 5000;
  const auto r = nelder_mead(rosenbrock, {-1.2, 1.0}, steps, opts);
  CHECK(r.converged);
  CHECK(r.x[0] == doctest::Approx(1.0).epsilon(1e-5));
  CHECK(r.x[1] == doctest::Approx(1.0).epsilon(1e-5));
  CHECK(r.value < 1e-10);
}

TEST_CASE("infinite values act as walls") {
  // Minimum of (x - 2)^2 restricted to x <= 1.
  auto walled = [](std::span<const double> x) { return x[0] > 1.0 ? HUGE_VAL : (x[0] - 2.0) * (x[0] - 2.0); };
  const std::vector<double> steps{0.3};
  const auto r = nelder_mead(walled, {0.0}, steps);
  CHECK(r.x[0] <= 1.0);
  CHECK(r.x[0] == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("NaN is treated as infeasible") {
  auto f = [](std::span<const double> x) { return x[0] < 0.0 ? NAN : (x[0] - 0.5) * (x[0] - 0.5); };
  const std::vector<double> steps{0.2};
  const auto r = nelder_mead(f, {0.1}, steps);
  CHECK(r.x[0] == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("budget exhaustion is reported") {
  auto sphere = [](std::span<const double> x) { return x[0] * x[0] + x[1] * x[1]; };
  NelderMeadOptions opts;
  opts.max_evaluations = 10;
  const std::vector<double> steps{1.0, 1.0};
  const auto r = nelder_mead(sphere, {5.0, 5.0}, steps, opts);
  CHECK_FALSE(r.converged);
  CHECK(r.evaluations >= 10);
}

TEST_CASE("argument validation") {
  auto f = [](std::span<const double>) { return 0.0; };
  const std::vector<double> steps{1.0};
  CHECK_THROWS_AS(nelder_mead(f, {}, steps), DomainError);
  CHECK_THROWS_AS(nelder_mead(f, {1.0, 2.0}, steps), DomainError);
}
