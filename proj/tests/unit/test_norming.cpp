// Copyright 2026 cevnorm developers
// SPDX-License-Identifier: Apache-2.0
#include "cevnorm/norming.hpp"

#include <cmath>
#include <numbers>

#include "cevnorm/error.hpp"
#include "cevnorm/rng.hpp"
#include "doctest.h"

using namespace cevnorm;

namespace {

// Log-uniform on [lo, hi].
double log_uniform(CounterStream& rng, double lo, double hi) {
  return std::exp(std::log(lo) + rng.next_uniform() * (std::log(hi) - std::log(lo)));
}

}  // namespace

TEST_CASE("psi examples") {
  for (const double rho : {-2.0, -1e-9, 0.0, 1e-9, 0.5, 1.0}) CHECK(psi(1.0, rho, 2.5) == 0.0);
  CHECK(psi(std::exp(2.0), 0.0, 3.0) == doctest::Approx(6.0).epsilon(1e-15));
  // 50-digit reference from tests/oracles/limit_oracle.py.
  CHECK(std::abs(psi(10.0, 1e-12, 1.0) - 2.3025850929966966331) < 1e-8);
  CHECK(std::abs(psi(10.0, 1e-12, 1.0) - std::log(10.0)) < 1e-8);
  CHECK(psi(10.0, 0.5, 1.0) == doctest::Approx(4.324555320336758664).epsilon(1e-15));
  CHECK(psi(10.0, -2.0, 3.0) == doctest::Approx(1.485).epsilon(1e-15));
}

TEST_CASE("psi rejects non-positive v") {
  CHECK_THROWS_AS(psi(0.0, 0.5, 1.0), DomainError);
  CHECK_THROWS_AS(psi(-1.0, 0.0, 1.0), DomainError);
  CHECK_THROWS_AS(alpha(ErvParams{1.0, 0.5, 1.0}, 0.0), DomainError);
  CHECK_THROWS_AS(beta(ErvParams{1.0, 0.5, 1.0}, -3.0), DomainError);
}

TEST_CASE("limit_shift examples") {
  CHECK(limit_shift(1.7, 1.0, ErvParams{2.0, 0.3, -4.0}) == 1.7);
  CHECK(limit_shift(0.0, 4.0, ErvParams{1.0, 0.5, 1.0}) == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(limit_shift(3.0, std::numbers::e, ErvParams{2.0, 0.0, 2.0}) == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("ErvParams validation") {
  CHECK_THROWS_AS(ErvParams({0.0, 0.5, 1.0}).validate(), DomainError);
  CHECK_THROWS_AS(ErvParams({1.0, NAN, 1.0}).validate(), DomainError);
  CHECK_THROWS_AS(ErvParams({1.0, 0.5, INFINITY}).validate(), DomainError);
  CHECK_NOTHROW(ErvParams({1.0, -3.0, -1.0}).validate());
  CHECK(ErvParams{1.0, 0.0, 0.0}.is_constant_limit());
  CHECK_FALSE(ErvParams{1.0, 0.0, 1.0}.is_constant_limit());
}

TEST_CASE("property: alpha is exactly regularly varying") {
  CounterStream rng(11, StreamId::kProperty, 0);
  for (int i = 0; i < 1000; ++i) {
    const ErvParams p{log_uniform(rng, 0.1, 10.0), -2.0 + 3.0 * rng.next_uniform(), 0.0};
    const double t = log_uniform(rng, 1e-3, 1e4);
    const double x = log_uniform(rng, 1e-2, 1e2);
    const double ratio = alpha(p, t * x) / alpha(p, t);
    REQUIRE(std::abs(ratio / std::pow(x, p.rho) - 1.0) < 1e-12);
  }
}

TEST_CASE("property: beta increments are psi at every finite t") {
  CounterStream rng(12, StreamId::kProperty, 1);
  for (int i = 0; i < 1000; ++i) {
    const double sign = rng.next_uniform() < 0.5 ? -1.0 : 1.0;
    const double rho = sign * std::pow(10.0, -9.0 + 9.0 * rng.next_uniform());
    const ErvParams p{log_uniform(rng, 0.1, 10.0), rho, -3.0 + 6.0 * rng.next_uniform()};
    const double t = log_uniform(rng, 1.0, 1e4);
    const double x = log_uniform(rng, 1e-2, 1e2);
    const double lhs = (beta(p, t * x) - beta(p, t)) / alpha(p, t);
    REQUIRE(std::abs(lhs - psi(x, p.rho, p.kappa_eff())) < 1e-10);
  }
}

TEST_CASE("property: psi is continuous across rho = 0") {
  for (const double rho : {1e-6, -1e-6, 1e-9, -1e-9}) {
    for (const double v : {0.01, 0.5, 2.0, 1e3}) {
      for (const double kappa : {-2.0, 0.7, 5.0}) {
        const double log_branch = kappa * std::log(v);
        CHECK(std::abs(psi(v, rho, kappa) - log_branch) <= 1e-6 * std::abs(log_branch) * std::abs(std::log(v)));
      }
    }
  }
}

TEST_CASE("box_cox matches its series near rho = 0") {
  const double l = std::log(7.0);
  for (const double rho : {1e-8, -1e-8, 1e-9}) {
    const double series = l * (1.0 + rho * l / 2.0 + rho * rho * l * l / 6.0);
    CHECK(box_cox(7.0, rho) == doctest::Approx(series).epsilon(1e-14));
  }
}
