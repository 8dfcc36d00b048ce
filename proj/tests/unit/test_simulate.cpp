// Copyright 2026 cevnorm developers
// SPDX-License-Identifier: Apache-2.0
#include "cevnorm/simulate.hpp"

#include <cmath>
#include <cstring>

#include "cevnorm/error.hpp"
#include "cevnorm/noise.hpp"
#include "cevnorm/rng.hpp"
#include "cevnorm/stats.hpp"
#include "doctest.h"

using namespace cevnorm;

namespace {

CiModel canonical() { return make_model({1.0, 0.5, 1.0}, {1.0, 0.5, 1.0}); }

bool same_bits(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

}  // namespace

TEST_CASE("pinned row by substitution") {
  const auto row = draw_exceedance_row(canonical(), 10.0, 0.5, 0.5, 0.5);
  const double b20 = (std::sqrt(20.0) - 1.0) / 0.5;
  CHECK(row.x0 == 20.0);
  CHECK(row.x1 == doctest::Approx(b20).epsilon(1e-14));
  CHECK(row.x2 == doctest::Approx(b20).epsilon(1e-14));
}

TEST_CASE("draws are reproducible and independent of the thread count") {
  const auto a = draw_exceedances(canonical(), 50.0, 20000, 42);
  const auto b = draw_exceedances(canonical(), 50.0, 20000, 42);
  SimulationOptions eight;
  eight.threads = 8;
  const auto c = draw_exceedances(canonical(), 50.0, 20000, 42, eight);
  for (const auto* s : {&b, &c}) {
    CHECK(same_bits(a.x0, s->x0));
    CHECK(same_bits(a.x1, s->x1));
    CHECK(same_bits(a.x2, s->x2));
  }
  const auto d = draw_exceedances(canonical(), 50.0, 20000, 43);
  CHECK_FALSE(same_bits(a.x0, d.x0));
  // Row i does not depend on n.
  const auto prefix = draw_exceedances(canonical(), 50.0, 100, 42);
  CHECK(std::memcmp(prefix.x1.data(), a.x1.data(), 100 * sizeof(double)) == 0);
}

TEST_CASE("x0 / t follows the unit Pareto law") {
  const double t = 50.0;
  const auto s = draw_exceedances(canonical(), t, 100000, 7);
  std::vector<double> v(s.x0.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    REQUIRE(s.x0[i] > t);
    v[i] = s.x0[i] / t;
  }
  CHECK(ks_distance(Ecdf(v), [](double x) { return x <= 1.0 ? 0.0 : 1.0 - 1.0 / x; }) < 0.007);
}

TEST_CASE("random norming reproduces the latent noise") {
  const CiModel m = make_model({2.0, 0.5, 1.0}, {0.5, -0.3, -2.0}, {}, {NoiseFamily::kLogistic, 0.1, 1.5});
  const auto s = draw_exceedances(m, 30.0, 1000, 5);
  const auto w = apply_random_norming(s, m);
  for (std::size_t i = 0; i < s.size(); ++i) {
    CounterStream rng(5, StreamId::kSample, i);
    rng.next_uniform();
    const double z1 = noise_quantile(m.noise[0], rng.next_uniform());
    const double z2 = noise_quantile(m.noise[1], rng.next_uniform());
    REQUIRE(std::abs(w.w1[i] - z1) < 1e-12 * std::max(1.0, std::abs(z1)));
    REQUIRE(std::abs(w.w2[i] - z2) < 1e-12 * std::max(1.0, std::abs(z2)));
  }
}

TEST_CASE("deterministic norming cancels at the boundary x0 = t") {
  ExceedanceSample s;
  const CiModel m = canonical();
  const double t = 10.0;
  const auto row = draw_exceedance_row(m, 1.0, 1.0 / t, 0.5, 0.5);
  s.x0 = {row.x0};
  s.x1 = {row.x1};
  s.x2 = {row.x2};
  s.t = t;
  s.model_id = model_id(m);
  const auto w = apply_deterministic_norming(s, m);
  CHECK(w.w1[0] == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
  CHECK(w.w2[0] == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
  CHECK(w.mode == NormingMode::kDeterministic);
}

TEST_CASE("errors") {
  CHECK_THROWS_AS(draw_exceedances(canonical(), 0.5, 10, 1), DomainError);
  CHECK_THROWS_AS(draw_exceedances(canonical(), 2.0, 0, 1), DomainError);
  SimulationOptions tiny;
  tiny.memory_budget_bytes = 1000;
  CHECK_THROWS_AS(draw_exceedances(canonical(), 2.0, 1000, 1, tiny), CapacityError);
  const auto s = draw_exceedances(canonical(), 2.0, 10, 1);
  CHECK_THROWS_AS(apply_random_norming(s, make_model({}, {})), MismatchError);
}
