// Copyright 2026 cevnorm developers
// SPDX-License-Identifier: Apache-2.0
#include "cevnorm/stats.hpp"

#include <algorithm>
#include <cmath>

#include "cevnorm/error.hpp"
#include "cevnorm/noise.hpp"
#include "cevnorm/rng.hpp"
#include "doctest.h"

using namespace cevnorm;

namespace {

std::vector<double> uniforms(std::uint64_t seed, std::size_t n, std::uint64_t offset = 0) {
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = CounterStream(seed, StreamId::kProperty, offset + i).next_uniform();
  return out;
}

std::vector<double> gaussians(std::uint64_t seed, std::size_t n) {
  auto u = uniforms(seed, n);
  for (double& v : u) v = noise_quantile({}, v);
  return u;
}

// Brute-force sup over every cell spanned by sample values.
double naive_factorization(const std::vector<double>& w1, const std::vector<double>& w2) {
  const double n = static_cast<double>(w1.size());
  double best = 0.0;
  for (const double a : w1) {
    for (const double b : w2) {
      double c = 0, c1 = 0, c2 = 0;
      for (std::size_t i = 0; i < w1.size(); ++i) {
        c += (w1[i] <= a && w2[i] <= b);
        c1 += w1[i] <= a;
        c2 += w2[i] <= b;
      }
      best = std::max(best, std::abs(c / n - (c1 / n) * (c2 / n)));
    }
  }
  return best;
}

}  // namespace

TEST_CASE("ecdf examples") {
  const std::vector<double> v{3.0, 1.0, 2.0};
  const Ecdf e(v);
  CHECK(e(2.0) == doctest::Approx(2.0 / 3.0));
  CHECK(e(0.5) == 0.0);
  CHECK(e(3.0) == 1.0);
  CHECK(ecdf_eval(e, 1.0) == doctest::Approx(1.0 / 3.0));
  CHECK_THROWS_AS(Ecdf(std::vector<double>{}), DomainError);
}

TEST_CASE("property: ecdf is a right-continuous count") {
  const auto v = uniforms(3, 500);
  const Ecdf e(v);
  for (const double x : uniforms(4, 200)) {
    const double naive = static_cast<double>(std::count_if(v.begin(), v.end(), [&](double y) { return y <= x; }));
    REQUIRE(e(x) == naive / 500.0);
  }
  for (const double x : v) REQUIRE(e(x) > e(std::nextafter(x, -1.0)));
}

TEST_CASE("ks distance examples") {
  const std::size_t n = 400;
  std::vector<double> q(n);
  for (std::size_t i = 0; i < n; ++i) q[i] = noise_quantile({}, (i + 0.5) / n);
  CHECK(ks_distance(Ecdf(q), [](double x) { return noise_cdf({}, x); }) <= 0.5 / n + 1e-12);

  const std::vector<double> v{1.0, 2.0, 2.0, 5.0};
  const Ecdf e(v);
  CHECK(ks_distance(e, [&](double x) { return e(x); }) == 0.0);

  int within = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    within += ks_distance(Ecdf(gaussians(seed, 100000)), [](double x) { return noise_cdf({}, x); }) < 0.007;
  }
  CHECK(within >= 99);
}

TEST_CASE("factorization statistic examples") {
  const auto w = uniforms(1, 1000);
  const std::vector<double> half{0.5};
  CHECK(std::abs(factorization_stat(w, w, half) - 0.25) <= 1.0 / 1000);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    CHECK(factorization_stat(uniforms(seed, 100000), uniforms(seed, 100000, 1 << 20), GridSpec::default_levels()) <
          0.01);
  }
  const std::vector<double> a{0.3, -1.2, 2.2, 0.8, 1.1, -0.4, 0.0, 1.9, -2.5, 0.6};
  const std::vector<double> b{1.0, 0.2, -0.3, 2.4, -1.1, 0.9, 1.7, -0.6, 0.1, 0.4};
  const double brute = naive_factorization(a, b);
  CHECK(factorization_stat_exhaustive(a, b) == doctest::Approx(brute).epsilon(1e-15));
  std::vector<double> all_levels;
  for (int i = 1; i < 10; ++i) all_levels.push_back(i / 10.0);
  CHECK(factorization_stat(a, b, all_levels) == doctest::Approx(brute).epsilon(1e-15));
}

TEST_CASE("property: factorization statistic is rank invariant") {
  const auto w1 = gaussians(21, 5000);
  const auto w2 = gaussians(22, 5000);
  std::vector<double> t1(w1.size()), t2(w2.size());
  std::transform(w1.begin(), w1.end(), t1.begin(), [](double x) { return std::exp(x); });
  std::transform(w2.begin(), w2.end(), t2.begin(), [](double x) { return x * x * x; });
  const auto levels = GridSpec::default_levels();
  CHECK(factorization_stat(w1, w2, levels) == factorization_stat(t1, t2, levels));
}

TEST_CASE("factorization statistic errors") {
  const std::vector<double> short_sample(9, 1.0);
  const std::vector<double> ties(20, 1.0);
  const auto ok = uniforms(1, 20);
  const auto levels = GridSpec::default_levels();
  CHECK_THROWS_AS(factorization_stat(short_sample, short_sample, levels), PreconditionError);
  CHECK_THROWS_AS(factorization_stat(ties, ok, levels), DataError);
  CHECK_THROWS_AS(factorization_stat(ok, uniforms(2, 21), levels), DomainError);
}

TEST_CASE("permutation test: comonotone pairs get the smallest p-value") {
  const auto w = gaussians(5, 10000);
  const auto r = permutation_independence_test(w, w, GridSpec::default_levels(), 999, 1);
  CHECK(r.p_value == doctest::Approx(1.0 / 1000));
  CHECK(r.b == 999);
}

TEST_CASE("permutation test: reproducible and thread-count invariant") {
  const auto w1 = uniforms(8, 20);
  const auto w2 = uniforms(9, 20);
  const auto levels = GridSpec::default_levels();
  const auto a = permutation_independence_test(w1, w2, levels, 999, 77);
  const auto b = permutation_independence_test(w1, w2, levels, 999, 77);
  const auto c = permutation_independence_test(w1, w2, levels, 999, 77, 4);
  CHECK(a.p_value == b.p_value);
  CHECK(a.p_value == c.p_value);
  CHECK_THROWS_AS(permutation_independence_test(w1, w2, levels, 98, 77), DomainError);
}

TEST_CASE("permutation test: size under independence") {
  // 3 of 100 is the 98% point of Binomial(100, 0.01).
  int rejections = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto r = permutation_independence_test(uniforms(seed, 1000), uniforms(seed, 1000, 1 << 20),
                                                 GridSpec::default_levels(), 199, seed);
    rejections += r.p_value < 0.01;
  }
  CHECK(rejections <= 3);
}

TEST_CASE("chi examples") {
  const auto u = uniforms(4, 100000);
  for (const double p : {0.5, 0.9, 0.99}) CHECK(chi_hat(u, u, u, p) == 1.0);
  const std::size_t n = 1000000;
  const auto u0 = uniforms(1, n);
  const auto u1 = uniforms(1, n, n);
  const auto u2 = uniforms(1, n, 2 * n);
  CHECK(std::abs(chi_hat(u0, u1, u2, 0.9) - 0.01) < 0.003);
  CHECK_THROWS_AS(chi_hat(u0, u1, u2, 1.0 - 1e-9), PreconditionError);
  CHECK_THROWS_AS(chi_hat(u0, u1, u2, 1.0), DomainError);
}

TEST_CASE("bivariate ecdf grid equals a naive count") {
  const auto w1 = gaussians(31, 3000);
  const auto w2 = gaussians(32, 3000);
  const std::vector<double> xs1{-1.0, 0.0, 0.3, 2.0};
  const std::vector<double> xs2{-0.5, 0.5, 1.5};
  const auto grid = bivariate_ecdf_grid(w1, w2, xs1, xs2);
  for (std::size_t a = 0; a < xs1.size(); ++a) {
    for (std::size_t b = 0; b < xs2.size(); ++b) {
      double c = 0;
      for (std::size_t i = 0; i < w1.size(); ++i) c += (w1[i] <= xs1[a] && w2[i] <= xs2[b]);
      CHECK(grid[a * xs2.size() + b] == c / 3000.0);
    }
  }
}

TEST_CASE("convergence diagnostic") {
  const CiModel exact = make_model({1.0, 0.5, 1.0}, {1.0, 0.5, 1.0});
  const std::vector<double> ts{10.0, 100.0, 1000.0, 10000.0};
  for (const auto& row : convergence_diagnostic(exact, ts, 20000, 3)) CHECK(row.statistic < 0.012);

  DiagnosticOptions ks;
  ks.statistic = DiagnosticStatistic::kKsFirstMargin;
  const CiModel perturbed = make_model({1.0, 0.5, 1.0}, {1.0, 0.5, 1.0}, {}, {}, 5.0);
  const auto rows = convergence_diagnostic(perturbed, ts, 1000000, 3, ks);
  for (std::size_t k = 1; k < rows.size(); ++k) CHECK(rows[k].statistic < rows[k - 1].statistic);

  const std::vector<double> one{50.0};
  const auto single = convergence_diagnostic(exact, one, 1000, 3);
  CHECK(single.size() == 1);
  CHECK(std::isnan(single[0].p_value));
}
