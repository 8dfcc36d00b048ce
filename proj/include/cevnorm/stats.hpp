// Copyright 2026 cevnorm developers
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "cevnorm/limits.hpp"
#include "cevnorm/simulate.hpp"

namespace cevnorm {

/// Right-continuous empirical distribution function.
class Ecdf {
 public:
  explicit Ecdf(std::span<const double> values);

  /// #{v <= x} / n.
  double operator()(double x) const;
  std::size_t size() const { return sorted_.size(); }
  std::span<const double> sorted_values() const { return sorted_; }

 private:
  std::vector<double> sorted_;
};

double ecdf_eval(const Ecdf& e, double x);

/// sup_x |e(x) - F(x)|, attained at the jump points of e.
double ks_distance(const Ecdf& e, const std::function<double(double)>& cdf);

/// Empirical quantile: smallest sample value v with e(v) >= level.
double empirical_quantile(std::span<const double> sorted, double level);

/// max over the levels x levels grid of |F12(q1, q2) - F1(q1) F2(q2)|, where
/// q_i are the empirical marginal quantiles of w_i at `levels`. Requires
/// n >= 10 and a non-constant sample in each coordinate.
double factorization_stat(std::span<const double> w1, std::span<const double> w2, std::span<const double> levels);
double factorization_stat(const NormedSample& pairs, std::span<const double> levels);

/// Same statistic over every cell (w1_(i), w2_(j)) of the sample; O(n^2), n <= 2000.
double factorization_stat_exhaustive(std::span<const double> w1, std::span<const double> w2);

/// Bivariate empirical CDF #{w1 <= xs1[j], w2 <= xs2[k]} / n at every grid
/// point, row-major over (xs1, xs2). Grid coordinates must be increasing.
std::vector<double> bivariate_ecdf_grid(std::span<const double> w1, std::span<const double> w2,
                                        std::span<const double> xs1, std::span<const double> xs2);

struct TestResult {
  double statistic = 0.0;
  double p_value = 1.0;
  std::size_t n = 0;
  std::size_t b = 0;
  std::uint64_t seed = 0;
};

/// Permutation test of independence based on factorization_stat. The second
/// coordinate is permuted; replicate r draws from (seed, r) only, so the
/// p-value (1 + #{stat_r >= stat}) / (b + 1) is independent of `threads`.
TestResult permutation_independence_test(std::span<const double> w1, std::span<const double> w2,
                                         std::span<const double> levels, std::size_t b, std::uint64_t seed,
                                         unsigned threads = 1);
TestResult permutation_independence_test(const NormedSample& pairs, std::span<const double> levels,
                                         std::size_t b, std::uint64_t seed, unsigned threads = 1);

/// Fraction of rows with u0 > p that also have u1 > p and u2 > p. Inputs are
/// already on the probability scale (known margins or pseudo-observations).
/// Throws PreconditionError when fewer than 50 rows have u0 > p.
double chi_hat(std::span<const double> u0, std::span<const double> u1, std::span<const double> u2, double p);

inline constexpr std::size_t kChiMinExceedances = 50;

enum class DiagnosticStatistic { kFactorization, kKsFirstMargin };

struct DiagnosticOptions {
  NormingMode mode = NormingMode::kRandom;
  DiagnosticStatistic statistic = DiagnosticStatistic::kFactorization;
  std::vector<double> levels = GridSpec::default_levels();
  /// Permutations for a p-value alongside the factorization statistic; 0 skips the test.
  std::size_t permutations = 0;
  unsigned threads = 1;
  QuadOptions quad{};
};

struct DiagnosticRow {
  double t;
  std::size_t n;
  double statistic;
  double p_value;  // NaN when no test was run
};

/// One statistic per threshold. KS is measured against G_1 for random norming
/// and against the marginal H_1 for deterministic norming. All thresholds share
/// `seed`, so the rows use common random numbers.
std::vector<DiagnosticRow> convergence_diagnostic(const CiModel& model, std::span<const double> t_list,
                                                  std::size_t n, std::uint64_t seed,
                                                  const DiagnosticOptions& options = {});

/// Columns t,n,statistic,p_value (p_value empty when not computed).
void write_diagnostic_csv(std::ostream& out, const std::vector<DiagnosticRow>& rows);
void write_diagnostic_csv(const std::filesystem::path& path, const std::vector<DiagnosticRow>& rows);

}  // namespace cevnorm
