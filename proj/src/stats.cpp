// Copyright 2026 cevnorm developers
// SPDX-License-Identifier: Apache-2.0
#include "cevnorm/stats.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <ostream>
#include <string>

#include "cevnorm/error.hpp"
#include "cevnorm/parallel.hpp"
#include "cevnorm/rng.hpp"
#include "cevnorm/sample_io.hpp"

namespace cevnorm {
namespace {

constexpr std::size_t kFactorizationMinN = 10;
constexpr std::size_t kExhaustiveMaxN = 2000;

void require_pairs(std::span<const double> w1, std::span<const double> w2) {
  if (w1.size() != w2.size()) throw DomainError("paired samples must have equal length");
  if (w1.size() < kFactorizationMinN) {
    throw PreconditionError("factorization statistic needs n >= 10, got " + std::to_string(w1.size()));
  }
  for (std::span<const double> w : {w1, w2}) {
    if (std::any_of(w.begin(), w.end(), [](double v) { return std::isnan(v); })) {
      throw DataError("paired sample contains NaN");
    }
    const auto [lo, hi] = std::minmax_element(w.begin(), w.end());
    if (*lo == *hi) throw DataError("degenerate sample: every value in a coordinate is tied");
  }
}

void require_levels(std::span<const double> levels) {
  if (levels.empty()) throw DomainError("factorization levels must not be empty");
  for (double p : levels) {
    if (!(p > 0.0 && p < 1.0)) throw DomainError("factorization levels must lie in (0,1)");
  }
}

/// Bin index of each value: the number of thresholds strictly below it, so a
/// point with bin b is counted by every threshold index >= b.
std::vector<std::uint16_t> bin_by_thresholds(std::span<const double> w, const std::vector<double>& thresholds) {
  std::vector<std::uint16_t> bins(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    bins[i] = static_cast<std::uint16_t>(std::lower_bound(thresholds.begin(), thresholds.end(), w[i]) -
                                         thresholds.begin());
  }
  return bins;
}

std::vector<double> marginal_thresholds(std::span<const double> w, std::span<const double> levels) {
  std::vector<double> sorted(w.begin(), w.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> q;
  q.reserve(levels.size());
  for (double p : levels) q.push_back(empirical_quantile(sorted, p));
  std::sort(q.begin(), q.end());
  return q;
}

/// Binned sample ready for repeated evaluation of n^2 * Delta as an exact integer.
class BinnedPairs {
 public:
  BinnedPairs(std::span<const double> w1, std::span<const double> w2, std::span<const double> levels)
      : n_(static_cast<std::int64_t>(w1.size())), grid_(levels.size()) {
    const auto q1 = marginal_thresholds(w1, levels);
    const auto q2 = marginal_thresholds(w2, levels);
    bins1_ = bin_by_thresholds(w1, q1);
    bins2_ = bin_by_thresholds(w2, q2);
  }

  const std::vector<std::uint16_t>& bins2() const { return bins2_; }
  std::int64_t n() const { return n_; }

  /// max_{j,k} |n C(j,k) - C(j,*) C(*,k)| with C the cumulative counts.
  std::int64_t max_numerator(const std::vector<std::uint16_t>& bins2, std::vector<std::int64_t>& work) const {
    const std::size_t side = grid_ + 1;
    work.assign(side * side, 0);
    for (std::size_t i = 0; i < bins1_.size(); ++i) ++work[bins1_[i] * side + bins2[i]];
    for (std::size_t j = 0; j < side; ++j) {
      for (std::size_t k = 0; k < side; ++k) {
        std::int64_t v = work[j * side + k];
        if (j > 0) v += work[(j - 1) * side + k];
        if (k > 0) v += work[j * side + k - 1];
        if (j > 0 && k > 0) v -= work[(j - 1) * side + k - 1];
        work[j * side + k] = v;
      }
    }
    std::int64_t best = 0;
    for (std::size_t j = 0; j < grid_; ++j) {
      const std::int64_t row = work[j * side + grid_];
      for (std::size_t k = 0; k < grid_; ++k) {
        const std::int64_t col = work[grid_ * side + k];
        best = std::max(best, std::abs(n_ * work[j * side + k] - row * col));
      }
    }
    return best;
  }

  double to_statistic(std::int64_t numerator) const {
    const double n = static_cast<double>(n_);
    return static_cast<double>(numerator) / (n * n);
  }

 private:
  std::int64_t n_;
  std::size_t grid_;
  std::vector<std::uint16_t> bins1_;
  std::vector<std::uint16_t> bins2_;
};

}  // namespace

Ecdf::Ecdf(std::span<const double> values) : sorted_(values.begin(), values.end()) {
  if (sorted_.empty()) throw DomainError("Ecdf needs at least one value");
  if (std::any_of(sorted_.begin(), sorted_.end(), [](double v) { return std::isnan(v); })) {
    throw DomainError("Ecdf values must not be NaN");
  }
  std::sort(sorted_.begin(), sorted_.end());
}

double Ecdf::operator()(double x) const {
  const auto count = std::upper_bound(sorted_.begin(), sorted_.end(), x) - sorted_.begin();
  return static_cast<double>(count) / static_cast<double>(sorted_.size());
}

double ecdf_eval(const Ecdf& e, double x) { return e(x); }

double ks_distance(const Ecdf& e, const std::function<double(double)>& cdf) {
  const auto v = e.sorted_values();
  const double n = static_cast<double>(v.size());
  double d = 0.0;
  std::size_t i = 0;
  while (i < v.size()) {
    std::size_t j = i;
    while (j < v.size() && v[j] == v[i]) ++j;
    // Left limits of cdf are taken one ulp below the jump, which is exact for
    // step functions and indistinguishable for continuous ones.
    const double f = cdf(v[i]);
    const double f_left = cdf(std::nextafter(v[i], -HUGE_VAL));
    d = std::max({d, std::abs(static_cast<double>(j) / n - f), std::abs(static_cast<double>(i) / n - f_left)});
    i = j;
  }
  return d;
}

double empirical_quantile(std::span<const double> sorted, double level) {
  if (sorted.empty()) throw DomainError("empirical_quantile of an empty sample");
  if (!(level > 0.0 && level <= 1.0)) throw DomainError("empirical_quantile level must lie in (0,1]");
  const double n = static_cast<double>(sorted.size());
  // Guard against level * n landing a rounding error above an integer.
  auto k = static_cast<std::size_t>(std::ceil(level * n - 1e-9 * level * n));
  k = std::clamp<std::size_t>(k, 1, sorted.size());
  return sorted[k - 1];
}

double factorization_stat(std::span<const double> w1, std::span<const double> w2, std::span<const double> levels) {
  require_pairs(w1, w2);
  require_levels(levels);
  const BinnedPairs binned(w1, w2, levels);
  std::vector<std::int64_t> work;
  return binned.to_statistic(binned.max_numerator(binned.bins2(), work));
}

double factorization_stat(const NormedSample& pairs, std::span<const double> levels) {
  return factorization_stat(pairs.w1, pairs.w2, levels);
}

double factorization_stat_exhaustive(std::span<const double> w1, std::span<const double> w2) {
  require_pairs(w1, w2);
  const std::size_t n = w1.size();
  if (n > kExhaustiveMaxN) throw PreconditionError("exhaustive factorization statistic is limited to n <= 2000");

  std::vector<double> unique2(w2.begin(), w2.end());
  std::sort(unique2.begin(), unique2.end());
  unique2.erase(std::unique(unique2.begin(), unique2.end()), unique2.end());
  const std::size_t m2 = unique2.size();
  std::vector<std::size_t> rank2(n);
  std::vector<std::int64_t> marg2(m2, 0);
  for (std::size_t i = 0; i < n; ++i) {
    rank2[i] = std::lower_bound(unique2.begin(), unique2.end(), w2[i]) - unique2.begin();
    ++marg2[rank2[i]];
  }
  std::partial_sum(marg2.begin(), marg2.end(), marg2.begin());

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return w1[a] < w1[b]; });

  const auto nn = static_cast<std::int64_t>(n);
  std::vector<std::int64_t> column(m2, 0);
  std::int64_t best = 0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j < n && w1[order[j]] == w1[order[i]]) ++column[rank2[order[j++]]];
    const auto below1 = static_cast<std::int64_t>(j);
    std::int64_t joint = 0;
    for (std::size_t r = 0; r < m2; ++r) {
      joint += column[r];
      best = std::max(best, std::abs(nn * joint - below1 * marg2[r]));
    }
    i = j;
  }
  return static_cast<double>(best) / (static_cast<double>(n) * static_cast<double>(n));
}

TestResult permutation_independence_test(std::span<const double> w1, std::span<const double> w2,
                                         std::span<const double> levels, std::size_t b, std::uint64_t seed,
                                         unsigned threads) {
  if (b < 99) throw DomainError("permutation test needs b >= 99, got " + std::to_string(b));
  require_pairs(w1, w2);
  require_levels(levels);
  const BinnedPairs binned(w1, w2, levels);
  std::vector<std::int64_t> work;
  const std::int64_t observed = binned.max_numerator(binned.bins2(), work);

  std::vector<std::uint8_t> exceeds(b, 0);
  parallel_ranges(b, threads, [&](std::size_t begin, std::size_t end) {
    std::vector<std::uint16_t> shuffled;
    std::vector<std::int64_t> scratch;
    for (std::size_t r = begin; r < end; ++r) {
      shuffled = binned.bins2();
      CounterStream seeder(seed, StreamId::kPermutation, r);
      Xoshiro256 gen(seeder);
      for (std::size_t i = shuffled.size() - 1; i > 0; --i) {
        std::swap(shuffled[i], shuffled[gen.below(i + 1)]);
      }
      exceeds[r] = binned.max_numerator(shuffled, scratch) >= observed ? 1 : 0;
    }
  });
  const auto count = static_cast<std::size_t>(std::count(exceeds.begin(), exceeds.end(), std::uint8_t{1}));

  TestResult result;
  result.statistic = binned.to_statistic(observed);
  result.p_value = static_cast<double>(1 + count) / static_cast<double>(b + 1);
  result.n = w1.size();
  result.b = b;
  result.seed = seed;
  return result;
}

TestResult permutation_independence_test(const NormedSample& pairs, std::span<const double> levels, std::size_t b,
                                         std::uint64_t seed, unsigned threads) {
  return permutation_independence_test(pairs.w1, pairs.w2, levels, b, seed, threads);
}

double chi_hat(std::span<const double> u0, std::span<const double> u1, std::span<const double> u2, double p) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("chi_hat: p must lie in (0,1)");
  if (u0.size() != u1.size() || u0.size() != u2.size()) throw DomainError("chi_hat: columns differ in length");
  std::size_t conditioning = 0;
  std::size_t joint = 0;
  for (std::size_t i = 0; i < u0.size(); ++i) {
    if (u0[i] > p) {
      ++conditioning;
      if (u1[i] > p && u2[i] > p) ++joint;
    }
  }
  if (conditioning < kChiMinExceedances) {
    throw PreconditionError("chi_hat: only " + std::to_string(conditioning) + " rows exceed p = " +
                            std::to_string(p) + " in the conditioning margin (need 50)");
  }
  return static_cast<double>(joint) / static_cast<double>(conditioning);
}

std::vector<DiagnosticRow> convergence_diagnostic(const CiModel& model, std::span<const double> t_list,
                                                  std::size_t n, std::uint64_t seed,
                                                  const DiagnosticOptions& options) {
  if (t_list.empty()) throw DomainError("convergence_diagnostic: t_list must not be empty");
  for (std::size_t k = 1; k < t_list.size(); ++k) {
    if (!(t_list[k] > t_list[k - 1])) throw DomainError("convergence_diagnostic: t_list must be increasing");
  }
  std::vector<DiagnosticRow> rows;
  rows.reserve(t_list.size());
  for (const double t : t_list) {
    const auto sample = draw_exceedances(model, t, n, seed, {options.threads});
    const auto normed = apply_norming(sample, model, options.mode);
    DiagnosticRow row{t, n, 0.0, std::numeric_limits<double>::quiet_NaN()};
    if (options.statistic == DiagnosticStatistic::kFactorization) {
      if (options.permutations > 0) {
        const auto test =
            permutation_independence_test(normed, options.levels, options.permutations, seed, options.threads);
        row.statistic = test.statistic;
        row.p_value = test.p_value;
      } else {
        row.statistic = factorization_stat(normed, options.levels);
      }
    } else {
      const Ecdf e(normed.w1);
      if (options.mode == NormingMode::kRandom) {
        row.statistic = ks_distance(e, [&](double x) { return noise_cdf(model.noise[0], x); });
      } else {
        row.statistic =
            ks_distance(e, [&](double x) { return marginal_H(model, Coordinate::kFirst, x, options.quad); });
      }
    }
    rows.push_back(row);
  }
  return rows;
}

void write_diagnostic_csv(std::ostream& out, const std::vector<DiagnosticRow>& rows) {
  out << "t,n,statistic,p_value\n";
  for (const auto& r : rows) {
    out << format_double(r.t) << ',' << r.n << ',' << format_double(r.statistic) << ',';
    if (!std::isnan(r.p_value)) out << format_double(r.p_value);
    out << '\n';
  }
}

void write_diagnostic_csv(const std::filesystem::path& path, const std::vector<DiagnosticRow>& rows) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  write_diagnostic_csv(out, rows);
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

std::vector<double> bivariate_ecdf_grid(std::span<const double> w1, std::span<const double> w2,
                                        std::span<const double> xs1, std::span<const double> xs2) {
  if (w1.size() != w2.size() || w1.empty()) throw DomainError("bivariate_ecdf_grid: samples must match and be non-empty");
  if (!std::is_sorted(xs1.begin(), xs1.end()) || !std::is_sorted(xs2.begin(), xs2.end())) {
    throw DomainError("bivariate_ecdf_grid: grid must be increasing");
  }
  const std::size_t k1 = xs1.size();
  const std::size_t k2 = xs2.size();
  // Cell (a, b) holds points whose first grid index at or above them is (a, b).
  std::vector<std::uint64_t> counts((k1 + 1) * (k2 + 1), 0);
  for (std::size_t i = 0; i < w1.size(); ++i) {
    const auto a = static_cast<std::size_t>(std::lower_bound(xs1.begin(), xs1.end(), w1[i]) - xs1.begin());
    const auto b = static_cast<std::size_t>(std::lower_bound(xs2.begin(), xs2.end(), w2[i]) - xs2.begin());
    ++counts[a * (k2 + 1) + b];
  }
  std::vector<double> out(k1 * k2);
  std::vector<std::uint64_t> column(k2 + 1, 0);
  for (std::size_t a = 0; a < k1; ++a) {
    std::uint64_t row = 0;
    for (std::size_t b = 0; b < k2; ++b) {
      row += counts[a * (k2 + 1) + b];
      column[b] += row;
      out[a * k2 + b] = static_cast<double>(column[b]) / static_cast<double>(w1.size());
    }
  }
  return out;
}

}  // namespace cevnorm
