// Copyright 2026 cevnorm developers
// SPDX-License-Identifier: Apache-2.0
#include "cevnorm/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <numeric>
#include <string_view>

#include "cevnorm/error.hpp"
#include "cevnorm/optimize.hpp"
#include "cevnorm/parallel.hpp"
#include "cevnorm/sample_io.hpp"
#include "json.hpp"

namespace cevnorm {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return s;
}

std::vector<std::string_view> split(std::string_view line, char delimiter) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(delimiter, start);
    fields.push_back(trim(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return fields;
}

bool parse_finite(std::string_view field, double& out) {
  if (field.empty()) return false;
  if (field.front() == '+') field.remove_prefix(1);
  const auto res = std::from_chars(field.data(), field.data() + field.size(), out);
  return res.ec == std::errc() && res.ptr == field.data() + field.size() && std::isfinite(out);
}

constexpr double kRhoMin = -5.0;
constexpr double kRhoMax = 1.0;
constexpr double kLogAMin = -13.815510557964274;  // log 1e-6
constexpr double kLogAMax = 13.815510557964274;
constexpr std::size_t kStarts = 8;
constexpr std::size_t kScreenPoints = 5000;
// Parameter tolerances sit two or more orders below the sampling error of rho
// at the screen and full sizes; tighter ones only buy evaluations.
constexpr NelderMeadOptions kScreenTolerance{3000, 1e-8, 1e-8, 1e-4};
constexpr NelderMeadOptions kPolishTolerance{3000, 1e-10, 1e-10, 1e-6};
// Column of the Latin square used by start j for the kappa coordinate.
constexpr std::array<std::size_t, kStarts> kKappaColumn{5, 2, 7, 0, 3, 6, 1, 4};

double latin_level(std::size_t j) { return -1.0 + (2.0 * static_cast<double>(j) + 1.0) / kStarts; }

/// Mean negative log pseudo-likelihood with log x0 precomputed.
class PseudoLikelihood {
 public:
  PseudoLikelihood(std::span<const double> y, std::span<const double> x0, NoiseFamily family)
      : y_(y), family_(family), log_x_(x0.size()) {
    for (std::size_t i = 0; i < x0.size(); ++i) {
      if (!(x0[i] > 0.0)) throw DomainError("conditioning values must be positive");
      log_x_[i] = std::log(x0[i]);
    }
    mean_log_x_ = std::accumulate(log_x_.begin(), log_x_.end(), 0.0) / static_cast<double>(log_x_.size());
  }

  /// theta = (rho, kappa, loc, log a)
  double operator()(std::span<const double> theta) const {
    const double rho = theta[0];
    const double kappa = theta[1];
    const double loc = theta[2];
    const double log_a = theta[3];
    if (!(rho >= kRhoMin && rho <= kRhoMax) || !(log_a > kLogAMin && log_a < kLogAMax) || !std::isfinite(kappa) ||
        !std::isfinite(loc)) {
      return HUGE_VAL;
    }
    switch (family_) {
      case NoiseFamily::kGaussian:
        return evaluate(rho, kappa, loc, log_a, [](double z) { return -0.5 * z * z; }) +
               0.5 * std::log(2.0 * std::numbers::pi);
      default:
        return evaluate(rho, kappa, loc, log_a, [this](double z) { return standard_log_pdf(family_, z); });
    }
  }

  /// Gaussian noise only: the objective minimized over (loc, log a) in closed
  /// form, a = sd and loc = mean / a of the normed responses. theta = (rho, kappa).
  double gaussian_profile(std::span<const double> theta) const {
    const double rho = theta[0];
    const double kappa = theta[1];
    if (!(rho >= kRhoMin && rho <= kRhoMax) || !std::isfinite(kappa)) return HUGE_VAL;
    // Shifted sums keep the variance free of cancellation.
    const double shift = normed(0, rho, kappa);
    double s1 = 0.0, s2 = 0.0;
    for (std::size_t i = 0; i < y_.size(); ++i) {
      const double d = normed(i, rho, kappa) - shift;
      s1 += d;
      s2 += d * d;
    }
    const auto n = static_cast<double>(y_.size());
    const double log_a = 0.5 * std::log(s2 / n - (s1 / n) * (s1 / n));
    if (!(log_a > kLogAMin && log_a < kLogAMax)) return HUGE_VAL;
    return log_a + rho * mean_log_x_ + 0.5 + 0.5 * std::log(2.0 * std::numbers::pi);
  }

  /// Location and log-scale matching the first two moments of the normed responses at (rho, kappa).
  std::pair<double, double> moment_start(double rho, double kappa) const {
    double mean = 0.0;
    double m2 = 0.0;
    const auto n = static_cast<double>(y_.size());
    for (std::size_t i = 0; i < y_.size(); ++i) {
      const double r = normed(i, rho, kappa);
      mean += r;
      m2 += r * r;
    }
    mean /= n;
    const double sd = std::sqrt(std::max(m2 / n - mean * mean, 1e-300));
    const double a = std::clamp(sd / standard_sd(family_), 2e-6, 5e5);
    return {mean / a - standard_mean(family_), std::log(a)};
  }

  /// Gaussian-profile kappa at fixed rho: least-squares slope of y x^-rho on (1 - x^-rho) / rho.
  std::pair<double, double> profile_kappa(double rho) const {
    const auto n = static_cast<double>(y_.size());
    double sh = 0.0, sr = 0.0, shh = 0.0, shr = 0.0;
    for (std::size_t i = 0; i < y_.size(); ++i) {
      const double inv = std::exp(-rho * log_x_[i]);
      const double h = std::abs(rho) < kRhoLogCutoff ? log_x_[i] : -std::expm1(-rho * log_x_[i]) / rho;
      const double r = y_[i] * inv;
      sh += h;
      sr += r;
      shh += h * h;
      shr += h * r;
    }
    const double var_h = shh / n - (sh / n) * (sh / n);
    if (!(var_h > 0.0)) return {0.0, 1.0};
    const double slope = (shr / n - (sh / n) * (sr / n)) / var_h;
    return {slope, std::max(std::abs(slope), 1e-3)};
  }

 private:
  double normed(std::size_t i, double rho, double kappa) const {
    const double w = rho * log_x_[i];
    const double e = std::expm1(w);
    const double location = std::abs(rho) < kRhoLogCutoff ? kappa * log_x_[i] : kappa * e / rho;
    return (y_[i] - location) / (1.0 + e);
  }

  template <class LogPdf>
  double evaluate(double rho, double kappa, double loc, double log_a, LogPdf log_pdf) const {
    const double inv_a = std::exp(-log_a);
    double sum = 0.0;
    for (std::size_t i = 0; i < y_.size(); ++i) sum += log_pdf(normed(i, rho, kappa) * inv_a - loc);
    return log_a + rho * mean_log_x_ - sum / static_cast<double>(y_.size());
  }

  std::span<const double> y_;
  NoiseFamily family_;
  std::vector<double> log_x_;
  double mean_log_x_ = 0.0;
};

}  // namespace

Dataset load_csv(const std::filesystem::path& path, const std::string& conditioning_column,
                 const std::array<std::string, 2>& value_columns, char delimiter) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open data file '" + path.string() + "'");
  std::string line;
  if (!std::getline(in, line)) throw DataError("data file '" + path.string() + "' has no header row");

  const auto header = split(line, delimiter);
  const std::array<std::string, 3> wanted{conditioning_column, value_columns[0], value_columns[1]};
  std::array<std::size_t, 3> index{};
  for (std::size_t c = 0; c < 3; ++c) {
    const auto it = std::find(header.begin(), header.end(), std::string_view(wanted[c]));
    if (it == header.end()) {
      throw DataError("column '" + wanted[c] + "' not found in header of '" + path.string() + "'");
    }
    index[c] = static_cast<std::size_t>(it - header.begin());
  }
  const std::size_t needed = *std::max_element(index.begin(), index.end()) + 1;

  Dataset ds;
  ds.columns = wanted;
  ds.source = path;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    const auto fields = split(line, delimiter);
    std::array<double, 3> v{};
    bool ok = fields.size() >= needed;
    for (std::size_t c = 0; ok && c < 3; ++c) ok = parse_finite(fields[index[c]], v[c]);
    if (!ok) {
      ++ds.dropped_rows;
      continue;
    }
    ds.x0.push_back(v[0]);
    ds.x1.push_back(v[1]);
    ds.x2.push_back(v[2]);
  }
  if (in.bad()) throw IoError("read error on '" + path.string() + "'");
  return ds;
}

std::vector<double> pseudo_observations(std::span<const double> values) {
  const std::size_t n = values.size();
  if (n < 2) throw PreconditionError("rank transform needs at least 2 values");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  if (values[order.front()] == values[order.back()]) throw DataError("rank transform of a constant column");

  std::vector<double> u(n);
  const double denom = static_cast<double>(n + 1);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j < n && values[order[j]] == values[order[i]]) ++j;
    // Ranks i+1 .. j share their average.
    const double rank = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) u[order[k]] = rank / denom;
    i = j;
  }
  return u;
}

std::vector<double> to_pareto_margins(std::span<const double> values) {
  auto u = pseudo_observations(values);
  for (double& v : u) v = 1.0 / (1.0 - v);
  return u;
}

double norming_objective(std::span<const double> y, std::span<const double> x0, NoiseFamily family,
                         const ErvParams& erv, double location) {
  if (y.size() != x0.size() || y.empty()) throw DomainError("norming_objective: y and x0 must match and be non-empty");
  const PseudoLikelihood nll(y, x0, family);
  const std::array<double, 4> theta{erv.rho, erv.kappa, location, std::log(erv.a)};
  return nll(theta) * static_cast<double>(y.size());
}

FittedNorming fit_norming(std::span<const double> y, std::span<const double> x0, NoiseFamily family,
                          const FitOptions& options) {
  if (y.size() != x0.size()) throw DomainError("fit_norming: y and x0 differ in length");
  if (y.size() < kMinFitExceedances) {
    throw PreconditionError("fit_norming needs at least 30 exceedance pairs, got " + std::to_string(y.size()));
  }
  // Starts are screened on an evenly strided subsample; the best converged
  // screen result is then polished on the full data.
  const std::size_t stride = (y.size() + kScreenPoints - 1) / kScreenPoints;
  std::vector<double> ys, xs;
  for (std::size_t i = 0; i < y.size(); i += stride) {
    ys.push_back(y[i]);
    xs.push_back(x0[i]);
  }
  const PseudoLikelihood screen(ys, xs, family);
  const PseudoLikelihood nll(y, x0, family);

  // Gaussian location and scale are profiled out, leaving a search over (rho, kappa).
  const bool profiled = family == NoiseFamily::kGaussian;
  auto objective = [profiled](const PseudoLikelihood& f) {
    return [&f, profiled](std::span<const double> theta) { return profiled ? f.gaussian_profile(theta) : f(theta); };
  };

  const auto runs = parallel_map<NelderMeadResult>(kStarts, options.threads, [&](std::size_t j) {
    const double rho = latin_level(j);
    const auto [kappa_hat, spread] = screen.profile_kappa(rho);
    const double kappa = kappa_hat + spread * latin_level(kKappaColumn[j]);
    if (profiled) {
      const std::array<double, 2> steps{0.1, 0.25 * spread};
      return nelder_mead(objective(screen), {rho, kappa}, steps, kScreenTolerance);
    }
    const auto [loc, log_a] = screen.moment_start(rho, kappa);
    const std::array<double, 4> steps{0.1, 0.25 * spread, 0.25, 0.25};
    return nelder_mead(objective(screen), {rho, kappa, loc, log_a}, steps, kScreenTolerance);
  });

  std::size_t best = kStarts;
  for (std::size_t j = 0; j < kStarts; ++j) {
    if (runs[j].converged && (best == kStarts || runs[j].value < runs[best].value)) best = j;
  }
  if (best == kStarts) {
    const auto it = std::min_element(runs.begin(), runs.end(),
                                     [](const auto& a, const auto& b) { return a.value < b.value; });
    throw ConvergenceError("fit_norming: no start converged (best mean objective " + std::to_string(it->value) + ")",
                           it->value, HUGE_VAL);
  }

  const double spread = nll.profile_kappa(runs[best].x[0]).second;
  const std::array<double, 4> polish_steps{0.02, 0.05 * spread, 0.05, 0.05};
  auto r = nelder_mead(objective(nll), runs[best].x, std::span(polish_steps).first(runs[best].x.size()),
                       kPolishTolerance);
  if (!r.converged) {
    throw ConvergenceError("fit_norming: refinement on the full data did not converge", r.value, HUGE_VAL);
  }
  if (profiled) {
    const auto [loc, log_a] = nll.moment_start(r.x[0], r.x[1]);
    r.x.push_back(loc);
    r.x.push_back(log_a);
  }

  FittedNorming fit;
  fit.erv = ErvParams{std::exp(r.x[3]), r.x[0], r.x[1]};
  fit.noise = NoiseLaw{family, r.x[2], 1.0};
  fit.p_t = options.p_t;
  fit.exceedances = y.size();
  fit.iterations = r.iterations;
  fit.evaluations = r.evaluations;
  fit.converged = true;
  fit.objective = r.value * static_cast<double>(y.size());
  fit.best_start = best;
  return fit;
}

Exceedances select_exceedances(const Dataset& dataset, double p_t) {
  if (!(p_t > 0.0 && p_t < 1.0)) throw DomainError("threshold quantile p_t must lie in (0,1)");
  if (dataset.size() < kMinFitRows) {
    throw PreconditionError("data set has " + std::to_string(dataset.size()) +
                            " clean rows; fitting needs at least 100");
  }
  // Same values as to_pareto_margins, ranking only the upper tail. A row below
  // the order statistic at j0 has average rank <= j0 <= p_t (n + 1), so it
  // cannot exceed; tie groups at or above the cut are complete.
  const auto& x = dataset.x0;
  const std::size_t n = x.size();
  const double denom = static_cast<double>(n + 1);
  const auto j0 = std::min(n - 1, static_cast<std::size_t>(p_t * denom));
  std::vector<double> scratch(x);
  std::nth_element(scratch.begin(), scratch.begin() + static_cast<std::ptrdiff_t>(j0), scratch.end());
  const double cut = scratch[j0];

  std::vector<std::size_t> top;  // row indices, ascending
  for (std::size_t i = 0; i < n; ++i) {
    if (!(x[i] < cut)) top.push_back(i);
  }
  const std::size_t below = n - top.size();
  std::vector<std::size_t> order(top.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[top[a]] < x[top[b]]; });
  if (below == 0 && x[top[order.front()]] == x[top[order.back()]]) {
    throw DataError("rank transform of a constant column");
  }
  std::vector<double> pareto(top.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && x[top[order[j]]] == x[top[order[i]]]) ++j;
    const double rank = 0.5 * static_cast<double>(below + i + 1 + below + j);
    for (std::size_t k = i; k < j; ++k) pareto[order[k]] = 1.0 / (1.0 - rank / denom);
    i = j;
  }

  const double threshold = 1.0 / (1.0 - p_t);
  Exceedances ex;
  for (std::size_t k = 0; k < top.size(); ++k) {
    if (pareto[k] > threshold) {
      ex.x0.push_back(pareto[k]);
      ex.y1.push_back(dataset.x1[top[k]]);
      ex.y2.push_back(dataset.x2[top[k]]);
    }
  }
  return ex;
}

std::array<std::vector<double>, 2> fitted_residuals(const Exceedances& ex, const std::array<FittedNorming, 2>& fits) {
  std::array<std::vector<double>, 2> z;
  for (std::size_t c = 0; c < 2; ++c) {
    if (!fits[c].converged) throw PreconditionError("residuals requested from a fit that did not converge");
    const auto& y = c == 0 ? ex.y1 : ex.y2;
    z[c].resize(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
      z[c][i] = (y[i] - beta(fits[c].erv, ex.x0[i])) / alpha(fits[c].erv, ex.x0[i]) - fits[c].noise.location;
    }
  }
  return z;
}

std::array<FittedNorming, 2> fit_dataset(const Dataset& dataset, NoiseFamily family, double p_t, unsigned threads) {
  const auto ex = select_exceedances(dataset, p_t);
  const FitOptions options{threads, p_t};
  return {fit_norming(ex.y1, ex.x0, family, options), fit_norming(ex.y2, ex.x0, family, options)};
}

TestResult residual_diagnostic(const Dataset& dataset, const std::array<FittedNorming, 2>& fits, double p_t,
                               std::size_t b, std::uint64_t seed, std::span<const double> levels, unsigned threads) {
  const auto ex = select_exceedances(dataset, p_t);
  const auto z = fitted_residuals(ex, fits);
  return permutation_independence_test(z[0], z[1], levels, b, seed, threads);
}

std::string fits_to_json(const std::array<FittedNorming, 2>& fits, int indent) {
  nlohmann::json doc = nlohmann::json::object();
  for (std::size_t c = 0; c < 2; ++c) {
    const auto& f = fits[c];
    doc["coordinate" + std::to_string(c + 1)] = {
        {"erv", {{"a", f.erv.a}, {"rho", f.erv.rho}, {"kappa", f.erv.kappa}}},
        {"noise", {{"family", std::string(to_string(f.noise.family))}, {"location", f.noise.location},
                   {"scale", f.noise.scale}}},
        {"p_t", f.p_t},
        {"exceedances", f.exceedances},
        {"optimizer",
         {{"iterations", f.iterations}, {"evaluations", f.evaluations}, {"converged", f.converged},
          {"objective", f.objective}, {"best_start", f.best_start}}},
    };
  }
  return doc.dump(indent);
}

void write_fits_json(const std::filesystem::path& path, const std::array<FittedNorming, 2>& fits) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << fits_to_json(fits) << '\n';
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

void write_residuals_csv(const std::filesystem::path& path, const std::array<std::vector<double>, 2>& residuals) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << "z1,z2\n";
  for (std::size_t i = 0; i < residuals[0].size(); ++i) {
    out << format_double(residuals[0][i]) << ',' << format_double(residuals[1][i]) << '\n';
  }
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

}  // namespace cevnorm
