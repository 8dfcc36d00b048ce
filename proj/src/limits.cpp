// Copyright 2026 cevnorm developers
// SPDX-License-Identifier: Apache-2.0
#include "cevnorm/limits.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <string>

#include "cevnorm/error.hpp"
#include "cevnorm/parallel.hpp"
#include "cevnorm/sample_io.hpp"

namespace cevnorm {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// One factor G_i((x - psi_i(1/u)) / (1/u)^rho_i) of the H integrand, written
/// as x u^rho - kappa_eff (1 - u^rho) / rho so that u -> 0 stays finite for rho > 0.
class MixtureFactor {
 public:
  MixtureFactor(const ErvParams& erv, const NoiseLaw& law, double x)
      : law_(law), x_(x), rho_(erv.rho), kappa_(erv.kappa_eff()) {}

  double operator()(double u) const {
    if (x_ == kInf) return 1.0;
    if (x_ == -kInf) return 0.0;
    const double log_u = std::log(u);
    if (std::abs(rho_) < kRhoLogCutoff) return noise_cdf(law_, x_ + kappa_ * log_u);
    const double w = rho_ * log_u;
    return noise_cdf(law_, x_ * std::exp(w) + kappa_ * std::expm1(w) / rho_);
  }

  /// Limit of operator()(u) as u -> 0.
  double at_zero() const {
    if (x_ == kInf) return 1.0;
    if (x_ == -kInf) return 0.0;
    double shift = 0.0;
    if (std::abs(rho_) < kRhoLogCutoff) {
      // x + kappa * log u
      shift = kappa_ > 0.0 ? -kInf : (kappa_ < 0.0 ? kInf : x_);
    } else if (rho_ > 0.0) {
      shift = -kappa_ / rho_;
    } else {
      // u^rho -> inf: u^rho (x + kappa / rho) - kappa / rho
      const double lead = x_ + kappa_ / rho_;
      shift = lead > 0.0 ? kInf : (lead < 0.0 ? -kInf : -kappa_ / rho_);
    }
    return noise_cdf(law_, shift);
  }

 private:
  NoiseLaw law_;
  double x_;
  double rho_;
  double kappa_;
};

double checked(const QuadResult& r, const char* what) {
  if (!r.converged) {
    throw ConvergenceError(std::string(what) + ": adaptive refinement reached max_depth (best estimate " +
                               std::to_string(r.value) + ", error estimate " + std::to_string(r.error_estimate) +
                               ")",
                           r.value, r.error_estimate);
  }
  return r.value;
}

}  // namespace

std::vector<double> GridSpec::default_levels() {
  std::vector<double> levels;
  for (int k = 1; k <= 19; ++k) levels.push_back(k / 20.0);
  return levels;
}

void GridSpec::validate() const {
  if (levels.empty()) throw DomainError("grid levels must not be empty");
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (!(levels[i] > 0.0 && levels[i] < 1.0)) throw DomainError("grid levels must lie in (0,1)");
    if (i > 0 && !(levels[i] > levels[i - 1])) throw DomainError("grid levels must be strictly increasing");
  }
}

double product_law_G(const CiModel& model, double x1, double x2) {
  return noise_cdf(model.noise[0], x1) * noise_cdf(model.noise[1], x2);
}

QuadResult limit_H_detailed(const CiModel& model, double x1, double x2, const QuadOptions& opts) {
  const MixtureFactor f1(model.erv[0], model.noise[0], x1);
  const MixtureFactor f2(model.erv[1], model.noise[1], x2);
  auto integrand = [&](double u) { return f1(u) * f2(u); };
  return integrate_unit_interval(integrand, f1.at_zero() * f2.at_zero(), opts);
}

double limit_H(const CiModel& model, double x1, double x2, const QuadOptions& opts) {
  return checked(limit_H_detailed(model, x1, x2, opts), "limit_H");
}

double marginal_H(const CiModel& model, Coordinate c, double x, const QuadOptions& opts) {
  const MixtureFactor f(model.erv_of(c), model.noise_of(c), x);
  auto integrand = [&](double u) { return f(u); };
  return checked(integrate_unit_interval(integrand, f.at_zero(), opts), "marginal_H");
}

double marginal_H_quantile(const CiModel& model, Coordinate c, double level, const QuadOptions& opts) {
  if (!(level > 0.0 && level < 1.0)) throw DomainError("marginal_H_quantile: level must lie in (0,1)");
  const double start = noise_quantile(model.noise_of(c), level);
  double step = model.noise_of(c).scale;
  double lo = start;
  double hi = start;
  int expansions = 0;
  while (marginal_H(model, c, lo, opts) > level) {
    lo -= step;
    step *= 2.0;
    if (++expansions > 200) throw ConvergenceError("marginal_H_quantile: cannot bracket level from below", lo, step);
  }
  step = model.noise_of(c).scale;
  while (marginal_H(model, c, hi, opts) < level) {
    hi += step;
    step *= 2.0;
    if (++expansions > 400) throw ConvergenceError("marginal_H_quantile: cannot bracket level from above", hi, step);
  }
  for (int it = 0; it < 200 && hi - lo > 1e-12 * (1.0 + std::abs(lo) + std::abs(hi)); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (marginal_H(model, c, mid, opts) < level) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

std::vector<SurfaceCell> evaluate_surface(const CiModel& model, const std::vector<double>& xs1,
                                          const std::vector<double>& xs2, const QuadOptions& opts,
                                          unsigned threads) {
  opts.validate();
  const auto h1 = parallel_map<double>(xs1.size(), threads, [&](std::size_t j) {
    return marginal_H(model, Coordinate::kFirst, xs1[j], opts);
  });
  const auto h2 = parallel_map<double>(xs2.size(), threads, [&](std::size_t k) {
    return marginal_H(model, Coordinate::kSecond, xs2[k], opts);
  });
  const std::size_t cols = xs2.size();
  return parallel_map<SurfaceCell>(xs1.size() * cols, threads, [&](std::size_t idx) {
    const std::size_t j = idx / cols;
    const std::size_t k = idx % cols;
    const double h = limit_H(model, xs1[j], xs2[k], opts);
    const double prod = h1[j] * h2[k];
    return SurfaceCell{xs1[j], xs2[k], h, prod, h - prod};
  });
}

GapResult factorization_gap(const CiModel& model, const GridSpec& grid, const QuadOptions& opts, unsigned threads) {
  model.validate();
  grid.validate();
  opts.validate();
  GapResult out;
  out.x1 = parallel_map<double>(grid.levels.size(), threads, [&](std::size_t j) {
    return marginal_H_quantile(model, Coordinate::kFirst, grid.levels[j], opts);
  });
  out.x2 = parallel_map<double>(grid.levels.size(), threads, [&](std::size_t k) {
    return marginal_H_quantile(model, Coordinate::kSecond, grid.levels[k], opts);
  });
  out.cells = evaluate_surface(model, out.x1, out.x2, opts, threads);
  for (std::size_t i = 0; i < out.cells.size(); ++i) {
    if (std::abs(out.cells[i].diff) > out.gap) {
      out.gap = std::abs(out.cells[i].diff);
      out.argmax = i;
    }
  }
  return out;
}

bool factorizes_exactly(const CiModel& model) {
  return model.erv[0].is_constant_limit() || model.erv[1].is_constant_limit();
}

void write_surface_csv(std::ostream& out, const std::vector<SurfaceCell>& cells) {
  out << "x1,x2,H,H1H2,diff\n";
  for (const auto& c : cells) {
    out << format_double(c.x1) << ',' << format_double(c.x2) << ',' << format_double(c.h) << ','
        << format_double(c.h1h2) << ',' << format_double(c.diff) << '\n';
  }
}

void write_surface_csv(const std::filesystem::path& path, const std::vector<SurfaceCell>& cells) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  write_surface_csv(out, cells);
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

}  // namespace cevnorm
