// Copyright 2026 cevnorm developers
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "cevnorm/noise.hpp"
#include "cevnorm/norming.hpp"
#include "cevnorm/stats.hpp"

namespace cevnorm {

/// Trivariate data: a conditioning column and two response columns.
struct Dataset {
  std::array<std::string, 3> columns;  // conditioning, response 1, response 2
  std::vector<double> x0;
  std::vector<double> x1;
  std::vector<double> x2;
  std::filesystem::path source;
  std::size_t dropped_rows = 0;

  std::size_t size() const { return x0.size(); }
};

/// Minimum clean rows before fitting is attempted.
inline constexpr std::size_t kMinFitRows = 100;
/// Minimum exceedance pairs for fit_norming.
inline constexpr std::size_t kMinFitExceedances = 30;

/// Reads a delimited file with a header row. Rows holding a missing or
/// non-numeric entry in a selected column are dropped and counted.
/// Throws IoError for unreadable files and DataError for absent columns.
Dataset load_csv(const std::filesystem::path& path, const std::string& conditioning_column,
                 const std::array<std::string, 2>& value_columns, char delimiter = ',');

/// Average ranks divided by n + 1. Requires n >= 2 and at least two distinct values.
std::vector<double> pseudo_observations(std::span<const double> values);

/// 1 / (1 - u) applied to the pseudo-observations: unit-Pareto margins.
std::vector<double> to_pareto_margins(std::span<const double> values);

/// Per-coordinate norming estimate. The noise scale is fixed to 1 because only
/// the product a * scale is identified; `erv.a` carries the spread of alpha.
struct FittedNorming {
  ErvParams erv;
  NoiseLaw noise;
  double p_t = 0.95;
  std::size_t exceedances = 0;
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
  double objective = 0.0;  // negative log pseudo-likelihood at the optimum
  std::size_t best_start = 0;
};

struct FitOptions {
  unsigned threads = 1;
  /// Recorded on the result; the caller selects the exceedances.
  double p_t = 0.95;
};

/// Negative log pseudo-likelihood of y = beta(x0) + alpha(x0) z, z ~ family(loc, 1).
double norming_objective(std::span<const double> y, std::span<const double> x0, NoiseFamily family,
                         const ErvParams& erv, double location);

/// Multi-start simplex maximization of the pseudo-likelihood over
/// (rho, kappa, loc, log a) with rho in [-5, 1] and a in (1e-6, 1e6).
/// Starts are 8 points of a fixed Latin square over (rho, kappa); a and loc
/// are moment-initialized at each start. For gaussian noise they are profiled
/// out in closed form and the simplex searches (rho, kappa) only. Starts run on an evenly strided
/// subsample of at most 5000 pairs; the best converged one is refined on all
/// pairs. Throws PreconditionError below 30 pairs and ConvergenceError when no
/// start, or the refinement, fails to converge.
FittedNorming fit_norming(std::span<const double> y, std::span<const double> x0, NoiseFamily family,
                          const FitOptions& options = {});

/// Rows of a dataset whose conditioning pseudo-observation exceeds p_t, with x0 on the Pareto scale.
struct Exceedances {
  std::vector<double> x0;
  std::vector<double> y1;
  std::vector<double> y2;
};

Exceedances select_exceedances(const Dataset& dataset, double p_t);

/// z_i = (y_i - beta_i(x0)) / alpha_i(x0) - loc_i for both fitted coordinates.
std::array<std::vector<double>, 2> fitted_residuals(const Exceedances& ex, const std::array<FittedNorming, 2>& fits);

/// Fits both coordinates of the exceedances above p_t.
std::array<FittedNorming, 2> fit_dataset(const Dataset& dataset, NoiseFamily family, double p_t,
                                         unsigned threads = 1);

/// Permutation factorization test on fitted residuals of the exceedance rows.
TestResult residual_diagnostic(const Dataset& dataset, const std::array<FittedNorming, 2>& fits, double p_t,
                               std::size_t b, std::uint64_t seed,
                               std::span<const double> levels = GridSpec::default_levels(), unsigned threads = 1);

/// Both fits as a JSON document (keys sorted).
std::string fits_to_json(const std::array<FittedNorming, 2>& fits, int indent = 2);
void write_fits_json(const std::filesystem::path& path, const std::array<FittedNorming, 2>& fits);

/// Columns z1,z2.
void write_residuals_csv(const std::filesystem::path& path, const std::array<std::vector<double>, 2>& residuals);

}  // namespace cevnorm
