// Copyright 2026 cevnorm developers
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include "cevnorm/models.hpp"
#include "cevnorm/quadrature.hpp"

namespace cevnorm {

/// Probability levels at which marginal quantiles are placed.
struct GridSpec {
  std::vector<double> levels = default_levels();

  /// {0.05, 0.10, ..., 0.95}.
  static std::vector<double> default_levels();
  /// Throws DomainError unless non-empty, strictly increasing and inside (0, 1).
  void validate() const;
};

/// G(x1, x2) = G1(x1) * G2(x2), the random-norming limit.
double product_law_G(const CiModel& model, double x1, double x2);

/// Mixture limit of the deterministic-normed pair:
///
///   H(x1, x2) = int_1^inf G1((x1 - psi1(v)) / v^rho1) G2((x2 - psi2(v)) / v^rho2) v^-2 dv,
///
/// evaluated as an integral over u = 1/v in (0, 1]. Either argument may be +-inf.
/// Throws ConvergenceError (with the best estimate) if refinement hits max_depth.
double limit_H(const CiModel& model, double x1, double x2, const QuadOptions& opts = {});
QuadResult limit_H_detailed(const CiModel& model, double x1, double x2, const QuadOptions& opts = {});

/// Marginal H_i(x): limit_H with the other argument at +inf.
double marginal_H(const CiModel& model, Coordinate c, double x, const QuadOptions& opts = {});

/// x with marginal_H(c, x) = level, by bracketing and bisection.
double marginal_H_quantile(const CiModel& model, Coordinate c, double level, const QuadOptions& opts = {});

/// One evaluation point of an H surface.
struct SurfaceCell {
  double x1;
  double x2;
  double h;
  double h1h2;
  double diff;  // h - h1h2
};

struct GapResult {
  double gap = 0.0;
  std::size_t argmax = 0;  // index into cells
  std::vector<double> x1;  // marginal-H quantiles, coordinate 1
  std::vector<double> x2;
  std::vector<SurfaceCell> cells;  // row-major over (x1, x2)
};

/// H, H1*H2 and their difference on the Cartesian product xs1 x xs2 (row-major).
std::vector<SurfaceCell> evaluate_surface(const CiModel& model, const std::vector<double>& xs1,
                                          const std::vector<double>& xs2, const QuadOptions& opts = {},
                                          unsigned threads = 1);

/// max |H - H1 H2| over the product of marginal-H quantiles at grid.levels.
GapResult factorization_gap(const CiModel& model, const GridSpec& grid = {}, const QuadOptions& opts = {},
                            unsigned threads = 1);

/// True when the limit H factorizes exactly: (kappa_i / a_i, rho_i) = (0, 0) for some i.
bool factorizes_exactly(const CiModel& model);

/// Columns x1,x2,H,H1H2,diff.
void write_surface_csv(std::ostream& out, const std::vector<SurfaceCell>& cells);
void write_surface_csv(const std::filesystem::path& path, const std::vector<SurfaceCell>& cells);

}  // namespace cevnorm
