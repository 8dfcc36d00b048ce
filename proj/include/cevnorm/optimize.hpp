// Copyright 2026 cevnorm developers
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <span>
#include <vector>

namespace cevnorm {

struct NelderMeadOptions {
  int max_evaluations = 3000;
  /// Stop when f_max - f_min <= f_abs_tol + f_rel_tol * |f_min| over the simplex...
  double f_abs_tol = 1e-10;
  double f_rel_tol = 1e-10;
  /// ...and every vertex lies within x_tol (max-norm) of the best one.
  double x_tol = 1e-7;
};

struct NelderMeadResult {
  std::vector<double> x;
  double value = 0.0;
  int evaluations = 0;
  int iterations = 0;
  bool converged = false;
};

/// Derivative-free minimization with the standard reflection / expansion /
/// contraction / shrink coefficients (1, 2, 1/2, 1/2). The objective may
/// return +inf to reject infeasible points.
NelderMeadResult nelder_mead(const std::function<double(std::span<const double>)>& objective,
                             std::vector<double> start, std::span<const double> steps,
                             const NelderMeadOptions& options = {});

}  // namespace cevnorm
