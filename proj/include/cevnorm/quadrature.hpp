// Copyright 2026 cevnorm developers
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <type_traits>

namespace cevnorm {

struct QuadOptions {
  double abs_tol = 1e-9;
  int max_depth = 40;
  /// Minimum number of panel-rule nodes in the initial mesh.
  int base_nodes = 64;

  void validate() const;
};

struct QuadResult {
  double value = 0.0;
  double error_estimate = 0.0;
  bool converged = true;
  std::size_t evaluations = 0;
};

namespace detail {

// 8-point Gauss-Legendre on [-1, 1].
inline constexpr std::array<double, 4> kGlNodes{0.1834346424956498, 0.5255324099163290, 0.7966664774136267,
                                                0.9602898564975363};
inline constexpr std::array<double, 4> kGlWeights{0.3626837833783620, 0.3137066458778873, 0.2223810344533745,
                                                  0.1012285362903763};

template <class F>
double gauss_legendre8(F& f, double a, double b, std::size_t& evaluations) {
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  double sum = 0.0;
  for (std::size_t k = 0; k < kGlNodes.size(); ++k) {
    const double dx = half * kGlNodes[k];
    sum += kGlWeights[k] * (f(mid - dx) + f(mid + dx));
  }
  evaluations += 2 * kGlNodes.size();
  return half * sum;
}

template <class F>
struct AdaptiveState {
  F& f;
  double tol_density;
  int max_depth;
  QuadResult result;

  void refine(double a, double b, double whole, int depth) {
    const double m = 0.5 * (a + b);
    const double left = gauss_legendre8(f, a, m, result.evaluations);
    const double right = gauss_legendre8(f, m, b, result.evaluations);
    const double diff = std::abs(left + right - whole);
    if (diff <= tol_density * (b - a) || m <= a || m >= b) {
      result.value += left + right;
      result.error_estimate += diff;
      return;
    }
    if (depth >= max_depth) {
      result.value += left + right;
      result.error_estimate += diff;
      result.converged = false;
      return;
    }
    refine(a, m, left, depth + 1);
    refine(m, b, right, depth + 1);
  }
};

}  // namespace detail

/// Integral of a bounded f over (0, 1].
///
/// The initial mesh is graded dyadically toward u = 0, [2^-(k+1), 2^-k] for
/// k < K with 2^-K <= abs_tol / 1000, so that endpoint behaviour like u^rho is
/// smooth on every panel. [0, 2^-K] contributes 2^-K * value_at_zero. Each
/// panel is bisected until its 8-point Gauss-Legendre value agrees with the
/// sum over its halves within abs_tol times the panel length.
template <class F>
QuadResult integrate_unit_interval(F&& f, double value_at_zero, const QuadOptions& opts) {
  opts.validate();
  const int levels = static_cast<int>(std::ceil(std::log2(1000.0 / opts.abs_tol)));
  const int nodes_per_panel = 8;
  const int pieces = std::max(1, (opts.base_nodes + nodes_per_panel * levels - 1) / (nodes_per_panel * levels));

  detail::AdaptiveState<std::remove_reference_t<F>> state{f, opts.abs_tol, opts.max_depth, {}};
  for (int k = 0; k < levels; ++k) {
    const double hi = std::ldexp(1.0, -k);
    const double lo = std::ldexp(1.0, -(k + 1));
    const double width = (hi - lo) / pieces;
    for (int p = 0; p < pieces; ++p) {
      const double a = lo + p * width;
      const double b = (p + 1 == pieces) ? hi : lo + (p + 1) * width;
      const double whole = detail::gauss_legendre8(f, a, b, state.result.evaluations);
      state.refine(a, b, whole, 1);
    }
  }
  state.result.value += std::ldexp(1.0, -levels) * value_at_zero;
  return state.result;
}

}  // namespace cevnorm
