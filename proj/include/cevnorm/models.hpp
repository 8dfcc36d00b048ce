// Copyright 2026 cevnorm developers
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <string>

#include "cevnorm/noise.hpp"
#include "cevnorm/norming.hpp"
#include "cevnorm/rng.hpp"

namespace cevnorm {

/// Which of the two conditioned coordinates (X1 or X2).
enum class Coordinate : int { kFirst = 0, kSecond = 1 };

constexpr std::size_t index_of(Coordinate c) { return static_cast<std::size_t>(c); }

/// Generative model with unit-Pareto X0 and, given X0 = x,
///
///   X_i = beta_i(x) + alpha_i(x) * (Z_i + perturbation / x),   Z_i ~ noise_i,
///
/// with Z1 and Z2 independent, so X1 and X2 are conditionally independent
/// given X0. `coupled_noise` is a negative control that sets
/// Z2 = Q2(F1(Z1)), i.e. conditional comonotonicity.
struct CiModel {
  std::array<ErvParams, 2> erv{};
  std::array<NoiseLaw, 2> noise{};
  double perturbation = 0.0;
  bool coupled_noise = false;

  void validate() const;

  const ErvParams& erv_of(Coordinate c) const { return erv[index_of(c)]; }
  const NoiseLaw& noise_of(Coordinate c) const { return noise[index_of(c)]; }

  friend bool operator==(const CiModel&, const CiModel&) = default;
};

/// Model whose every parameter is spelled out; convenient for tests and examples.
CiModel make_model(ErvParams erv1, ErvParams erv2, NoiseLaw noise1 = {}, NoiseLaw noise2 = {},
                   double perturbation = 0.0);

/// Stable 16-hex-digit content hash of every model field.
std::string model_id(const CiModel& model);

/// Inverse transform for X0 | X0 > t with X0 unit Pareto: returns t / u.
double sample_pareto_exceedance(double t, double u);
double sample_pareto_exceedance(double t, CounterStream& rng);

struct ConditionalDraw {
  double x1;
  double x2;
};

/// Draw (X1, X2) | X0 = x0 from the two kernels using explicit uniforms for Z1, Z2.
ConditionalDraw sample_conditional(const CiModel& model, double x0, double u1, double u2);
ConditionalDraw sample_conditional(const CiModel& model, double x0, CounterStream& rng);

/// pi_i(x0, (-inf, y]).
double kernel_cdf(const CiModel& model, Coordinate c, double x0, double y);

/// G_{v;i}(x) = G_i((x - psi_i(v)) / v^rho_i) for v >= 1.
double theoretical_Gv(const CiModel& model, Coordinate c, double v, double x);

}  // namespace cevnorm
