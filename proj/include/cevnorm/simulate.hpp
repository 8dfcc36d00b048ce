// Copyright 2026 cevnorm developers
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "cevnorm/models.hpp"

namespace cevnorm {

enum class NormingMode { kRandom, kDeterministic };

std::string_view to_string(NormingMode mode);

/// Draws from the law of (X0, X1, X2) given X0 > t, stored column-wise.
struct ExceedanceSample {
  std::vector<double> x0;
  std::vector<double> x1;
  std::vector<double> x2;
  double t = 1.0;
  std::uint64_t seed = 0;
  std::string model_id;

  std::size_t size() const { return x0.size(); }
};

/// Normed pairs (w1, w2) derived from an ExceedanceSample.
struct NormedSample {
  std::vector<double> w1;
  std::vector<double> w2;
  NormingMode mode = NormingMode::kRandom;
  double t = 1.0;
  std::uint64_t seed = 0;
  std::string model_id;

  std::size_t size() const { return w1.size(); }
};

struct SimulationOptions {
  unsigned threads = 1;
  /// Upper bound on the bytes held by the three sample columns.
  std::size_t memory_budget_bytes = std::size_t{8} << 30;
};

struct ExceedanceRow {
  double x0;
  double x1;
  double x2;
};

/// One exceedance row from explicit uniforms: u0 drives X0 = t / u0, u1 and u2 the noise.
ExceedanceRow draw_exceedance_row(const CiModel& model, double t, double u0, double u1, double u2);

/// n i.i.d. rows given X0 > t. Row i depends only on (seed, i), so the result
/// is bit-identical for every thread count.
ExceedanceSample draw_exceedances(const CiModel& model, double t, std::size_t n, std::uint64_t seed,
                                  const SimulationOptions& options = {});

/// w_i = (x_i - beta_i(x0)) / alpha_i(x0).
NormedSample apply_random_norming(const ExceedanceSample& sample, const CiModel& model);

/// w_i = (x_i - beta_i(t)) / alpha_i(t).
NormedSample apply_deterministic_norming(const ExceedanceSample& sample, const CiModel& model);

NormedSample apply_norming(const ExceedanceSample& sample, const CiModel& model, NormingMode mode);

}  // namespace cevnorm
