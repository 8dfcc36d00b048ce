// Copyright 2026 cevnorm developers
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <string_view>

namespace cevnorm {

enum class NoiseFamily { kGaussian, kGumbel, kLogistic, kUniform };

std::string_view to_string(NoiseFamily family);
/// Accepts "gaussian", "gumbel", "logistic", "uniform"; throws DomainError otherwise.
NoiseFamily parse_noise_family(std::string_view name);

/// Location-scale law with closed-form CDF and quantile. For the uniform
/// family the support is [location, location + scale].
struct NoiseLaw {
  NoiseFamily family = NoiseFamily::kGaussian;
  double location = 0.0;
  double scale = 1.0;

  void validate() const;
  friend bool operator==(const NoiseLaw&, const NoiseLaw&) = default;
};

double noise_cdf(const NoiseLaw& law, double x);
/// Inverse of noise_cdf; requires 0 < p < 1.
double noise_quantile(const NoiseLaw& law, double p);
double noise_median(const NoiseLaw& law);

// Standardized (location 0, scale 1) members of each family.
double standard_log_pdf(NoiseFamily family, double z);
double standard_mean(NoiseFamily family);
double standard_sd(NoiseFamily family);

}  // namespace cevnorm
