// Copyright 2026 cevnorm developers
// SPDX-License-Identifier: Apache-2.0
#include "cevnorm/noise.hpp"

#include <boost/math/special_functions/erf.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "cevnorm/error.hpp"

namespace cevnorm {

std::string_view to_string(NoiseFamily family) {
  switch (family) {
    case NoiseFamily::kGaussian: return "gaussian";
    case NoiseFamily::kGumbel: return "gumbel";
    case NoiseFamily::kLogistic: return "logistic";
    case NoiseFamily::kUniform: return "uniform";
  }
  return "unknown";
}

NoiseFamily parse_noise_family(std::string_view name) {
  if (name == "gaussian") return NoiseFamily::kGaussian;
  if (name == "gumbel") return NoiseFamily::kGumbel;
  if (name == "logistic") return NoiseFamily::kLogistic;
  if (name == "uniform") return NoiseFamily::kUniform;
  throw DomainError("unknown noise family '" + std::string(name) +
                    "' (expected gaussian, gumbel, logistic or uniform)");
}

void NoiseLaw::validate() const {
  if (!std::isfinite(location)) throw DomainError("NoiseLaw.location must be finite");
  if (!(scale > 0.0) || !std::isfinite(scale)) throw DomainError("NoiseLaw.scale must be positive and finite");
}

double noise_cdf(const NoiseLaw& law, double x) {
  if (std::isnan(x)) return std::numeric_limits<double>::quiet_NaN();
  const double z = (x - law.location) / law.scale;
  switch (law.family) {
    case NoiseFamily::kGaussian:
      return 0.5 * std::erfc(-z * std::numbers::sqrt2 / 2.0);
    case NoiseFamily::kGumbel:
      return std::exp(-std::exp(-z));
    case NoiseFamily::kLogistic:
      return z >= 0.0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
    case NoiseFamily::kUniform:
      return z <= 0.0 ? 0.0 : (z >= 1.0 ? 1.0 : z);
  }
  return std::numeric_limits<double>::quiet_NaN();
}

double noise_quantile(const NoiseLaw& law, double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw DomainError("noise_quantile: probability must lie in (0,1), got " + std::to_string(p));
  }
  double z = 0.0;
  switch (law.family) {
    case NoiseFamily::kGaussian:
      z = -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p);
      break;
    case NoiseFamily::kGumbel:
      z = -std::log(-std::log(p));
      break;
    case NoiseFamily::kLogistic:
      z = std::log(p) - std::log1p(-p);
      break;
    case NoiseFamily::kUniform:
      z = p;
      break;
  }
  return law.location + law.scale * z;
}

double noise_median(const NoiseLaw& law) {
  switch (law.family) {
    case NoiseFamily::kGumbel:
      return law.location - law.scale * std::log(std::numbers::ln2);
    case NoiseFamily::kUniform:
      return law.location + 0.5 * law.scale;
    default:
      return law.location;
  }
}

double standard_log_pdf(NoiseFamily family, double z) {
  switch (family) {
    case NoiseFamily::kGaussian:
      return -0.5 * z * z - 0.5 * std::log(2.0 * std::numbers::pi);
    case NoiseFamily::kGumbel:
      return -z - std::exp(-z);
    case NoiseFamily::kLogistic: {
      const double m = std::abs(z);
      return -m - 2.0 * std::log1p(std::exp(-m));
    }
    case NoiseFamily::kUniform:
      return (z >= 0.0 && z <= 1.0) ? 0.0 : -std::numeric_limits<double>::infinity();
  }
  return -std::numeric_limits<double>::infinity();
}

double standard_mean(NoiseFamily family) {
  switch (family) {
    case NoiseFamily::kGumbel: return std::numbers::egamma;
    case NoiseFamily::kUniform: return 0.5;
    default: return 0.0;
  }
}

double standard_sd(NoiseFamily family) {
  switch (family) {
    case NoiseFamily::kGaussian: return 1.0;
    case NoiseFamily::kGumbel: return std::numbers::pi / std::sqrt(6.0);
    case NoiseFamily::kLogistic: return std::numbers::pi / std::sqrt(3.0);
    case NoiseFamily::kUniform: return 1.0 / std::sqrt(12.0);
  }
  return 1.0;
}

}  // namespace cevnorm
