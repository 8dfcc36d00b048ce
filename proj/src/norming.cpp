// Copyright 2026 cevnorm developers
// SPDX-License-Identifier: Apache-2.0
#include "cevnorm/norming.hpp"

#include <cmath>
#include <string>

#include "cevnorm/error.hpp"

namespace cevnorm {
namespace {

void require_positive(double value, const char* what) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw DomainError(std::string(what) + " must be positive and finite, got " + std::to_string(value));
  }
}

}  // namespace

void ErvParams::validate() const {
  if (!std::isfinite(a) || !std::isfinite(rho) || !std::isfinite(kappa)) {
    throw DomainError("ErvParams fields must be finite");
  }
  if (!(a > 0.0)) throw DomainError("ErvParams.a must be positive");
}

double box_cox(double v, double rho) {
  require_positive(v, "box_cox argument");
  const double log_v = std::log(v);
  if (std::abs(rho) < kRhoLogCutoff) return log_v;
  return std::expm1(rho * log_v) / rho;
}

double alpha(const ErvParams& params, double t) {
  require_positive(t, "alpha argument t");
  return params.a * std::exp(params.rho * std::log(t));
}

double beta(const ErvParams& params, double t) {
  require_positive(t, "beta argument t");
  if (params.kappa == 0.0) return 0.0;
  return params.kappa * box_cox(t, params.rho);
}

double psi(double v, double rho, double kappa_eff) {
  require_positive(v, "psi argument v");
  if (kappa_eff == 0.0) return 0.0;
  return kappa_eff * box_cox(v, rho);
}

double limit_shift(double x, double v, const ErvParams& params) {
  const double shift = psi(v, params.rho, params.kappa_eff());
  return (x - shift) * std::exp(-params.rho * std::log(v));
}

}  // namespace cevnorm
