// Copyright 2026 cevnorm developers
// SPDX-License-Identifier: Apache-2.0
#pragma once

namespace cevnorm {

/// Parameters of one extended-regularly-varying norming pair (alpha, beta)
/// in its canonical form
///
///   alpha(t) = a * t^rho,
///   beta(t)  = kappa * (t^rho - 1) / rho      (kappa * log t when rho = 0),
///
/// for which alpha(t x) / alpha(t) = x^rho and
/// (beta(t x) - beta(t)) / alpha(t) = psi(x; rho, kappa / a) hold at every
/// finite t, not only in the limit.
struct ErvParams {
  double a = 1.0;
  double rho = 0.0;
  double kappa = 0.0;

  /// Throws DomainError unless a > 0 and all fields are finite.
  void validate() const;

  /// Location coefficient of the limit shift psi once alpha's scale is divided out.
  double kappa_eff() const { return kappa / a; }

  /// True when the norming is asymptotically constant: (kappa / a, rho) = (0, 0).
  bool is_constant_limit() const { return kappa == 0.0 && rho == 0.0; }

  friend bool operator==(const ErvParams&, const ErvParams&) = default;
};

/// Below this |rho| the logarithmic branch of psi is used.
inline constexpr double kRhoLogCutoff = 1e-10;

/// (v^rho - 1) / rho, continuous at rho = 0 where it equals log v. Requires v > 0.
double box_cox(double v, double rho);

double alpha(const ErvParams& params, double t);
double beta(const ErvParams& params, double t);

/// psi(v) = kappa_eff * (v^rho - 1) / rho, or kappa_eff * log v for rho = 0.
double psi(double v, double rho, double kappa_eff);

/// (x - psi(v; rho, kappa / a)) / v^rho: the argument at which the limit law G
/// is evaluated for the kernel at level t*v.
double limit_shift(double x, double v, const ErvParams& params);

}  // namespace cevnorm
