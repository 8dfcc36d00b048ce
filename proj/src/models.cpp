// Copyright 2026 cevnorm developers
// SPDX-License-Identifier: Apache-2.0
#include "cevnorm/models.hpp"

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>

#include "cevnorm/error.hpp"

namespace cevnorm {
namespace {

void append_number(std::string& out, double value) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  out.append(buf, res.ptr);
  out.push_back(';');
}

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (const unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace

void CiModel::validate() const {
  for (const auto& p : erv) p.validate();
  for (const auto& law : noise) law.validate();
  if (!(perturbation >= 0.0) || !std::isfinite(perturbation)) {
    throw DomainError("CiModel.perturbation must be finite and non-negative");
  }
}

CiModel make_model(ErvParams erv1, ErvParams erv2, NoiseLaw noise1, NoiseLaw noise2, double perturbation) {
  CiModel model{{erv1, erv2}, {noise1, noise2}, perturbation, false};
  model.validate();
  return model;
}

std::string model_id(const CiModel& model) {
  std::string canon = "cimodel/v1;";
  for (std::size_t i = 0; i < 2; ++i) {
    append_number(canon, model.erv[i].a);
    append_number(canon, model.erv[i].rho);
    append_number(canon, model.erv[i].kappa);
    canon.append(to_string(model.noise[i].family));
    canon.push_back(';');
    append_number(canon, model.noise[i].location);
    append_number(canon, model.noise[i].scale);
  }
  append_number(canon, model.perturbation);
  canon.append(model.coupled_noise ? "coupled" : "independent");
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(fnv1a(canon)));
  return hex;
}

double sample_pareto_exceedance(double t, double u) {
  if (!(t >= 1.0)) throw DomainError("threshold t must be >= 1");
  if (!(u > 0.0 && u < 1.0)) throw DomainError("uniform draw must lie in (0,1)");
  const double x0 = t / u;
  // u within half an ulp of 1 rounds t / u back to t.
  return x0 > t ? x0 : std::nextafter(t, HUGE_VAL);
}

double sample_pareto_exceedance(double t, CounterStream& rng) {
  return sample_pareto_exceedance(t, rng.next_uniform());
}

ConditionalDraw sample_conditional(const CiModel& model, double x0, double u1, double u2) {
  if (!(x0 > 0.0)) throw DomainError("conditioning value x0 must be positive");
  if (model.coupled_noise) u2 = u1;
  const double shift = model.perturbation / x0;
  const double z1 = noise_quantile(model.noise[0], u1) + shift;
  const double z2 = noise_quantile(model.noise[1], u2) + shift;
  return {beta(model.erv[0], x0) + alpha(model.erv[0], x0) * z1,
          beta(model.erv[1], x0) + alpha(model.erv[1], x0) * z2};
}

ConditionalDraw sample_conditional(const CiModel& model, double x0, CounterStream& rng) {
  const double u1 = rng.next_uniform();
  const double u2 = rng.next_uniform();
  return sample_conditional(model, x0, u1, u2);
}

double kernel_cdf(const CiModel& model, Coordinate c, double x0, double y) {
  if (!(x0 > 0.0)) throw DomainError("conditioning value x0 must be positive");
  const ErvParams& p = model.erv_of(c);
  const double z = (y - beta(p, x0)) / alpha(p, x0) - model.perturbation / x0;
  return noise_cdf(model.noise_of(c), z);
}

double theoretical_Gv(const CiModel& model, Coordinate c, double v, double x) {
  if (!(v >= 1.0)) throw DomainError("theoretical_Gv requires v >= 1");
  return noise_cdf(model.noise_of(c), limit_shift(x, v, model.erv_of(c)));
}

}  // namespace cevnorm
