// Copyright 2026 cevnorm developers
// SPDX-License-Identifier: Apache-2.0
#include "cevnorm/simulate.hpp"

#include <string>

#include "cevnorm/error.hpp"
#include "cevnorm/parallel.hpp"

namespace cevnorm {

std::string_view to_string(NormingMode mode) {
  return mode == NormingMode::kRandom ? "random" : "deterministic";
}

ExceedanceRow draw_exceedance_row(const CiModel& model, double t, double u0, double u1, double u2) {
  const double x0 = sample_pareto_exceedance(t, u0);
  const auto [x1, x2] = sample_conditional(model, x0, u1, u2);
  return {x0, x1, x2};
}

ExceedanceSample draw_exceedances(const CiModel& model, double t, std::size_t n, std::uint64_t seed,
                                  const SimulationOptions& options) {
  model.validate();
  if (!(t >= 1.0)) throw DomainError("draw_exceedances: threshold t must be >= 1");
  if (n == 0) throw DomainError("draw_exceedances: n must be positive");
  const std::size_t bytes_per_row = 3 * sizeof(double);
  if (n > options.memory_budget_bytes / bytes_per_row) {
    throw CapacityError("draw_exceedances: n = " + std::to_string(n) + " rows need " +
                        std::to_string(n * bytes_per_row) + " bytes, above the memory budget of " +
                        std::to_string(options.memory_budget_bytes));
  }

  ExceedanceSample sample;
  sample.x0.resize(n);
  sample.x1.resize(n);
  sample.x2.resize(n);
  sample.t = t;
  sample.seed = seed;
  sample.model_id = model_id(model);

  parallel_ranges(n, options.threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      CounterStream rng(seed, StreamId::kSample, i);
      const double u0 = rng.next_uniform();
      const double u1 = rng.next_uniform();
      const double u2 = rng.next_uniform();
      const auto row = draw_exceedance_row(model, t, u0, u1, u2);
      sample.x0[i] = row.x0;
      sample.x1[i] = row.x1;
      sample.x2[i] = row.x2;
    }
  });
  return sample;
}

namespace {

NormedSample make_normed(const ExceedanceSample& sample, const CiModel& model, NormingMode mode) {
  if (sample.model_id != model_id(model)) {
    throw MismatchError("sample was drawn from model " + sample.model_id + ", not from model " + model_id(model));
  }
  NormedSample out;
  out.mode = mode;
  out.t = sample.t;
  out.seed = sample.seed;
  out.model_id = sample.model_id;
  out.w1.resize(sample.size());
  out.w2.resize(sample.size());
  return out;
}

}  // namespace

NormedSample apply_random_norming(const ExceedanceSample& sample, const CiModel& model) {
  NormedSample out = make_normed(sample, model, NormingMode::kRandom);
  const auto& [p1, p2] = model.erv;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double x0 = sample.x0[i];
    out.w1[i] = (sample.x1[i] - beta(p1, x0)) / alpha(p1, x0);
    out.w2[i] = (sample.x2[i] - beta(p2, x0)) / alpha(p2, x0);
  }
  return out;
}

NormedSample apply_deterministic_norming(const ExceedanceSample& sample, const CiModel& model) {
  NormedSample out = make_normed(sample, model, NormingMode::kDeterministic);
  const auto& [p1, p2] = model.erv;
  const double b1 = beta(p1, sample.t);
  const double a1 = alpha(p1, sample.t);
  const double b2 = beta(p2, sample.t);
  const double a2 = alpha(p2, sample.t);
  for (std::size_t i = 0; i < sample.size(); ++i) {
    out.w1[i] = (sample.x1[i] - b1) / a1;
    out.w2[i] = (sample.x2[i] - b2) / a2;
  }
  return out;
}

NormedSample apply_norming(const ExceedanceSample& sample, const CiModel& model, NormingMode mode) {
  return mode == NormingMode::kRandom ? apply_random_norming(sample, model)
                                      : apply_deterministic_norming(sample, model);
}

}  // namespace cevnorm
