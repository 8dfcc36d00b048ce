// Copyright 2026 cevnorm developers
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>

namespace cevnorm {

/// Philox4x32-10 block function (Salmon et al., SC'11). Stateless: maps a
/// 128-bit counter to 128 random bits under a 64-bit key.
class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;

  constexpr explicit Philox4x32(std::uint64_t key)
      : k0_(static_cast<std::uint32_t>(key)), k1_(static_cast<std::uint32_t>(key >> 32)) {}

  constexpr Counter operator()(Counter ctr) const {
    std::uint32_t k0 = k0_;
    std::uint32_t k1 = k1_;
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        k0 += kW0;
        k1 += kW1;
      }
      const std::uint64_t p0 = std::uint64_t{kM0} * ctr[0];
      const std::uint64_t p1 = std::uint64_t{kM1} * ctr[2];
      const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
      const auto lo0 = static_cast<std::uint32_t>(p0);
      const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
      const auto lo1 = static_cast<std::uint32_t>(p1);
      ctr = {hi1 ^ ctr[1] ^ k0, lo1, hi0 ^ ctr[3] ^ k1, lo0};
    }
    return ctr;
  }

 private:
  static constexpr std::uint32_t kM0 = 0xD2511F53u;
  static constexpr std::uint32_t kM1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kW0 = 0x9E3779B9u;
  static constexpr std::uint32_t kW1 = 0xBB67AE85u;

  std::uint32_t k0_;
  std::uint32_t k1_;
};

/// Disjoint purposes that draw from the same seed never share counters.
enum class StreamId : std::uint32_t {
  kSample = 1,
  kPermutation = 2,
  kSynthetic = 3,
  kProperty = 4,
};

/// Maps 64 random bits to a double strictly inside (0, 1). Uses 52 bits so
/// that the largest output, 1 - 2^-53, is representable.
constexpr double to_open_unit(std::uint64_t bits) {
  return (static_cast<double>(bits >> 12) + 0.5) * 0x1p-52;
}

/// Sequential draws addressed by (seed, stream, index). Two streams built
/// from the same triple produce the same values, whatever thread builds them.
class CounterStream {
 public:
  CounterStream(std::uint64_t seed, StreamId stream, std::uint64_t index)
      : philox_(seed),
        ctr_{0u, static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(index),
             static_cast<std::uint32_t>(index >> 32)} {}

  std::uint64_t next_u64() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const auto out = philox_(ctr_);
    ++ctr_[0];
    spare_ = (std::uint64_t{out[3]} << 32) | out[2];
    have_spare_ = true;
    return (std::uint64_t{out[1]} << 32) | out[0];
  }

  double next_uniform() { return to_open_unit(next_u64()); }

 private:
  Philox4x32 philox_;
  Philox4x32::Counter ctr_;
  std::uint64_t spare_ = 0;
  bool have_spare_ = false;
};

/// xoshiro256** for inner loops (permutation shuffles). Always seeded from a
/// CounterStream so that reproducibility stays keyed by (seed, stream, index).
class Xoshiro256 {
 public:
  explicit Xoshiro256(CounterStream& seeder) {
    for (auto& s : state_) s = seeder.next_u64();
    if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0) state_[0] = 1;
  }

  std::uint64_t operator()() {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  /// Uniform integer in [0, bound) by Lemire's multiply-shift (bias < bound / 2^64).
  std::uint64_t below(std::uint64_t bound) {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>((*this)()) * bound) >> 64);
  }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
  std::array<std::uint64_t, 4> state_{};
};

}  // namespace cevnorm
