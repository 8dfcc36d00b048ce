// Copyright 2026 cevnorm developers
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>

#include "cevnorm/simulate.hpp"

namespace cevnorm {

/// Shortest decimal that parses back to exactly `value`.
std::string format_double(double value);

// CSV with header "x0,x1,x2" or "w1,w2"; one row per draw.
void write_csv(std::ostream& out, const ExceedanceSample& sample);
void write_csv(std::ostream& out, const NormedSample& sample);
void write_csv(const std::filesystem::path& path, const ExceedanceSample& sample);
void write_csv(const std::filesystem::path& path, const NormedSample& sample);

/// Binary cache layout (all integers and doubles little-endian):
///
///   bytes 0-7    magic "CEVNSMPL"
///   bytes 8-11   format version (1)
///   bytes 12-15  kind (1 = exceedance sample, 2 = normed sample)
///   f64 t, u64 seed, u64 n, u32 mode (normed: 0 random, 1 deterministic; else 0),
///   u32 model-id length, model-id bytes, then each column as n f64 values.
inline constexpr std::array<char, 8> kBinaryMagic{'C', 'E', 'V', 'N', 'S', 'M', 'P', 'L'};
inline constexpr std::uint32_t kBinaryVersion = 1;

void write_binary(const std::filesystem::path& path, const ExceedanceSample& sample);
void write_binary(const std::filesystem::path& path, const NormedSample& sample);
ExceedanceSample read_exceedance_binary(const std::filesystem::path& path);
NormedSample read_normed_binary(const std::filesystem::path& path);

}  // namespace cevnorm
