// Copyright 2026 cevnorm developers
// SPDX-License-Identifier: Apache-2.0
#include "cevnorm/sample_io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <ostream>
#include <span>
#include <vector>

#include "cevnorm/error.hpp"

namespace cevnorm {
namespace {

enum class Kind : std::uint32_t { kExceedance = 1, kNormed = 2 };

template <class T>
T to_little(T value) {
  if constexpr (std::endian::native == std::endian::little) {
    return value;
  } else {
    std::array<unsigned char, sizeof(T)> bytes;
    std::memcpy(bytes.data(), &value, sizeof(T));
    std::reverse(bytes.begin(), bytes.end());
    std::memcpy(&value, bytes.data(), sizeof(T));
    return value;
  }
}

class BinaryWriter {
 public:
  explicit BinaryWriter(const std::filesystem::path& path) : out_(path, std::ios::binary | std::ios::trunc) {
    if (!out_) throw IoError("cannot open '" + path.string() + "' for writing");
  }
  template <class T>
  void put(T value) {
    value = to_little(value);
    out_.write(reinterpret_cast<const char*>(&value), sizeof(T));
  }
  void put_bytes(std::string_view bytes) { out_.write(bytes.data(), static_cast<std::streamsize>(bytes.size())); }
  void put_column(std::span<const double> column) {
    if constexpr (std::endian::native == std::endian::little) {
      out_.write(reinterpret_cast<const char*>(column.data()), static_cast<std::streamsize>(column.size_bytes()));
    } else {
      for (double v : column) put(v);
    }
  }
  void finish(const std::filesystem::path& path) {
    out_.flush();
    if (!out_) throw IoError("write to '" + path.string() + "' failed");
  }

 private:
  std::ofstream out_;
};

class BinaryReader {
 public:
  explicit BinaryReader(const std::filesystem::path& path) : path_(path), in_(path, std::ios::binary) {
    if (!in_) throw IoError("cannot open '" + path.string() + "' for reading");
  }
  template <class T>
  T get() {
    T value{};
    in_.read(reinterpret_cast<char*>(&value), sizeof(T));
    check();
    return to_little(value);
  }
  std::string get_bytes(std::size_t n) {
    std::string s(n, '\0');
    in_.read(s.data(), static_cast<std::streamsize>(n));
    check();
    return s;
  }
  std::vector<double> get_column(std::size_t n) {
    std::vector<double> column(n);
    in_.read(reinterpret_cast<char*>(column.data()), static_cast<std::streamsize>(n * sizeof(double)));
    check();
    for (double& v : column) v = to_little(v);
    return column;
  }

 private:
  void check() {
    if (!in_) throw IoError("'" + path_.string() + "' is truncated or unreadable");
  }
  std::filesystem::path path_;
  std::ifstream in_;
};

struct Header {
  double t;
  std::uint64_t seed;
  std::uint64_t n;
  std::uint32_t mode;
  std::string model_id;
};

void write_header(BinaryWriter& w, Kind kind, const Header& h) {
  w.put_bytes(std::string_view(kBinaryMagic.data(), kBinaryMagic.size()));
  w.put(kBinaryVersion);
  w.put(static_cast<std::uint32_t>(kind));
  w.put(h.t);
  w.put(h.seed);
  w.put(h.n);
  w.put(h.mode);
  w.put(static_cast<std::uint32_t>(h.model_id.size()));
  w.put_bytes(h.model_id);
}

Header read_header(BinaryReader& r, Kind expected, const std::filesystem::path& path) {
  const std::string magic = r.get_bytes(kBinaryMagic.size());
  if (magic != std::string_view(kBinaryMagic.data(), kBinaryMagic.size())) {
    throw IoError("'" + path.string() + "' is not a cevnorm sample cache (bad magic)");
  }
  const auto version = r.get<std::uint32_t>();
  if (version != kBinaryVersion) {
    throw IoError("'" + path.string() + "' has unsupported cache version " + std::to_string(version));
  }
  const auto kind = r.get<std::uint32_t>();
  if (kind != static_cast<std::uint32_t>(expected)) {
    throw IoError("'" + path.string() + "' holds a different sample kind");
  }
  Header h;
  h.t = r.get<double>();
  h.seed = r.get<std::uint64_t>();
  h.n = r.get<std::uint64_t>();
  h.mode = r.get<std::uint32_t>();
  const auto id_len = r.get<std::uint32_t>();
  h.model_id = r.get_bytes(id_len);
  return h;
}

std::ofstream open_text(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  return out;
}

}  // namespace

std::string format_double(double value) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

void write_csv(std::ostream& out, const ExceedanceSample& sample) {
  out << "x0,x1,x2\n";
  for (std::size_t i = 0; i < sample.size(); ++i) {
    out << format_double(sample.x0[i]) << ',' << format_double(sample.x1[i]) << ','
        << format_double(sample.x2[i]) << '\n';
  }
}

void write_csv(std::ostream& out, const NormedSample& sample) {
  out << "w1,w2\n";
  for (std::size_t i = 0; i < sample.size(); ++i) {
    out << format_double(sample.w1[i]) << ',' << format_double(sample.w2[i]) << '\n';
  }
}

void write_csv(const std::filesystem::path& path, const ExceedanceSample& sample) {
  auto out = open_text(path);
  write_csv(out, sample);
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

void write_csv(const std::filesystem::path& path, const NormedSample& sample) {
  auto out = open_text(path);
  write_csv(out, sample);
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

void write_binary(const std::filesystem::path& path, const ExceedanceSample& sample) {
  BinaryWriter w(path);
  write_header(w, Kind::kExceedance, {sample.t, sample.seed, sample.size(), 0u, sample.model_id});
  w.put_column(sample.x0);
  w.put_column(sample.x1);
  w.put_column(sample.x2);
  w.finish(path);
}

void write_binary(const std::filesystem::path& path, const NormedSample& sample) {
  BinaryWriter w(path);
  const std::uint32_t mode = sample.mode == NormingMode::kRandom ? 0u : 1u;
  write_header(w, Kind::kNormed, {sample.t, sample.seed, sample.size(), mode, sample.model_id});
  w.put_column(sample.w1);
  w.put_column(sample.w2);
  w.finish(path);
}

ExceedanceSample read_exceedance_binary(const std::filesystem::path& path) {
  BinaryReader r(path);
  const Header h = read_header(r, Kind::kExceedance, path);
  ExceedanceSample s;
  s.t = h.t;
  s.seed = h.seed;
  s.model_id = h.model_id;
  s.x0 = r.get_column(h.n);
  s.x1 = r.get_column(h.n);
  s.x2 = r.get_column(h.n);
  return s;
}

NormedSample read_normed_binary(const std::filesystem::path& path) {
  BinaryReader r(path);
  const Header h = read_header(r, Kind::kNormed, path);
  if (h.mode > 1) throw IoError("'" + path.string() + "' has an unknown norming mode");
  NormedSample s;
  s.t = h.t;
  s.seed = h.seed;
  s.model_id = h.model_id;
  s.mode = h.mode == 0 ? NormingMode::kRandom : NormingMode::kDeterministic;
  s.w1 = r.get_column(h.n);
  s.w2 = r.get_column(h.n);
  return s;
}

}  // namespace cevnorm
