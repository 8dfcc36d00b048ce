// Copyright 2026 cevnorm developers
// SPDX-License-Identifier: Apache-2.0
#include "cevnorm/sample_io.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cevnorm/error.hpp"
#include "doctest.h"

using namespace cevnorm;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "cevnorm_test_sample_io";
  fs::create_directories(dir);
  return dir / name;
}

ExceedanceSample small_sample() {
  return draw_exceedances(make_model({1.0, 0.5, 1.0}, {1.0, 0.5, 1.0}), 50.0, 10, 1);
}

}  // namespace

TEST_CASE("format_double round-trips") {
  for (const double v : {0.1, -3.0, 1e-300, 123456.789, 2.0 / 3.0}) {
    CHECK(std::stod(format_double(v)) == v);
  }
  CHECK(format_double(2.0) == "2");
}

TEST_CASE("csv has a header and one line per row") {
  std::ostringstream out;
  write_csv(out, small_sample());
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "x0,x1,x2");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 10);

  std::ostringstream again;
  write_csv(again, small_sample());
  CHECK(again.str() == out.str());
}

TEST_CASE("binary cache round-trips exactly") {
  const auto s = small_sample();
  const auto path = scratch("exceedance.bin");
  write_binary(path, s);
  const auto r = read_exceedance_binary(path);
  CHECK(r.x0 == s.x0);
  CHECK(r.x1 == s.x1);
  CHECK(r.x2 == s.x2);
  CHECK(r.t == s.t);
  CHECK(r.seed == s.seed);
  CHECK(r.model_id == s.model_id);

  const auto normed = apply_random_norming(s, make_model({1.0, 0.5, 1.0}, {1.0, 0.5, 1.0}));
  const auto npath = scratch("normed.bin");
  write_binary(npath, normed);
  const auto rn = read_normed_binary(npath);
  CHECK(rn.w1 == normed.w1);
  CHECK(rn.mode == normed.mode);
  CHECK_THROWS_AS(read_exceedance_binary(npath), IoError);
}

TEST_CASE("corrupt or missing caches are rejected") {
  CHECK_THROWS_AS(read_exceedance_binary(scratch("does_not_exist.bin")), IoError);
  const auto path = scratch("garbage.bin");
  std::ofstream(path) << "not a cache";
  CHECK_THROWS_AS(read_exceedance_binary(path), IoError);
  const auto s = small_sample();
  const auto trunc = scratch("truncated.bin");
  write_binary(trunc, s);
  fs::resize_file(trunc, fs::file_size(trunc) - 8);
  CHECK_THROWS_AS(read_exceedance_binary(trunc), IoError);
}
