// Copyright 2026 The iqpx Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include "iqpx/circuit.hpp"
#include "iqpx/errors.hpp"

namespace iqpx {

using Magic = std::array<char, 8>;

/// Little-endian binary writer with path context on failure.
class BinaryWriter {
 public:
  explicit BinaryWriter(const std::filesystem::path& path);

  void magic(const Magic& m);
  void u8(std::uint8_t v);
  void u32(std::uint32_t v);
  void u64(std::uint64_t v);
  void f64(double v);
  void f64s(std::span<const double> values);
  void close();

 private:
  void raw(const void* data, std::size_t n);

  std::filesystem::path path_;
  std::ofstream out_;
};

class BinaryReader {
 public:
  explicit BinaryReader(const std::filesystem::path& path);

  void expect_magic(const Magic& m);
  std::uint8_t u8();
  std::uint32_t u32();
  std::uint64_t u64();
  double f64();
  std::vector<double> f64s(std::size_t count);
  /// Throws IoError unless the whole file was consumed.
  void expect_end();

 private:
  void raw(void* data, std::size_t n);

  std::filesystem::path path_;
  std::ifstream in_;
};

// Distribution file: magic "IQPXPROB", u32 version, u32 N, 2^N LE doubles.
void write_distribution(const std::filesystem::path& path, const ProbDist& dist);
ProbDist read_distribution(const std::filesystem::path& path);

/// Reads a whole text file; IoError with the path on failure.
std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& contents);

}  // namespace iqpx
