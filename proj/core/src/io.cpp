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

#include "iqpx/io.hpp"

#include <algorithm>
#include <sstream>

namespace iqpx {
namespace {

template <typename T>
T to_little(T v) {
  if constexpr (std::endian::native == std::endian::big) {
    auto bytes = std::bit_cast<std::array<unsigned char, sizeof(T)>>(v);
    std::reverse(bytes.begin(), bytes.end());
    return std::bit_cast<T>(bytes);
  } else {
    return v;
  }
}

constexpr Magic kDistMagic{'I', 'Q', 'P', 'X', 'P', 'R', 'O', 'B'};
constexpr std::uint32_t kDistVersion = 1;

}  // namespace

BinaryWriter::BinaryWriter(const std::filesystem::path& path)
    : path_(path), out_(path, std::ios::binary | std::ios::trunc) {
  if (!out_) throw IoError("cannot open '" + path.string() + "' for writing");
}

void BinaryWriter::raw(const void* data, std::size_t n) {
  out_.write(static_cast<const char*>(data), static_cast<std::streamsize>(n));
  if (!out_) throw IoError("write failed on '" + path_.string() + "'");
}

void BinaryWriter::magic(const Magic& m) { raw(m.data(), m.size()); }
void BinaryWriter::u8(std::uint8_t v) { raw(&v, 1); }
void BinaryWriter::u32(std::uint32_t v) {
  v = to_little(v);
  raw(&v, sizeof v);
}
void BinaryWriter::u64(std::uint64_t v) {
  v = to_little(v);
  raw(&v, sizeof v);
}
void BinaryWriter::f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
void BinaryWriter::f64s(std::span<const double> values) {
  if constexpr (std::endian::native == std::endian::little) {
    raw(values.data(), values.size_bytes());
  } else {
    for (double v : values) f64(v);
  }
}
void BinaryWriter::close() {
  out_.close();
  if (!out_) throw IoError("closing '" + path_.string() + "' failed");
}

BinaryReader::BinaryReader(const std::filesystem::path& path)
    : path_(path), in_(path, std::ios::binary) {
  if (!in_) throw IoError("cannot open '" + path.string() + "' for reading");
}

void BinaryReader::raw(void* data, std::size_t n) {
  in_.read(static_cast<char*>(data), static_cast<std::streamsize>(n));
  if (static_cast<std::size_t>(in_.gcount()) != n) {
    throw IoError("unexpected end of file in '" + path_.string() + "'");
  }
}

void BinaryReader::expect_magic(const Magic& m) {
  Magic got{};
  raw(got.data(), got.size());
  if (got != m) {
    throw IoError("'" + path_.string() + "' has wrong magic, expected " +
                  std::string(m.data(), m.size()));
  }
}
std::uint8_t BinaryReader::u8() {
  std::uint8_t v = 0;
  raw(&v, 1);
  return v;
}
std::uint32_t BinaryReader::u32() {
  std::uint32_t v = 0;
  raw(&v, sizeof v);
  return to_little(v);
}
std::uint64_t BinaryReader::u64() {
  std::uint64_t v = 0;
  raw(&v, sizeof v);
  return to_little(v);
}
double BinaryReader::f64() { return std::bit_cast<double>(u64()); }
std::vector<double> BinaryReader::f64s(std::size_t count) {
  std::vector<double> values(count);
  if constexpr (std::endian::native == std::endian::little) {
    raw(values.data(), count * sizeof(double));
  } else {
    for (auto& v : values) v = f64();
  }
  return values;
}
void BinaryReader::expect_end() {
  if (in_.peek() != std::char_traits<char>::eof()) {
    throw IoError("trailing bytes in '" + path_.string() + "'");
  }
}

void write_distribution(const std::filesystem::path& path, const ProbDist& dist) {
  BinaryWriter w(path);
  w.magic(kDistMagic);
  w.u32(kDistVersion);
  w.u32(static_cast<std::uint32_t>(dist.n_qubits));
  w.f64s(dist.probs);
  w.close();
}

ProbDist read_distribution(const std::filesystem::path& path) {
  BinaryReader r(path);
  r.expect_magic(kDistMagic);
  if (const auto version = r.u32(); version != kDistVersion) {
    throw IoError("'" + path.string() + "' has unsupported version " + std::to_string(version));
  }
  ProbDist dist;
  dist.n_qubits = static_cast<int>(r.u32());
  if (dist.n_qubits < 1 || dist.n_qubits > kHardMaxQubits) {
    throw IoError("'" + path.string() + "' declares invalid N=" + std::to_string(dist.n_qubits));
  }
  dist.probs = r.f64s(std::size_t{1} << dist.n_qubits);
  r.expect_end();
  return dist;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << contents;
  out.close();
  if (!out) throw IoError("write failed on '" + path.string() + "'");
}

}  // namespace iqpx
