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

// Fast Walsh-Hadamard transform over 2^N-element vectors.
//
// Index convention (global to the library): bit i of an index x is qubit i,
// x_i = (x >> i) & 1. The transform is
//
//   W{v}(y) = sum_x v(x) (-1)^{popcount(x & y)}
//
// computed with N in-place radix-2 butterfly passes.

#include <bit>
#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "iqpx/errors.hpp"

namespace iqpx {

inline bool is_power_of_two(std::size_t n) noexcept { return std::has_single_bit(n); }

/// Number of qubits N for a vector of length 2^N. Throws InvalidInput otherwise.
inline int qubits_for_length(std::size_t length) {
  if (!is_power_of_two(length)) {
    throw InvalidInput("transform length " + std::to_string(length) +
                       " is not a power of two");
  }
  return std::countr_zero(length);
}

namespace detail {

template <typename T>
void butterfly_passes(std::span<T> v) {
  const std::size_t n = v.size();
  for (std::size_t h = 1; h < n; h <<= 1) {
    for (std::size_t i = 0; i < n; i += h << 1) {
      T* lo = v.data() + i;
      T* hi = lo + h;
      for (std::size_t j = 0; j < h; ++j) {
        const T a = lo[j];
        const T b = hi[j];
        lo[j] = a + b;
        hi[j] = a - b;
      }
    }
  }
}

}  // namespace detail

/// Unnormalized transform in place. Length must be a power of two (>= 1).
template <typename T>
void fwht_inplace(std::span<T> v) {
  qubits_for_length(v.size());
  detail::butterfly_passes(v);
}

/// Inverse transform in place: (1/2^N) W{v}.
template <typename T>
void fwht_inverse_inplace(std::span<T> v) {
  qubits_for_length(v.size());
  detail::butterfly_passes(v);
  const double scale = 1.0 / static_cast<double>(v.size());
  for (auto& e : v) e *= scale;
}

template <typename T>
std::vector<T> fwht(std::vector<T> v) {
  fwht_inplace(std::span<T>(v));
  return v;
}

template <typename T>
std::vector<T> fwht_inverse(std::vector<T> v) {
  fwht_inverse_inplace(std::span<T>(v));
  return v;
}

extern template void fwht_inplace<double>(std::span<double>);
extern template void fwht_inplace<std::complex<double>>(std::span<std::complex<double>>);
extern template void fwht_inverse_inplace<double>(std::span<double>);
extern template void fwht_inverse_inplace<std::complex<double>>(
    std::span<std::complex<double>>);

}  // namespace iqpx
