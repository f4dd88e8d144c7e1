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

// Classical parent Hamiltonians of strictly positive distributions.
//
// For p(x) > 0 everywhere, log p(x) = sum_y J(y) (-1)^{x.y} with
// J = W^{-1}{log p}. The y = 0 entry carries the constant term (normalization
// included), so exponentiating the forward transform of J and renormalizing
// recovers p exactly.

#include <cstddef>
#include <filesystem>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "iqpx/circuit.hpp"

namespace iqpx {

struct CouplingSpectrum {
  int n_qubits = 0;
  std::vector<double> J;  // indexed by subset mask y
};

/// Smallest probability reconstruct() accepts.
inline constexpr double kMinReconstructProbability = 1e-300;

/// J = fwht_inverse(log p). Throws DomainError naming the first index whose
/// probability is below kMinReconstructProbability.
CouplingSpectrum reconstruct(const ProbDist& dist);

/// probs(x) proportional to exp(sum_y J(y) (-1)^{x.y}); max exponent is
/// subtracted before exponentiation.
ProbDist reconstruct_distribution(const CouplingSpectrum& spec);

/// sum_{y != 0} |J(y)|
double coupling_l1(const CouplingSpectrum& spec);

/// log(coupling_l1) / log N. Returns -infinity when coupling_l1 is 0.
double normalized_complexity(const CouplingSpectrum& spec);

/// Zeroes every y != 0 entry with |J(y)| < delta. J(0) is kept.
CouplingSpectrum truncate(const CouplingSpectrum& spec, double delta);

/// Number of nonzero entries with y != 0.
std::size_t support_size(const CouplingSpectrum& spec);

/// Entry k is sum over masks of Hamming weight k (y != 0) of |J(y)|.
std::vector<double> weight_profile(const CouplingSpectrum& spec);

/// sum_x |a(x) - b(x)|
double l1_distance(const ProbDist& a, const ProbDist& b);

struct TruncationOptions {
  int grid_points = 64;
  double relative_width = 1e-3;
  int max_bisections = 40;
};

struct TruncationResult {
  double delta = 0.0;
  CouplingSpectrum truncated;
  double l1_error = 0.0;
  // Every grid threshold met the target (or there was nothing to truncate);
  // delta is then max |J(y != 0)|.
  bool degenerate = false;
};

/// Largest delta found with ||p_delta - p||_1 < epsilon: log-spaced grid over
/// the nonzero |J(y != 0)| range, bracket the crossing, then bisect.
/// Requires 0 < epsilon < 1 and a strictly positive distribution.
TruncationResult find_truncation_threshold(const ProbDist& dist, double epsilon,
                                           const TruncationOptions& options = {});

/// Same search starting from an existing spectrum (p is rebuilt from it).
TruncationResult find_truncation_threshold(const CouplingSpectrum& spec, double epsilon,
                                           const TruncationOptions& options = {});

// Binary spectrum file: 8-byte magic "IQPXJSPC", u32 version, u32 N, then
// 2^N little-endian IEEE-754 doubles in mask order.
void write_spectrum(const std::filesystem::path& path, const CouplingSpectrum& spec);
CouplingSpectrum read_spectrum(const std::filesystem::path& path);

/// {n_qubits, coupling_l1, normalized_complexity, support_size, weight_profile}
nlohmann::json spectrum_summary(const CouplingSpectrum& spec);

}  // namespace iqpx
