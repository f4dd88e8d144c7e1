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

#include "iqpx/hamiltonian.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <string>

#include <nlohmann/json.hpp>

#include "iqpx/errors.hpp"
#include "iqpx/fwht.hpp"
#include "iqpx/io.hpp"

namespace iqpx {
namespace {

constexpr Magic kSpectrumMagic{'I', 'Q', 'P', 'X', 'J', 'S', 'P', 'C'};
constexpr std::uint32_t kSpectrumVersion = 1;

void check_spectrum(const CouplingSpectrum& spec) {
  if (spec.n_qubits < 1 || spec.n_qubits > kHardMaxQubits ||
      spec.J.size() != (std::size_t{1} << spec.n_qubits)) {
    throw InvalidInput("coupling spectrum length " + std::to_string(spec.J.size()) +
                       " does not match 2^" + std::to_string(spec.n_qubits));
  }
}

}  // namespace

CouplingSpectrum reconstruct(const ProbDist& dist) {
  if (dist.probs.size() != (std::size_t{1} << dist.n_qubits)) {
    throw InvalidInput("distribution length does not match 2^N");
  }
  CouplingSpectrum spec{dist.n_qubits, std::vector<double>(dist.probs.size())};
  for (std::size_t x = 0; x < dist.probs.size(); ++x) {
    const double p = dist.probs[x];
    if (!(p >= kMinReconstructProbability) || !std::isfinite(p)) {
      throw DomainError("probability at index " + std::to_string(x) + " is " +
                        std::to_string(p) + "; reconstruction needs p(x) > 0 everywhere");
    }
    spec.J[x] = std::log(p);
  }
  fwht_inverse_inplace(std::span(spec.J));
  return spec;
}

ProbDist reconstruct_distribution(const CouplingSpectrum& spec) {
  check_spectrum(spec);
  ProbDist dist{spec.n_qubits, fwht(spec.J)};
  const double top = *std::max_element(dist.probs.begin(), dist.probs.end());
  double total = 0.0;
  for (auto& e : dist.probs) {
    e = std::exp(e - top);
    total += e;
  }
  for (auto& e : dist.probs) e /= total;
  return dist;
}

double coupling_l1(const CouplingSpectrum& spec) {
  double total = 0.0;
  for (std::size_t y = 1; y < spec.J.size(); ++y) total += std::abs(spec.J[y]);
  return total;
}

double normalized_complexity(const CouplingSpectrum& spec) {
  const double l1 = coupling_l1(spec);
  if (l1 == 0.0) return -std::numeric_limits<double>::infinity();
  return std::log(l1) / std::log(static_cast<double>(spec.n_qubits));
}

CouplingSpectrum truncate(const CouplingSpectrum& spec, double delta) {
  if (!(delta >= 0.0)) throw InvalidInput("truncation threshold must be non-negative");
  CouplingSpectrum out = spec;
  for (std::size_t y = 1; y < out.J.size(); ++y) {
    if (std::abs(out.J[y]) < delta) out.J[y] = 0.0;
  }
  return out;
}

std::size_t support_size(const CouplingSpectrum& spec) {
  std::size_t count = 0;
  for (std::size_t y = 1; y < spec.J.size(); ++y) count += spec.J[y] != 0.0;
  return count;
}

std::vector<double> weight_profile(const CouplingSpectrum& spec) {
  std::vector<double> profile(spec.n_qubits + 1, 0.0);
  for (std::size_t y = 1; y < spec.J.size(); ++y) {
    profile[std::popcount(y)] += std::abs(spec.J[y]);
  }
  return profile;
}

double l1_distance(const ProbDist& a, const ProbDist& b) {
  if (a.n_qubits != b.n_qubits || a.probs.size() != b.probs.size()) {
    throw InvalidInput("l1_distance: distributions have different sizes");
  }
  double total = 0.0;
  for (std::size_t x = 0; x < a.probs.size(); ++x) total += std::abs(a.probs[x] - b.probs[x]);
  return total;
}

namespace {

TruncationResult search_threshold(const CouplingSpectrum& spec, const ProbDist& reference,
                                  double epsilon, const TruncationOptions& options) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw InvalidInput("epsilon must lie in (0, 1), got " + std::to_string(epsilon));
  }
  if (options.grid_points < 2) throw InvalidInput("truncation grid needs at least 2 points");

  auto error_at = [&](double delta) {
    return l1_distance(reconstruct_distribution(truncate(spec, delta)), reference);
  };

  double lo_mag = std::numeric_limits<double>::infinity();
  double hi_mag = 0.0;
  for (std::size_t y = 1; y < spec.J.size(); ++y) {
    const double m = std::abs(spec.J[y]);
    if (m > 0.0) {
      lo_mag = std::min(lo_mag, m);
      hi_mag = std::max(hi_mag, m);
    }
  }

  TruncationResult result;
  if (hi_mag == 0.0) {
    result.delta = 0.0;
    result.truncated = spec;
    result.l1_error = error_at(0.0);
    result.degenerate = true;
    return result;
  }

  const int n = options.grid_points;
  std::vector<double> grid(n);
  const double log_lo = std::log(lo_mag);
  const double log_hi = std::log(hi_mag);
  for (int k = 0; k < n; ++k) {
    grid[k] = std::exp(log_lo + (log_hi - log_lo) * k / (n - 1));
  }
  grid.front() = lo_mag;
  grid.back() = hi_mag;

  std::vector<double> errors(n);
  for (int k = 0; k < n; ++k) errors[k] = error_at(grid[k]);

  // The error-vs-delta map need not be monotone; take the largest bracket.
  int bracket = -1;
  for (int k = n - 2; k >= 0; --k) {
    if (errors[k] < epsilon && errors[k + 1] >= epsilon) {
      bracket = k;
      break;
    }
  }

  if (bracket < 0) {
    if (errors.back() < epsilon) {
      result.delta = hi_mag;
      result.l1_error = errors.back();
      result.truncated = truncate(spec, hi_mag);
      result.degenerate = true;
      return result;
    }
    // grid[0] truncates nothing and so cannot fail in exact arithmetic; if
    // rounding makes it fail, fall back to the untruncated spectrum.
    result.delta = 0.0;
    result.truncated = spec;
    result.l1_error = error_at(0.0);
    return result;
  }

  double lo = grid[bracket];
  double hi = grid[bracket + 1];
  double lo_err = errors[bracket];
  for (int it = 0; it < options.max_bisections && (hi - lo) > options.relative_width * hi; ++it) {
    const double mid = std::sqrt(lo * hi);
    const double err = error_at(mid);
    if (err < epsilon) {
      lo = mid;
      lo_err = err;
    } else {
      hi = mid;
    }
  }
  result.delta = lo;
  result.l1_error = lo_err;
  result.truncated = truncate(spec, lo);
  return result;
}

}  // namespace

TruncationResult find_truncation_threshold(const ProbDist& dist, double epsilon,
                                           const TruncationOptions& options) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw InvalidInput("epsilon must lie in (0, 1), got " + std::to_string(epsilon));
  }
  return search_threshold(reconstruct(dist), dist, epsilon, options);
}

TruncationResult find_truncation_threshold(const CouplingSpectrum& spec, double epsilon,
                                           const TruncationOptions& options) {
  check_spectrum(spec);
  return search_threshold(spec, reconstruct_distribution(spec), epsilon, options);
}

void write_spectrum(const std::filesystem::path& path, const CouplingSpectrum& spec) {
  check_spectrum(spec);
  BinaryWriter w(path);
  w.magic(kSpectrumMagic);
  w.u32(kSpectrumVersion);
  w.u32(static_cast<std::uint32_t>(spec.n_qubits));
  w.f64s(spec.J);
  w.close();
}

CouplingSpectrum read_spectrum(const std::filesystem::path& path) {
  BinaryReader r(path);
  r.expect_magic(kSpectrumMagic);
  if (const auto version = r.u32(); version != kSpectrumVersion) {
    throw IoError("'" + path.string() + "' has unsupported version " + std::to_string(version));
  }
  CouplingSpectrum spec;
  spec.n_qubits = static_cast<int>(r.u32());
  if (spec.n_qubits < 1 || spec.n_qubits > kHardMaxQubits) {
    throw IoError("'" + path.string() + "' declares invalid N=" + std::to_string(spec.n_qubits));
  }
  spec.J = r.f64s(std::size_t{1} << spec.n_qubits);
  r.expect_end();
  return spec;
}

nlohmann::json spectrum_summary(const CouplingSpectrum& spec) {
  const double nc = normalized_complexity(spec);
  return {{"n_qubits", spec.n_qubits},
          {"coupling_l1", coupling_l1(spec)},
          {"normalized_complexity", std::isfinite(nc) ? nlohmann::json(nc) : nlohmann::json()},
          {"support_size", support_size(spec)},
          {"weight_profile", weight_profile(spec)}};
}

}  // namespace iqpx
