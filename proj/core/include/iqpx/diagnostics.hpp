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

// Entanglement-spectrum statistics, Porter-Thomas comparisons, KL divergences
// and Savitzky-Golay smoothing.

#include <cstddef>
#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

#include "iqpx/circuit.hpp"

namespace iqpx {

struct EntanglementSpectrum {
  int n_qubits = 0;
  int cut = 0;                      // qubits in subsystem A (= N/2)
  std::vector<double> eigenvalues;  // ascending, clamped at 0
};

/// Eigenvalues of rho_A for the equal bipartition A = qubits 0..N/2-1, as
/// squared singular values of the 2^{N/2} x 2^{N/2} amplitude matrix.
EntanglementSpectrum entanglement_spectrum(const Statevector& state);

/// -sum lambda log lambda (natural log), 0 log 0 = 0.
double entanglement_entropy(const EntanglementSpectrum& spectrum);

inline constexpr double kDefaultEigenvalueFloor = 1e-12;
inline constexpr double kMinGapDenominator = 1e-14;

/// u_i = (l_{i+1} - l_i) / (l_{i+2} - l_{i+1}) over the ascending eigenvalues
/// that are >= floor. Ratios with a denominator below 1e-14 are dropped.
std::vector<double> gap_ratios(std::span<const double> ascending,
                               double floor = kDefaultEigenvalueFloor);
std::vector<double> gap_ratios(const EntanglementSpectrum& spectrum,
                               double floor = kDefaultEigenvalueFloor);

/// min(u, 1/u) per ratio; values land in [0, 1].
std::vector<double> fold_ratios(std::span<const double> ratios);

enum class Ensemble { GOE, GUE };

std::string_view to_string(Ensemble e) noexcept;

/// Gap-ratio surmise P_beta(r) = (r + r^2)^beta / (Z_beta (1 + r + r^2)^{1 + 3 beta / 2}).
double surmise_pdf(Ensemble ensemble, double r);

/// CDF of the folded ratio min(r, 1/r) on [0, 1], by quadrature of 2 P(r).
double folded_surmise_cdf(Ensemble ensemble, double x);

/// Kolmogorov-Smirnov distance between folded ratio samples and the folded
/// surmise. NaN for an empty sample.
double ks_distance_to_surmise(std::span<const double> folded, Ensemble ensemble);

/// d exp(-p d): density of outcome probabilities for a Haar state of dimension d.
double porter_thomas_pdf(double p, double dim);

struct BinnedDistribution {
  std::vector<double> edges;   // m ascending edges
  std::vector<double> masses;  // m - 1 bins
};

inline constexpr int kDefaultPorterThomasBins = 50;

/// Histogram of the 2^N values p(x) on uniform bins over [0, 10/d]; values
/// beyond the last edge go to the last bin.
BinnedDistribution porter_thomas_histogram(const ProbDist& dist,
                                           int n_bins = kDefaultPorterThomasBins);

/// Porter-Thomas mass per bin over [0, 10/d], renormalized to the binned range.
BinnedDistribution porter_thomas_reference(int n_qubits, int n_bins = kDefaultPorterThomasBins);

/// KL(histogram || Porter-Thomas).
double kl_to_porter_thomas(const ProbDist& dist, int n_bins = kDefaultPorterThomasBins);

/// sum P log(P/Q), 0 log 0 = 0. DomainError if some Q_k = 0 where P_k > 0.
double kl_divergence(std::span<const double> p, std::span<const double> q);
double kl_divergence(const ProbDist& p, const ProbDist& q);
double kl_divergence(const BinnedDistribution& p, const BinnedDistribution& q);

/// 9-point cubic Savitzky-Golay smoothing. The first and last four points use
/// a cubic least-squares fit over the truncated window [i-4, i+4] clipped to
/// the series. Requires at least 9 points.
std::vector<double> savitzky_golay_smooth(std::span<const double> series);

// CSV writers with a one-line header.
void write_histogram_csv(const std::filesystem::path& path, const BinnedDistribution& hist);
void write_series_csv(const std::filesystem::path& path, std::string_view column,
                      std::span<const double> values);

}  // namespace iqpx
