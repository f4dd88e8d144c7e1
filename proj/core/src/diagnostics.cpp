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

#include "iqpx/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>
#include <string>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "iqpx/errors.hpp"

namespace iqpx {

EntanglementSpectrum entanglement_spectrum(const Statevector& state) {
  const int n = state.n_qubits;
  if (n % 2 != 0 || n < 2) {
    throw InvalidInput("entanglement spectrum needs an even qubit count, got " +
                       std::to_string(n));
  }
  if (state.amplitudes.size() != (std::size_t{1} << n)) {
    throw InvalidInput("statevector length does not match 2^N");
  }
  const Eigen::Index dim_a = Eigen::Index{1} << (n / 2);
  // x = a + dim_a * b with a the low (subsystem A) bits: column-major dim_a x dim_b.
  const Eigen::Map<const Eigen::MatrixXcd> m(state.amplitudes.data(), dim_a, dim_a);
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(m);
  const Eigen::VectorXd& sv = svd.singularValues();

  EntanglementSpectrum out;
  out.n_qubits = n;
  out.cut = n / 2;
  out.eigenvalues.resize(sv.size());
  for (Eigen::Index k = 0; k < sv.size(); ++k) {
    out.eigenvalues[k] = std::max(0.0, sv[k] * sv[k]);
  }
  std::sort(out.eigenvalues.begin(), out.eigenvalues.end());
  return out;
}

double entanglement_entropy(const EntanglementSpectrum& spectrum) {
  double s = 0.0;
  for (double l : spectrum.eigenvalues) {
    if (l > 0.0) s -= l * std::log(l);
  }
  return s;
}

std::vector<double> gap_ratios(std::span<const double> ascending, double floor) {
  if (!(floor >= 0.0)) throw InvalidInput("eigenvalue floor must be non-negative");
  std::vector<double> kept;
  kept.reserve(ascending.size());
  for (double l : ascending) {
    if (l >= floor) kept.push_back(l);
  }
  std::vector<double> ratios;
  if (kept.size() < 3) return ratios;
  ratios.reserve(kept.size() - 2);
  for (std::size_t i = 0; i + 2 < kept.size(); ++i) {
    const double num = kept[i + 1] - kept[i];
    const double den = kept[i + 2] - kept[i + 1];
    if (den < kMinGapDenominator) continue;
    ratios.push_back(num / den);
  }
  return ratios;
}

std::vector<double> gap_ratios(const EntanglementSpectrum& spectrum, double floor) {
  return gap_ratios(std::span<const double>(spectrum.eigenvalues), floor);
}

std::vector<double> fold_ratios(std::span<const double> ratios) {
  std::vector<double> out;
  out.reserve(ratios.size());
  for (double u : ratios) out.push_back(u <= 1.0 ? u : 1.0 / u);
  return out;
}

std::string_view to_string(Ensemble e) noexcept { return e == Ensemble::GOE ? "GOE" : "GUE"; }

double surmise_pdf(Ensemble ensemble, double r) {
  if (!(r >= 0.0)) throw InvalidInput("surmise_pdf: ratio must be non-negative");
  if (std::isinf(r)) return 0.0;
  const double beta = ensemble == Ensemble::GOE ? 1.0 : 2.0;
  const double z = ensemble == Ensemble::GOE
                       ? 8.0 / 27.0
                       : 4.0 * std::numbers::pi / (81.0 * std::numbers::sqrt3);
  return std::pow(r + r * r, beta) / (z * std::pow(1.0 + r + r * r, 1.0 + 1.5 * beta));
}

double folded_surmise_cdf(Ensemble ensemble, double x) {
  if (x <= 0.0) return 0.0;
  x = std::min(x, 1.0);
  // Composite Simpson; the integrand is a smooth polynomial ratio on [0, 1].
  constexpr int kIntervals = 512;
  const double h = x / kIntervals;
  double acc = surmise_pdf(ensemble, 0.0) + surmise_pdf(ensemble, x);
  for (int k = 1; k < kIntervals; ++k) {
    acc += (k % 2 ? 4.0 : 2.0) * surmise_pdf(ensemble, k * h);
  }
  return std::min(1.0, 2.0 * acc * h / 3.0);
}

double ks_distance_to_surmise(std::span<const double> folded, Ensemble ensemble) {
  if (folded.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::vector<double> sorted(folded.begin(), folded.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double cdf = folded_surmise_cdf(ensemble, sorted[i]);
    d = std::max({d, (i + 1) / n - cdf, cdf - i / n});
  }
  return d;
}

double porter_thomas_pdf(double p, double dim) {
  if (!(p >= 0.0)) throw InvalidInput("porter_thomas_pdf: p must be non-negative");
  if (!(dim >= 1.0)) throw InvalidInput("porter_thomas_pdf: dimension must be >= 1");
  return dim * std::exp(-p * dim);
}

namespace {

std::vector<double> pt_edges(int n_qubits, int n_bins) {
  if (n_bins < 2) throw InvalidInput("Porter-Thomas binning needs at least 2 bins");
  const double d = std::ldexp(1.0, n_qubits);
  std::vector<double> edges(n_bins + 1);
  for (int k = 0; k <= n_bins; ++k) edges[k] = 10.0 * k / (n_bins * d);
  return edges;
}

}  // namespace

BinnedDistribution porter_thomas_histogram(const ProbDist& dist, int n_bins) {
  BinnedDistribution hist;
  hist.edges = pt_edges(dist.n_qubits, n_bins);
  hist.masses.assign(n_bins, 0.0);
  const double d = std::ldexp(1.0, dist.n_qubits);
  // bin index from the value in units of the bin width 10/(n_bins d)
  const double scale = d * n_bins / 10.0;
  for (double p : dist.probs) {
    const double pos = p * scale;
    const auto k = pos >= n_bins ? n_bins - 1 : static_cast<int>(pos);
    hist.masses[std::max(k, 0)] += 1.0;
  }
  const double total = static_cast<double>(dist.probs.size());
  for (auto& m : hist.masses) m /= total;
  return hist;
}

BinnedDistribution porter_thomas_reference(int n_qubits, int n_bins) {
  BinnedDistribution ref;
  ref.edges = pt_edges(n_qubits, n_bins);
  ref.masses.resize(n_bins);
  const double d = std::ldexp(1.0, n_qubits);
  double total = 0.0;
  for (int k = 0; k < n_bins; ++k) {
    // integral of d e^{-pd} over [a_k, a_{k+1}]
    ref.masses[k] = std::exp(-ref.edges[k] * d) - std::exp(-ref.edges[k + 1] * d);
    total += ref.masses[k];
  }
  for (auto& m : ref.masses) m /= total;
  return ref;
}

double kl_to_porter_thomas(const ProbDist& dist, int n_bins) {
  return kl_divergence(porter_thomas_histogram(dist, n_bins),
                       porter_thomas_reference(dist.n_qubits, n_bins));
}

double kl_divergence(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw InvalidInput("kl_divergence: size mismatch");
  double kl = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (p[k] <= 0.0) continue;
    if (!(q[k] > 0.0)) {
      throw DomainError("kl_divergence: reference has zero mass at index " +
                        std::to_string(k) + " where the first argument is positive");
    }
    kl += p[k] * std::log(p[k] / q[k]);
  }
  return kl;
}

double kl_divergence(const ProbDist& p, const ProbDist& q) {
  if (p.n_qubits != q.n_qubits) throw InvalidInput("kl_divergence: qubit count mismatch");
  return kl_divergence(std::span<const double>(p.probs), std::span<const double>(q.probs));
}

double kl_divergence(const BinnedDistribution& p, const BinnedDistribution& q) {
  return kl_divergence(std::span<const double>(p.masses), std::span<const double>(q.masses));
}

std::vector<double> savitzky_golay_smooth(std::span<const double> series) {
  constexpr int kHalf = 4;
  constexpr int kOrder = 3;
  const int n = static_cast<int>(series.size());
  if (n < 2 * kHalf + 1) {
    throw InvalidInput("Savitzky-Golay smoothing needs at least 9 points, got " +
                       std::to_string(n));
  }
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) {
    const int lo = std::max(0, i - kHalf);
    const int hi = std::min(n - 1, i + kHalf);
    const int rows = hi - lo + 1;
    Eigen::MatrixXd v(rows, kOrder + 1);
    Eigen::VectorXd rhs(rows);
    for (int r = 0; r < rows; ++r) {
      const double t = lo + r - i;
      double power = 1.0;
      for (int c = 0; c <= kOrder; ++c) {
        v(r, c) = power;
        power *= t;
      }
      rhs(r) = series[lo + r];
    }
    // Local coordinates centred on i: the fitted value is the constant term.
    out[i] = v.colPivHouseholderQr().solve(rhs)(0);
  }
  return out;
}

namespace {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void write_histogram_csv(const std::filesystem::path& path, const BinnedDistribution& hist) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << "left_edge,right_edge,mass\n";
  for (std::size_t k = 0; k < hist.masses.size(); ++k) {
    out << format_double(hist.edges[k]) << ',' << format_double(hist.edges[k + 1]) << ','
        << format_double(hist.masses[k]) << '\n';
  }
  if (!out) throw IoError("write failed on '" + path.string() + "'");
}

void write_series_csv(const std::filesystem::path& path, std::string_view column,
                      std::span<const double> values) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << "index," << column << '\n';
  for (std::size_t k = 0; k < values.size(); ++k) {
    out << k << ',' << format_double(values[k]) << '\n';
  }
  if (!out) throw IoError("write failed on '" + path.string() + "'");
}

}  // namespace iqpx
