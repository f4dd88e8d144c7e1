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

// Random gate-density IQP instances and their exact output states.
//
// Two diagonal families share the same angles:
//   D: exp[i sum_i theta_i Z_{not i}] exp[i sum_{i<j} phi_ij Z_i Z_j]   -> p(x)
//   F: exp[i sum_i theta_i Z_i]       exp[i sum_{i<j} phi_ij Z_i Z_j]   -> r(x)
// and the output state is H^{(x)N} U_diag |+>^{(x)N}.

#include <complex>
#include <cstdint>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace iqpx {

inline constexpr int kHardMaxQubits = 26;
inline constexpr int kDefaultMaxQubits = 22;

enum class Family { D, F };

Family parse_family(std::string_view name);
std::string_view to_string(Family family) noexcept;

struct Coupling {
  int i = 0;
  int j = 0;
  double value = 0.0;

  friend bool operator==(const Coupling&, const Coupling&) = default;
};

struct CircuitInstance {
  int n_qubits = 0;
  double q = 0.0;
  std::uint64_t seed = 0;
  std::vector<double> theta;
  // Gated-on couplings only, sorted lexicographically by (i, j), i < j.
  std::vector<Coupling> phi;
  // Some theta is exactly 0, +-pi/2 or +-pi, so p(x) has exact zeros.
  bool degenerate_angles = false;

  /// Coupling value for pair (i, j); 0 when the pair is gated off.
  double coupling(int i, int j) const noexcept;

  friend bool operator==(const CircuitInstance&, const CircuitInstance&) = default;
};

/// Validates the instance invariants (even N, angle ranges, sorted keys) and
/// recomputes the degenerate-angle flag. Throws InvalidInput.
void validate(CircuitInstance& inst);

/// Draws an instance. Draw order: theta_0..theta_{N-1}, then for every pair
/// (i<j) in lexicographic order a gate draw u ~ U[0,1) followed by an angle
/// draw ~ U[-pi,pi); the pair is on iff u < q. Both draws happen for every pair.
CircuitInstance sample_instance(int n_qubits, double q, std::uint64_t seed);

/// Builds an instance from explicit angles (tests, CLI). Validates.
CircuitInstance make_instance(std::vector<double> theta, std::vector<Coupling> phi,
                              double q = 0.0, std::uint64_t seed = 0);

/// Diagonal phase of basis state |y>.
double phase_function(const CircuitInstance& inst, std::uint64_t y, Family family);

struct Statevector {
  int n_qubits = 0;
  std::vector<std::complex<double>> amplitudes;
};

struct ProbDist {
  int n_qubits = 0;
  std::vector<double> probs;
};

/// psi(x) = 2^{-N} sum_y (-1)^{x.y} exp(i phase(y)), via one complex FWHT.
/// Throws ResourceError when N > max_qubits.
Statevector output_state(const CircuitInstance& inst, Family family,
                         int max_qubits = kDefaultMaxQubits);

/// |psi(x)|^2, divided by its computed sum.
ProbDist output_distribution(const Statevector& state);

/// Convenience: output_distribution(output_state(inst, family)).
ProbDist circuit_distribution(const CircuitInstance& inst, Family family,
                              int max_qubits = kDefaultMaxQubits);

/// out(x) = in(x) for even popcount(x), in(~x) otherwise. Requires even N.
/// Maps r (family F) to p (family D) and back; it is an involution.
ProbDist parity_permute(const ProbDist& dist);

/// q = 0 closed form: prod_k f_{x_k}(theta_k), f_0 = cos^2, f_1 = sin^2.
ProbDist analytic_product_distribution(const std::vector<double>& theta);

/// Throws InvalidInput unless the length is 2^n_qubits, entries are
/// non-negative and finite, and the total is 1 within tol.
void validate(const ProbDist& dist, double tol = 1e-10);

void to_json(nlohmann::json& j, const CircuitInstance& inst);
void from_json(const nlohmann::json& j, CircuitInstance& inst);

}  // namespace iqpx
