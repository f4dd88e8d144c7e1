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

#include "iqpx/circuit.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <string>

#include <nlohmann/json.hpp>

#include "iqpx/errors.hpp"
#include "iqpx/fwht.hpp"
#include "iqpx/rng.hpp"

namespace iqpx {
namespace {

constexpr double kPi = std::numbers::pi;

bool is_degenerate_angle(double t) noexcept {
  return t == 0.0 || std::abs(t) == kPi / 2 || std::abs(t) == kPi;
}

void check_qubits(int n_qubits) {
  if (n_qubits < 2 || n_qubits > kHardMaxQubits || n_qubits % 2 != 0) {
    throw InvalidInput("n_qubits must be even and in [2, " +
                       std::to_string(kHardMaxQubits) + "], got " +
                       std::to_string(n_qubits));
  }
}

void check_angle(double a, const char* what) {
  if (!std::isfinite(a) || a < -kPi || a > kPi) {
    throw InvalidInput(std::string(what) + " angle " + std::to_string(a) +
                       " outside [-pi, pi]");
  }
}

}  // namespace

Family parse_family(std::string_view name) {
  if (name == "D" || name == "d") return Family::D;
  if (name == "F" || name == "f") return Family::F;
  throw InvalidInput("unknown circuit family '" + std::string(name) + "' (expected D or F)");
}

std::string_view to_string(Family family) noexcept {
  return family == Family::D ? "D" : "F";
}

double CircuitInstance::coupling(int i, int j) const noexcept {
  if (i > j) std::swap(i, j);
  auto it = std::lower_bound(phi.begin(), phi.end(), std::pair{i, j},
                             [](const Coupling& c, const std::pair<int, int>& key) {
                               return std::pair{c.i, c.j} < key;
                             });
  if (it != phi.end() && it->i == i && it->j == j) return it->value;
  return 0.0;
}

void validate(CircuitInstance& inst) {
  check_qubits(inst.n_qubits);
  if (!(inst.q >= 0.0 && inst.q <= 1.0)) {
    throw InvalidInput("gate density q must lie in [0, 1], got " + std::to_string(inst.q));
  }
  if (static_cast<int>(inst.theta.size()) != inst.n_qubits) {
    throw InvalidInput("theta has " + std::to_string(inst.theta.size()) +
                       " entries, expected " + std::to_string(inst.n_qubits));
  }
  inst.degenerate_angles = false;
  for (double t : inst.theta) {
    check_angle(t, "theta");
    inst.degenerate_angles = inst.degenerate_angles || is_degenerate_angle(t);
  }
  for (std::size_t k = 0; k < inst.phi.size(); ++k) {
    const Coupling& c = inst.phi[k];
    if (c.i < 0 || c.j >= inst.n_qubits || c.i >= c.j) {
      throw InvalidInput("coupling key (" + std::to_string(c.i) + "," + std::to_string(c.j) +
                         ") must satisfy 0 <= i < j < N");
    }
    check_angle(c.value, "phi");
    if (k > 0 && !(std::pair{inst.phi[k - 1].i, inst.phi[k - 1].j} < std::pair{c.i, c.j})) {
      throw InvalidInput("couplings must be sorted and unique");
    }
  }
}

CircuitInstance sample_instance(int n_qubits, double q, std::uint64_t seed) {
  check_qubits(n_qubits);
  if (!(q >= 0.0 && q <= 1.0)) {
    throw InvalidInput("gate density q must lie in [0, 1], got " + std::to_string(q));
  }
  CircuitInstance inst;
  inst.n_qubits = n_qubits;
  inst.q = q;
  inst.seed = seed;
  Rng rng(seed);
  inst.theta.resize(n_qubits);
  for (auto& t : inst.theta) t = rng.uniform(-kPi, kPi);
  for (int i = 0; i < n_qubits; ++i) {
    for (int j = i + 1; j < n_qubits; ++j) {
      const double gate = rng.uniform01();
      const double angle = rng.uniform(-kPi, kPi);
      if (gate < q) inst.phi.push_back({i, j, angle});
    }
  }
  validate(inst);
  return inst;
}

CircuitInstance make_instance(std::vector<double> theta, std::vector<Coupling> phi, double q,
                              std::uint64_t seed) {
  CircuitInstance inst;
  inst.n_qubits = static_cast<int>(theta.size());
  inst.q = q;
  inst.seed = seed;
  inst.theta = std::move(theta);
  for (auto& c : phi) {
    if (c.i > c.j) std::swap(c.i, c.j);
  }
  std::sort(phi.begin(), phi.end(), [](const Coupling& a, const Coupling& b) {
    return std::pair{a.i, a.j} < std::pair{b.i, b.j};
  });
  inst.phi = std::move(phi);
  validate(inst);
  return inst;
}

double phase_function(const CircuitInstance& inst, std::uint64_t y, Family family) {
  const int n = inst.n_qubits;
  if (y >> n) {
    throw InvalidInput("basis index " + std::to_string(y) + " out of range for N=" +
                       std::to_string(n));
  }
  // zeta_i(y) = 1 - 2 y_i; family D multiplies the single-qubit term by the
  // total parity (-1)^{|y|}.
  const double parity_sign =
      (family == Family::D && (std::popcount(y) & 1)) ? -1.0 : 1.0;
  double single = 0.0;
  for (int i = 0; i < n; ++i) {
    single += ((y >> i) & 1) ? -inst.theta[i] : inst.theta[i];
  }
  double pair = 0.0;
  for (const auto& c : inst.phi) {
    pair += (((y >> c.i) ^ (y >> c.j)) & 1) ? -c.value : c.value;
  }
  return parity_sign * single + pair;
}

Statevector output_state(const CircuitInstance& inst, Family family, int max_qubits) {
  const int n = inst.n_qubits;
  if (n > max_qubits) {
    throw ResourceError("N=" + std::to_string(n) + " exceeds the configured cap of " +
                        std::to_string(max_qubits) + " qubits");
  }
  const std::size_t dim = std::size_t{1} << n;
  Statevector state;
  state.n_qubits = n;
  try {
    state.amplitudes.resize(dim);
  } catch (const std::bad_alloc&) {
    throw ResourceError("cannot allocate statevector of 2^" + std::to_string(n) + " amplitudes");
  }

  for (std::size_t y = 0; y < dim; ++y) {
    state.amplitudes[y] = std::polar(1.0, phase_function(inst, y, family));
  }
  fwht_inplace(std::span(state.amplitudes));
  const double scale = 1.0 / static_cast<double>(dim);
  for (auto& a : state.amplitudes) a *= scale;
  return state;
}

ProbDist output_distribution(const Statevector& state) {
  ProbDist dist;
  dist.n_qubits = state.n_qubits;
  dist.probs.resize(state.amplitudes.size());
  double total = 0.0;
  for (std::size_t x = 0; x < state.amplitudes.size(); ++x) {
    dist.probs[x] = std::norm(state.amplitudes[x]);
    total += dist.probs[x];
  }
  if (!(total > 0.0) || !std::isfinite(total)) {
    throw NumericalError("statevector has zero or non-finite norm");
  }
  for (auto& p : dist.probs) p /= total;
  return dist;
}

ProbDist circuit_distribution(const CircuitInstance& inst, Family family, int max_qubits) {
  return output_distribution(output_state(inst, family, max_qubits));
}

ProbDist parity_permute(const ProbDist& dist) {
  const int n = dist.n_qubits;
  if (n % 2 != 0) {
    throw InvalidInput("parity permutation requires an even qubit count, got " +
                       std::to_string(n));
  }
  if (dist.probs.size() != (std::size_t{1} << n)) {
    throw InvalidInput("distribution length does not match 2^N");
  }
  const std::uint64_t all = (std::uint64_t{1} << n) - 1;
  ProbDist out{n, std::vector<double>(dist.probs.size())};
  for (std::uint64_t x = 0; x < dist.probs.size(); ++x) {
    out.probs[x] = (std::popcount(x) & 1) ? dist.probs[x ^ all] : dist.probs[x];
  }
  return out;
}

ProbDist analytic_product_distribution(const std::vector<double>& theta) {
  const int n = static_cast<int>(theta.size());
  if (n < 1 || n > kHardMaxQubits) {
    throw InvalidInput("theta must have between 1 and " + std::to_string(kHardMaxQubits) +
                       " entries");
  }
  ProbDist dist{n, std::vector<double>(std::size_t{1} << n, 1.0)};
  // Build the product one qubit at a time: block doubling over bit k.
  dist.probs[0] = 1.0;
  for (int k = 0; k < n; ++k) {
    const double c2 = std::cos(theta[k]) * std::cos(theta[k]);
    const double s2 = std::sin(theta[k]) * std::sin(theta[k]);
    const std::size_t half = std::size_t{1} << k;
    for (std::size_t x = 0; x < half; ++x) {
      dist.probs[x + half] = dist.probs[x] * s2;
      dist.probs[x] *= c2;
    }
  }
  return dist;
}

void validate(const ProbDist& dist, double tol) {
  if (dist.n_qubits < 1 || dist.n_qubits > kHardMaxQubits ||
      dist.probs.size() != (std::size_t{1} << dist.n_qubits)) {
    throw InvalidInput("distribution length " + std::to_string(dist.probs.size()) +
                       " does not match 2^" + std::to_string(dist.n_qubits));
  }
  double total = 0.0;
  for (std::size_t x = 0; x < dist.probs.size(); ++x) {
    const double p = dist.probs[x];
    if (!(p >= 0.0) || !std::isfinite(p)) {
      throw InvalidInput("probability at index " + std::to_string(x) +
                         " is negative or non-finite");
    }
    total += p;
  }
  if (std::abs(total - 1.0) > tol) {
    throw InvalidInput("probabilities sum to " + std::to_string(total) + ", expected 1");
  }
}

void to_json(nlohmann::json& j, const CircuitInstance& inst) {
  nlohmann::json phi = nlohmann::json::array();
  for (const auto& c : inst.phi) phi.push_back({c.i, c.j, c.value});
  j = nlohmann::json{{"n_qubits", inst.n_qubits}, {"q", inst.q},       {"seed", inst.seed},
                     {"theta", inst.theta},       {"phi", std::move(phi)}};
  if (inst.degenerate_angles) j["degenerate_angles"] = true;
}

void from_json(const nlohmann::json& j, CircuitInstance& inst) {
  try {
    inst.n_qubits = j.at("n_qubits").get<int>();
    inst.q = j.at("q").get<double>();
    inst.seed = j.value("seed", std::uint64_t{0});
    inst.theta = j.at("theta").get<std::vector<double>>();
    inst.phi.clear();
    for (const auto& entry : j.at("phi")) {
      if (!entry.is_array() || entry.size() != 3) {
        throw InvalidInput("phi entries must be [i, j, value] triples");
      }
      inst.phi.push_back({entry[0].get<int>(), entry[1].get<int>(), entry[2].get<double>()});
    }
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("malformed instance JSON: ") + e.what());
  }
  validate(inst);
}

}  // namespace iqpx
