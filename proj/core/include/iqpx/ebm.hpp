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

// Energy-based model p_W(x) = exp(f_W(x)) / Z with a fully connected energy
// network, exact-enumeration sampling, and Adam / natural-gradient training.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json_fwd.hpp>

#include "iqpx/circuit.hpp"
#include "iqpx/rng.hpp"

namespace iqpx {

using BitString = std::uint64_t;

/// Fully connected network with tanh hidden layers and a scalar linear output.
/// Inputs are spins: bit b of x enters as 1 - 2 b.
///
/// Flat parameter layout, layer by layer: the out x in weight matrix in
/// row-major order, then the bias vector if the layer has one.
class MlpEnergyModel {
 public:
  /// dims = {N, hidden..., 1}; has_bias has one entry per weight layer.
  /// Parameters start at zero.
  MlpEnergyModel(std::vector<int> dims, std::vector<bool> has_bias);

  /// [N, alpha N, alpha N, 1]; biases on the first two layers only.
  static MlpEnergyModel adam_profile(int n_qubits, int alpha);
  /// [N, 10 N, 1]; bias on the first layer only.
  static MlpEnergyModel ngd_profile(int n_qubits);

  int n_inputs() const noexcept { return dims_.front(); }
  const std::vector<int>& dims() const noexcept { return dims_; }
  const std::vector<bool>& has_bias() const noexcept { return has_bias_; }
  std::size_t param_count() const noexcept { return static_cast<std::size_t>(params_.size()); }

  const Eigen::VectorXd& params() const noexcept { return params_; }
  Eigen::VectorXd& params() noexcept { return params_; }

  /// Uniform on [-1/sqrt(fan_in), 1/sqrt(fan_in)] for every weight and bias.
  void initialize(std::uint64_t seed);

  double energy(BitString x) const;
  /// f_W for each x, evaluated in one batch.
  Eigen::VectorXd energies(std::span<const BitString> xs) const;

  /// sum_b weights[b] * grad_W f_W(xs[b]).
  Eigen::VectorXd weighted_gradient(std::span<const BitString> xs,
                                    std::span<const double> weights) const;

  /// Row b is grad_W f_W(xs[b]).
  Eigen::MatrixXd per_sample_gradients(std::span<const BitString> xs) const;

  /// Same architecture and bit-identical parameters.
  friend bool operator==(const MlpEnergyModel& a, const MlpEnergyModel& b);

 private:
  struct Layer {
    int in = 0;
    int out = 0;
    Eigen::Index weight_offset = 0;
    Eigen::Index bias_offset = -1;  // -1 when the layer has no bias
  };

  struct Activations;
  Activations forward(std::span<const BitString> xs) const;

  std::vector<int> dims_;
  std::vector<bool> has_bias_;
  std::vector<Layer> layers_;
  Eigen::VectorXd params_;
};

enum class OptimizerKind { Adam, Ngd };

OptimizerKind parse_optimizer(std::string_view name);
std::string_view to_string(OptimizerKind kind) noexcept;

struct TrainConfig {
  OptimizerKind optimizer = OptimizerKind::Adam;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  int batch = 1024;
  int epochs = 1000;
  // Tikhonov term for NGD; negative selects 1e-3 * trace(F_t) / dim.
  double damping = -1.0;
  double adam_epsilon = 1e-8;
  std::uint64_t seed = 0;
  // Stop once KL(target || p_W) falls below this value; 0 disables.
  double stop_kl = 0.0;

  /// Throws InvalidInput on out-of-range fields.
  void validate() const;
};

void to_json(nlohmann::json& j, const TrainConfig& cfg);
void from_json(const nlohmann::json& j, TrainConfig& cfg);

/// Softmax of all 2^N energies with max-subtraction. Energies are evaluated
/// in chunks; throws ResourceError above max_qubits.
ProbDist model_distribution(const MlpEnergyModel& model, int max_qubits = kDefaultMaxQubits);

/// Inverse-CDF draws. The seeded overload constructs Rng(seed).
std::vector<BitString> exact_sample(const ProbDist& dist, std::size_t count, std::uint64_t seed);
std::vector<BitString> exact_sample(const ProbDist& dist, std::size_t count, Rng& rng);

/// <grad f>_target - <grad f>_model: the negative gradient of the cross
/// entropy -sum p log p_W, estimated from samples.
Eigen::VectorXd ce_gradient(const MlpEnergyModel& model, std::span<const BitString> target_samples,
                            std::span<const BitString> model_samples);

/// Same quantity with exact expectations: sum_x (p(x) - p_W(x)) grad f(x).
Eigen::VectorXd exact_ce_gradient(const MlpEnergyModel& model, const ProbDist& target);

/// Cross entropy -sum_x p(x) log p_W(x) by full enumeration.
double cross_entropy(const MlpEnergyModel& model, const ProbDist& target);

/// Covariance of per-sample gradients of f_W over the samples (1/S
/// normalization). Symmetric positive semidefinite up to rounding.
Eigen::MatrixXd fisher_matrix(const MlpEnergyModel& model, std::span<const BitString> samples);

struct AdamState {
  Eigen::VectorXd m;
  Eigen::VectorXd v;
  long step = 0;

  explicit AdamState(Eigen::Index dim = 0)
      : m(Eigen::VectorXd::Zero(dim)), v(Eigen::VectorXd::Zero(dim)) {}
};

/// One bias-corrected Adam update of params along the loss gradient grad.
void adam_step(Eigen::VectorXd& params, AdamState& state, const Eigen::VectorXd& grad,
               const TrainConfig& cfg);

struct NgdState {
  Eigen::MatrixXd fisher;    // exponential moving average F_t
  Eigen::VectorXd gradient;  // exponential moving average g_t
  long step = 0;
  double last_damping = 0.0;

  explicit NgdState(Eigen::Index dim = 0)
      : fisher(Eigen::MatrixXd::Zero(dim, dim)), gradient(Eigen::VectorXd::Zero(dim)) {}
};

/// F_t = b2 F_{t-1} + (1-b2) F, g_t = b1 g_{t-1} + (1-b1) g, then
/// params -= lr * (F^_t + damping I)^{-1} g^_t with the bias-corrected
/// averages F^_t = F_t / (1 - b2^t), g^_t = g_t / (1 - b1^t). Negative
/// cfg.damping selects 1e-3 trace(F^_t) / dim. Throws NumericalError when the
/// damped system cannot be solved.
void ngd_step(Eigen::VectorXd& params, NgdState& state, const Eigen::MatrixXd& fisher,
              const Eigen::VectorXd& grad, const TrainConfig& cfg);

struct TraceRecord {
  int epoch = 0;
  double kl_forward = 0.0;  // KL(target || p_W)
  double kl_reverse = 0.0;  // KL(p_W || target)
  double grad_norm = 0.0;
  double wall_ms = 0.0;
};

struct TrainResult {
  MlpEnergyModel model;
  std::vector<TraceRecord> trace;
  double final_kl_forward = 0.0;
  double final_kl_reverse = 0.0;
  bool aborted = false;
  std::string message;
};

/// Per epoch: refresh p_W exactly, record the KLs, draw `batch` samples from
/// the target and from p_W, and apply one optimizer step. Non-finite values
/// stop training with aborted = true and the trace so far.
TrainResult train(const ProbDist& target, const TrainConfig& cfg, MlpEnergyModel model);

nlohmann::json to_json(const TraceRecord& rec);
/// One JSON object per line: {epoch, kl_forward, kl_reverse, grad_norm, wall_ms}.
void write_trace_jsonl(std::ostream& out, std::span<const TraceRecord> trace);
void write_trace_jsonl(const std::filesystem::path& path, std::span<const TraceRecord> trace);

// Checkpoint: magic "IQPXMODL", u32 version, u32 L, u32 dims[L+1],
// u8 has_bias[L], u64 P, then P little-endian doubles.
void write_checkpoint(const std::filesystem::path& path, const MlpEnergyModel& model);
MlpEnergyModel read_checkpoint(const std::filesystem::path& path);

}  // namespace iqpx
