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

#include "iqpx/ebm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <ostream>
#include <fstream>

#include <nlohmann/json.hpp>

#include "iqpx/diagnostics.hpp"
#include "iqpx/errors.hpp"
#include "iqpx/io.hpp"

namespace iqpx {
namespace {

using RowMajorMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

constexpr Magic kCheckpointMagic{'I', 'Q', 'P', 'X', 'M', 'O', 'D', 'L'};
constexpr std::uint32_t kCheckpointVersion = 1;
constexpr std::size_t kEnergyChunk = 4096;

// Unique sample indices with their empirical weights.
struct WeightedSamples {
  std::vector<BitString> xs;
  std::vector<double> weights;
};

WeightedSamples tally(std::span<const BitString> samples) {
  std::map<BitString, std::size_t> counts;
  for (BitString x : samples) ++counts[x];
  WeightedSamples out;
  const double total = static_cast<double>(samples.size());
  for (const auto& [x, c] : counts) {
    out.xs.push_back(x);
    out.weights.push_back(static_cast<double>(c) / total);
  }
  return out;
}

double kl_or_infinity(const ProbDist& p, const ProbDist& q) {
  try {
    return kl_divergence(p, q);
  } catch (const DomainError&) {
    return std::numeric_limits<double>::infinity();
  }
}

}  // namespace

struct MlpEnergyModel::Activations {
  // a[0] holds the spin inputs, a[l] the output of weight layer l-1.
  std::vector<Eigen::MatrixXd> a;
};

MlpEnergyModel::MlpEnergyModel(std::vector<int> dims, std::vector<bool> has_bias)
    : dims_(std::move(dims)), has_bias_(std::move(has_bias)) {
  if (dims_.size() < 2 || dims_.back() != 1) {
    throw InvalidInput("network dims must be {N, hidden..., 1}");
  }
  if (has_bias_.size() != dims_.size() - 1) {
    throw InvalidInput("has_bias needs one flag per weight layer");
  }
  if (dims_.front() < 1 || dims_.front() > 62) {
    throw InvalidInput("network input width must be in [1, 62]");
  }
  Eigen::Index offset = 0;
  for (std::size_t l = 0; l + 1 < dims_.size(); ++l) {
    if (dims_[l] < 1 || dims_[l + 1] < 1) throw InvalidInput("layer widths must be positive");
    Layer layer;
    layer.in = dims_[l];
    layer.out = dims_[l + 1];
    layer.weight_offset = offset;
    offset += Eigen::Index{layer.in} * layer.out;
    if (has_bias_[l]) {
      layer.bias_offset = offset;
      offset += layer.out;
    }
    layers_.push_back(layer);
  }
  params_ = Eigen::VectorXd::Zero(offset);
}

bool operator==(const MlpEnergyModel& a, const MlpEnergyModel& b) {
  return a.dims_ == b.dims_ && a.has_bias_ == b.has_bias_ && a.params_.size() == b.params_.size() &&
         a.params_ == b.params_;
}

MlpEnergyModel MlpEnergyModel::adam_profile(int n_qubits, int alpha) {
  if (n_qubits < 1 || alpha < 1) throw InvalidInput("adam profile needs N >= 1 and alpha >= 1");
  const int m = alpha * n_qubits;
  return MlpEnergyModel({n_qubits, m, m, 1}, {true, true, false});
}

MlpEnergyModel MlpEnergyModel::ngd_profile(int n_qubits) {
  if (n_qubits < 1) throw InvalidInput("ngd profile needs N >= 1");
  return MlpEnergyModel({n_qubits, 10 * n_qubits, 1}, {true, false});
}

void MlpEnergyModel::initialize(std::uint64_t seed) {
  Rng rng(seed);
  for (const Layer& layer : layers_) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(layer.in));
    const Eigen::Index n_weights = Eigen::Index{layer.in} * layer.out;
    for (Eigen::Index k = 0; k < n_weights; ++k) {
      params_[layer.weight_offset + k] = rng.uniform(-bound, bound);
    }
    if (layer.bias_offset >= 0) {
      for (int k = 0; k < layer.out; ++k) params_[layer.bias_offset + k] = rng.uniform(-bound, bound);
    }
  }
}

MlpEnergyModel::Activations MlpEnergyModel::forward(std::span<const BitString> xs) const {
  const auto batch = static_cast<Eigen::Index>(xs.size());
  const int n = n_inputs();
  Activations act;
  act.a.reserve(layers_.size() + 1);
  Eigen::MatrixXd input(batch, n);
  for (Eigen::Index b = 0; b < batch; ++b) {
    for (int i = 0; i < n; ++i) input(b, i) = ((xs[b] >> i) & 1) ? -1.0 : 1.0;
  }
  act.a.push_back(std::move(input));
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const Layer& layer = layers_[l];
    const Eigen::Map<const RowMajorMatrix> w(params_.data() + layer.weight_offset, layer.out,
                                             layer.in);
    Eigen::MatrixXd z = act.a.back() * w.transpose();
    if (layer.bias_offset >= 0) {
      z.rowwise() += params_.segment(layer.bias_offset, layer.out).transpose();
    }
    if (l + 1 < layers_.size()) z = z.array().tanh().matrix();
    act.a.push_back(std::move(z));
  }
  return act;
}

double MlpEnergyModel::energy(BitString x) const {
  const BitString xs[] = {x};
  return energies(xs)[0];
}

Eigen::VectorXd MlpEnergyModel::energies(std::span<const BitString> xs) const {
  return forward(xs).a.back().col(0);
}

Eigen::VectorXd MlpEnergyModel::weighted_gradient(std::span<const BitString> xs,
                                                  std::span<const double> weights) const {
  if (xs.size() != weights.size()) throw InvalidInput("weighted_gradient: size mismatch");
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(params_.size());
  if (xs.empty()) return grad;
  const Activations act = forward(xs);
  Eigen::MatrixXd delta =
      Eigen::Map<const Eigen::VectorXd>(weights.data(), static_cast<Eigen::Index>(weights.size()));
  for (std::size_t l = layers_.size(); l-- > 0;) {
    const Layer& layer = layers_[l];
    const Eigen::MatrixXd& input = act.a[l];
    Eigen::Map<RowMajorMatrix>(grad.data() + layer.weight_offset, layer.out, layer.in) =
        delta.transpose() * input;
    if (layer.bias_offset >= 0) {
      grad.segment(layer.bias_offset, layer.out) = delta.colwise().sum().transpose();
    }
    if (l > 0) {
      const Eigen::Map<const RowMajorMatrix> w(params_.data() + layer.weight_offset, layer.out,
                                               layer.in);
      delta = ((delta * w).array() * (1.0 - input.array().square())).matrix();
    }
  }
  return grad;
}

Eigen::MatrixXd MlpEnergyModel::per_sample_gradients(std::span<const BitString> xs) const {
  const auto batch = static_cast<Eigen::Index>(xs.size());
  Eigen::MatrixXd grads = Eigen::MatrixXd::Zero(batch, params_.size());
  if (batch == 0) return grads;
  const Activations act = forward(xs);
  Eigen::MatrixXd delta = Eigen::MatrixXd::Ones(batch, 1);
  for (std::size_t l = layers_.size(); l-- > 0;) {
    const Layer& layer = layers_[l];
    const Eigen::MatrixXd& input = act.a[l];
    for (Eigen::Index b = 0; b < batch; ++b) {
      for (int o = 0; o < layer.out; ++o) {
        grads.row(b).segment(layer.weight_offset + Eigen::Index{o} * layer.in, layer.in) =
            delta(b, o) * input.row(b);
      }
      if (layer.bias_offset >= 0) {
        grads.row(b).segment(layer.bias_offset, layer.out) = delta.row(b);
      }
    }
    if (l > 0) {
      const Eigen::Map<const RowMajorMatrix> w(params_.data() + layer.weight_offset, layer.out,
                                               layer.in);
      delta = ((delta * w).array() * (1.0 - input.array().square())).matrix();
    }
  }
  return grads;
}

OptimizerKind parse_optimizer(std::string_view name) {
  if (name == "adam") return OptimizerKind::Adam;
  if (name == "ngd") return OptimizerKind::Ngd;
  throw InvalidInput("unknown optimizer '" + std::string(name) + "' (expected adam or ngd)");
}

std::string_view to_string(OptimizerKind kind) noexcept {
  return kind == OptimizerKind::Adam ? "adam" : "ngd";
}

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0)) throw InvalidInput("learning_rate must be positive");
  if (!(beta1 >= 0.0 && beta1 < 1.0)) throw InvalidInput("beta1 must lie in [0, 1)");
  if (!(beta2 >= 0.0 && beta2 < 1.0)) throw InvalidInput("beta2 must lie in [0, 1)");
  if (batch < 1) throw InvalidInput("batch must be at least 1");
  if (epochs < 0) throw InvalidInput("epochs must be non-negative");
  if (!(adam_epsilon > 0.0)) throw InvalidInput("adam_epsilon must be positive");
  if (!(stop_kl >= 0.0)) throw InvalidInput("stop_kl must be non-negative");
  if (std::isnan(damping)) throw InvalidInput("damping must not be NaN");
}

void to_json(nlohmann::json& j, const TrainConfig& cfg) {
  j = nlohmann::json{{"optimizer", to_string(cfg.optimizer)},
                     {"learning_rate", cfg.learning_rate},
                     {"beta1", cfg.beta1},
                     {"beta2", cfg.beta2},
                     {"batch", cfg.batch},
                     {"epochs", cfg.epochs},
                     {"damping", cfg.damping},
                     {"adam_epsilon", cfg.adam_epsilon},
                     {"seed", cfg.seed},
                     {"stop_kl", cfg.stop_kl}};
}

void from_json(const nlohmann::json& j, TrainConfig& cfg) {
  TrainConfig d;
  try {
    cfg.optimizer = parse_optimizer(j.value("optimizer", std::string(to_string(d.optimizer))));
    cfg.learning_rate = j.value("learning_rate", d.learning_rate);
    cfg.beta1 = j.value("beta1", d.beta1);
    cfg.beta2 = j.value("beta2", d.beta2);
    cfg.batch = j.value("batch", d.batch);
    cfg.epochs = j.value("epochs", d.epochs);
    cfg.damping = j.value("damping", d.damping);
    cfg.adam_epsilon = j.value("adam_epsilon", d.adam_epsilon);
    cfg.seed = j.value("seed", d.seed);
    cfg.stop_kl = j.value("stop_kl", d.stop_kl);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("malformed training config: ") + e.what());
  }
  cfg.validate();
}

ProbDist model_distribution(const MlpEnergyModel& model, int max_qubits) {
  const int n = model.n_inputs();
  if (n > max_qubits) {
    throw ResourceError("enumerating 2^" + std::to_string(n) + " states exceeds the cap of " +
                        std::to_string(max_qubits) + " qubits");
  }
  const std::size_t dim = std::size_t{1} << n;
  ProbDist dist{n, std::vector<double>(dim)};
  std::vector<BitString> chunk;
  for (std::size_t start = 0; start < dim; start += kEnergyChunk) {
    const std::size_t stop = std::min(dim, start + kEnergyChunk);
    chunk.resize(stop - start);
    for (std::size_t k = 0; k < chunk.size(); ++k) chunk[k] = start + k;
    const Eigen::VectorXd f = model.energies(chunk);
    for (std::size_t k = 0; k < chunk.size(); ++k) dist.probs[start + k] = f[static_cast<Eigen::Index>(k)];
  }
  const double top = *std::max_element(dist.probs.begin(), dist.probs.end());
  double total = 0.0;
  for (auto& p : dist.probs) {
    p = std::exp(p - top);
    total += p;
  }
  for (auto& p : dist.probs) p /= total;
  return dist;
}

std::vector<BitString> exact_sample(const ProbDist& dist, std::size_t count, Rng& rng) {
  if (dist.probs.empty()) throw InvalidInput("exact_sample: empty distribution");
  std::vector<double> cdf(dist.probs.size());
  double running = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t x = 0; x < dist.probs.size(); ++x) {
    running += dist.probs[x];
    cdf[x] = running;
    if (dist.probs[x] > 0.0) last_positive = x;
  }
  if (!(running > 0.0)) throw InvalidInput("exact_sample: distribution has no mass");
  std::vector<BitString> out(count);
  for (auto& s : out) {
    const double u = rng.uniform01() * running;
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    const auto idx = static_cast<std::size_t>(it - cdf.begin());
    s = std::min(idx, last_positive);
  }
  return out;
}

std::vector<BitString> exact_sample(const ProbDist& dist, std::size_t count, std::uint64_t seed) {
  Rng rng(seed);
  return exact_sample(dist, count, rng);
}

Eigen::VectorXd ce_gradient(const MlpEnergyModel& model, std::span<const BitString> target_samples,
                            std::span<const BitString> model_samples) {
  if (target_samples.empty() || model_samples.empty()) {
    throw InvalidInput("ce_gradient needs non-empty sample lists");
  }
  std::map<BitString, std::pair<std::size_t, std::size_t>> counts;
  for (BitString x : target_samples) ++counts[x].first;
  for (BitString x : model_samples) ++counts[x].second;
  const double nt = static_cast<double>(target_samples.size());
  const double nm = static_cast<double>(model_samples.size());
  std::vector<BitString> xs;
  std::vector<double> weights;
  for (const auto& [x, c] : counts) {
    const double w = static_cast<double>(c.first) / nt - static_cast<double>(c.second) / nm;
    if (w != 0.0) {
      xs.push_back(x);
      weights.push_back(w);
    }
  }
  return model.weighted_gradient(xs, weights);
}

Eigen::VectorXd exact_ce_gradient(const MlpEnergyModel& model, const ProbDist& target) {
  if (target.n_qubits != model.n_inputs()) {
    throw InvalidInput("target and model disagree on the number of bits");
  }
  const ProbDist pw = model_distribution(model);
  std::vector<BitString> xs(target.probs.size());
  std::vector<double> weights(target.probs.size());
  for (std::size_t x = 0; x < xs.size(); ++x) {
    xs[x] = x;
    weights[x] = target.probs[x] - pw.probs[x];
  }
  return model.weighted_gradient(xs, weights);
}

double cross_entropy(const MlpEnergyModel& model, const ProbDist& target) {
  if (target.n_qubits != model.n_inputs()) {
    throw InvalidInput("target and model disagree on the number of bits");
  }
  const ProbDist pw = model_distribution(model);
  double ce = 0.0;
  for (std::size_t x = 0; x < pw.probs.size(); ++x) {
    if (target.probs[x] > 0.0) ce -= target.probs[x] * std::log(pw.probs[x]);
  }
  return ce;
}

Eigen::MatrixXd fisher_matrix(const MlpEnergyModel& model, std::span<const BitString> samples) {
  if (samples.empty()) throw InvalidInput("fisher_matrix needs at least one sample");
  const WeightedSamples ws = tally(samples);
  const Eigen::MatrixXd g = model.per_sample_gradients(ws.xs);
  const Eigen::Map<const Eigen::VectorXd> w(ws.weights.data(),
                                            static_cast<Eigen::Index>(ws.weights.size()));
  const Eigen::RowVectorXd mean = w.transpose() * g;
  const Eigen::MatrixXd centered = g.rowwise() - mean;
  Eigen::MatrixXd fisher = centered.transpose() * w.asDiagonal() * centered;
  return 0.5 * (fisher + fisher.transpose());
}

void adam_step(Eigen::VectorXd& params, AdamState& state, const Eigen::VectorXd& grad,
               const TrainConfig& cfg) {
  if (state.m.size() != params.size() || grad.size() != params.size()) {
    throw InvalidInput("adam_step: dimension mismatch");
  }
  ++state.step;
  state.m = cfg.beta1 * state.m + (1.0 - cfg.beta1) * grad;
  state.v = cfg.beta2 * state.v + (1.0 - cfg.beta2) * grad.cwiseProduct(grad);
  const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));
  params.array() -= cfg.learning_rate * (state.m.array() / c1) /
                    ((state.v.array() / c2).sqrt() + cfg.adam_epsilon);
}

void ngd_step(Eigen::VectorXd& params, NgdState& state, const Eigen::MatrixXd& fisher,
              const Eigen::VectorXd& grad, const TrainConfig& cfg) {
  const Eigen::Index dim = params.size();
  if (fisher.rows() != dim || fisher.cols() != dim || grad.size() != dim ||
      state.gradient.size() != dim) {
    throw InvalidInput("ngd_step: dimension mismatch");
  }
  ++state.step;
  state.fisher = cfg.beta2 * state.fisher + (1.0 - cfg.beta2) * fisher;
  state.gradient = cfg.beta1 * state.gradient + (1.0 - cfg.beta1) * grad;

  const double fisher_correction = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));
  const double gradient_correction = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
  Eigen::MatrixXd system = state.fisher / fisher_correction;
  const double damping =
      cfg.damping >= 0.0 ? cfg.damping : 1e-3 * system.trace() / static_cast<double>(dim);
  state.last_damping = damping;
  system.diagonal().array() += damping;
  const Eigen::LDLT<Eigen::MatrixXd> ldlt(system);
  const double rcond = ldlt.info() == Eigen::Success ? ldlt.rcond() : 0.0;
  if (!(rcond > 1e-15)) {
    throw NumericalError("natural-gradient system is singular after damping " +
                         std::to_string(damping) + " (reciprocal condition estimate " +
                         std::to_string(rcond) + ")");
  }
  const Eigen::VectorXd direction = ldlt.solve(state.gradient / gradient_correction);
  if (!direction.allFinite()) {
    throw NumericalError("natural-gradient solve produced non-finite values (reciprocal "
                         "condition estimate " + std::to_string(rcond) + ")");
  }
  params -= cfg.learning_rate * direction;
}

TrainResult train(const ProbDist& target, const TrainConfig& cfg, MlpEnergyModel model) {
  cfg.validate();
  if (target.n_qubits != model.n_inputs()) {
    throw InvalidInput("target has " + std::to_string(target.n_qubits) + " bits, model expects " +
                       std::to_string(model.n_inputs()));
  }
  validate(target);
  using Clock = std::chrono::steady_clock;

  TrainResult result{std::move(model), {}, 0.0, 0.0, false, {}};
  MlpEnergyModel& m = result.model;
  const auto dim = static_cast<Eigen::Index>(m.param_count());
  AdamState adam(cfg.optimizer == OptimizerKind::Adam ? dim : 0);
  NgdState ngd(cfg.optimizer == OptimizerKind::Ngd ? dim : 0);
  Rng rng(cfg.seed);
  const auto batch = static_cast<std::size_t>(cfg.batch);

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const auto start = Clock::now();
    const ProbDist pw = model_distribution(m);
    TraceRecord rec;
    rec.epoch = epoch;
    rec.kl_forward = kl_or_infinity(target, pw);
    rec.kl_reverse = kl_or_infinity(pw, target);
    if (cfg.stop_kl > 0.0 && rec.kl_forward < cfg.stop_kl) {
      rec.wall_ms = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
      result.trace.push_back(rec);
      break;
    }

    const auto target_samples = exact_sample(target, batch, rng);
    const auto model_samples = exact_sample(pw, batch, rng);
    const Eigen::VectorXd grad = -ce_gradient(m, target_samples, model_samples);
    rec.grad_norm = grad.norm();
    try {
      if (cfg.optimizer == OptimizerKind::Adam) {
        adam_step(m.params(), adam, grad, cfg);
      } else {
        ngd_step(m.params(), ngd, fisher_matrix(m, model_samples), grad, cfg);
      }
    } catch (const NumericalError& e) {
      result.trace.push_back(rec);
      result.aborted = true;
      result.message = "epoch " + std::to_string(epoch) + ": " + e.what();
      break;
    }
    rec.wall_ms = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
    result.trace.push_back(rec);

    if (!std::isfinite(rec.kl_forward) || !std::isfinite(rec.grad_norm) || !m.params().allFinite()) {
      result.aborted = true;
      result.message = "non-finite loss or parameters at epoch " + std::to_string(epoch);
      break;
    }
  }

  const ProbDist pw = model_distribution(m);
  result.final_kl_forward = kl_or_infinity(target, pw);
  result.final_kl_reverse = kl_or_infinity(pw, target);
  return result;
}

nlohmann::json to_json(const TraceRecord& rec) {
  auto num = [](double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(); };
  return {{"epoch", rec.epoch},
          {"kl_forward", num(rec.kl_forward)},
          {"kl_reverse", num(rec.kl_reverse)},
          {"grad_norm", num(rec.grad_norm)},
          {"wall_ms", rec.wall_ms}};
}

void write_trace_jsonl(std::ostream& out, std::span<const TraceRecord> trace) {
  for (const auto& rec : trace) out << to_json(rec).dump() << '\n';
}

void write_trace_jsonl(const std::filesystem::path& path, std::span<const TraceRecord> trace) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  write_trace_jsonl(out, trace);
  if (!out) throw IoError("write failed on '" + path.string() + "'");
}

void write_checkpoint(const std::filesystem::path& path, const MlpEnergyModel& model) {
  BinaryWriter w(path);
  w.magic(kCheckpointMagic);
  w.u32(kCheckpointVersion);
  const auto n_layers = static_cast<std::uint32_t>(model.has_bias().size());
  w.u32(n_layers);
  for (int d : model.dims()) w.u32(static_cast<std::uint32_t>(d));
  for (bool b : model.has_bias()) w.u8(b ? 1 : 0);
  w.u64(model.param_count());
  w.f64s(std::span<const double>(model.params().data(), model.param_count()));
  w.close();
}

MlpEnergyModel read_checkpoint(const std::filesystem::path& path) {
  BinaryReader r(path);
  r.expect_magic(kCheckpointMagic);
  if (const auto version = r.u32(); version != kCheckpointVersion) {
    throw IoError("'" + path.string() + "' has unsupported version " + std::to_string(version));
  }
  const std::uint32_t n_layers = r.u32();
  if (n_layers < 1 || n_layers > 64) throw IoError("'" + path.string() + "' has bad layer count");
  std::vector<int> dims(n_layers + 1);
  for (auto& d : dims) d = static_cast<int>(r.u32());
  std::vector<bool> bias(n_layers);
  for (std::size_t l = 0; l < bias.size(); ++l) bias[l] = r.u8() != 0;
  MlpEnergyModel model(std::move(dims), std::move(bias));
  if (r.u64() != model.param_count()) {
    throw IoError("'" + path.string() + "' parameter count does not match its layer layout");
  }
  const auto values = r.f64s(model.param_count());
  r.expect_end();
  model.params() = Eigen::Map<const Eigen::VectorXd>(values.data(),
                                                     static_cast<Eigen::Index>(values.size()));
  return model;
}

}  // namespace iqpx
