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

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <sstream>

#include <nlohmann/json.hpp>

#include "iqpx/diagnostics.hpp"
#include "iqpx/errors.hpp"
#include "iqpx/hamiltonian.hpp"
#include "oracles.hpp"

namespace iqpx {
namespace {

double max_rel_error(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return (a - b).cwiseAbs().maxCoeff() / std::max(b.cwiseAbs().maxCoeff(), 1e-300);
}

ProbDist random_target(int n, std::uint64_t seed) {
  auto v = oracle::random_vector(std::size_t{1} << n, seed, 0.05, 1.0);
  double total = 0.0;
  for (double e : v) total += e;
  for (auto& e : v) e /= total;
  return {n, v};
}

MlpEnergyModel linear_model(const std::vector<double>& w) {
  MlpEnergyModel m({static_cast<int>(w.size()), 1}, {false});
  for (std::size_t i = 0; i < w.size(); ++i) m.params()[static_cast<Eigen::Index>(i)] = w[i];
  return m;
}

TEST(ParamCount, AdamProfile) {
  EXPECT_EQ(MlpEnergyModel::adam_profile(8, 30).param_count(), 60240u);
  EXPECT_EQ(MlpEnergyModel::adam_profile(20, 30).param_count(), 373800u);
  for (int n : {4, 8, 12}) {
    const std::size_t m = 30 * n;
    EXPECT_EQ(MlpEnergyModel::adam_profile(n, 30).param_count(), n * m + m + m * m + m + m);
  }
}

TEST(ParamCount, NgdProfileAndSmallNetwork) {
  EXPECT_EQ(MlpEnergyModel::ngd_profile(8).param_count(), 800u);
  EXPECT_EQ(MlpEnergyModel({2, 3, 3, 1}, {true, true, false}).param_count(), 24u);
  EXPECT_EQ(MlpEnergyModel({2, 3, 1}, {true, false}).param_count(), 2u * 3 + 3 + 3);
}

TEST(Model, RejectsBadShapes) {
  EXPECT_THROW(MlpEnergyModel({4}, {}), InvalidInput);
  EXPECT_THROW(MlpEnergyModel({4, 2}, {false}), InvalidInput);
  EXPECT_THROW(MlpEnergyModel({4, 3, 1}, {true}), InvalidInput);
  EXPECT_THROW(MlpEnergyModel({4, 0, 1}, {true, false}), InvalidInput);
  EXPECT_THROW(MlpEnergyModel::adam_profile(4, 0), InvalidInput);
}

TEST(Model, InitializationIsSeededAndBounded) {
  auto a = MlpEnergyModel::adam_profile(4, 3);
  auto b = a;
  a.initialize(9);
  b.initialize(9);
  EXPECT_EQ(a, b);
  b.initialize(10);
  EXPECT_FALSE(a == b);
  EXPECT_LE(a.params().cwiseAbs().maxCoeff(), 0.5);  // 1/sqrt(4) on the first layer
}

TEST(Energy, ZeroModelIsZero) {
  const auto m = MlpEnergyModel::adam_profile(4, 2);
  for (BitString x = 0; x < 16; ++x) EXPECT_EQ(m.energy(x), 0.0);
}

TEST(Energy, LinearModelIsSpinSum) {
  const std::vector<double> w{0.3, -0.7, 1.1};
  const auto m = linear_model(w);
  for (BitString x = 0; x < 8; ++x) {
    double expect = 0.0;
    for (int i = 0; i < 3; ++i) expect += w[i] * (((x >> i) & 1) ? -1.0 : 1.0);
    EXPECT_NEAR(m.energy(x), expect, 1e-15);
  }
}

TEST(Energy, MatchesLoopOracle) {
  auto m = MlpEnergyModel::adam_profile(5, 3);
  m.initialize(4);
  std::vector<BitString> all(32);
  for (BitString x = 0; x < 32; ++x) all[x] = x;
  const auto batch = m.energies(all);
  for (BitString x = 0; x < 32; ++x) {
    EXPECT_NEAR(m.energy(x), oracle::loop_energy(m, x), 1e-12);
    EXPECT_NEAR(batch[static_cast<Eigen::Index>(x)], oracle::loop_energy(m, x), 1e-12);
  }
}

TEST(Gradients, PerSampleMatchesFiniteDifferences) {
  auto m = MlpEnergyModel::adam_profile(3, 2);
  m.initialize(17);
  const std::vector<BitString> xs{0, 5, 6};
  const auto grads = m.per_sample_gradients(xs);
  for (std::size_t b = 0; b < xs.size(); ++b) {
    const Eigen::VectorXd fd = oracle::fd_energy_gradient(m, xs[b], 1e-6);
    EXPECT_LT(max_rel_error(grads.row(static_cast<Eigen::Index>(b)).transpose(), fd), 1e-7);
  }
  const std::vector<double> w{0.5, -1.0, 2.0};
  const Eigen::VectorXd weighted = m.weighted_gradient(xs, w);
  Eigen::VectorXd manual = Eigen::VectorXd::Zero(weighted.size());
  for (std::size_t b = 0; b < xs.size(); ++b) manual += w[b] * grads.row(static_cast<Eigen::Index>(b)).transpose();
  EXPECT_LT(max_rel_error(weighted, manual), 1e-12);
}

TEST(ModelDistribution, ZeroModelIsUniform) {
  const auto d = model_distribution(MlpEnergyModel::ngd_profile(5));
  for (double p : d.probs) EXPECT_NEAR(p, 1.0 / 32, 1e-15);
}

TEST(ModelDistribution, LinearModelIsProductOfBernoullis) {
  const std::vector<double> w{0.4, -0.9, 0.2};
  const auto d = model_distribution(linear_model(w));
  for (BitString x = 0; x < 8; ++x) {
    double expect = 1.0;
    for (int i = 0; i < 3; ++i) {
      const double up = std::exp(w[i]), down = std::exp(-w[i]);
      expect *= (((x >> i) & 1) ? down : up) / (up + down);
    }
    EXPECT_NEAR(d.probs[x], expect, 1e-14);
  }
}

TEST(ModelDistribution, MatchesBruteForceNormalization) {
  auto m = MlpEnergyModel::adam_profile(6, 2);
  m.initialize(5);
  const auto d = model_distribution(m);
  double z = 0.0;
  std::vector<double> w(64);
  for (BitString x = 0; x < 64; ++x) z += (w[x] = std::exp(oracle::loop_energy(m, x)));
  double sum = 0.0;
  for (BitString x = 0; x < 64; ++x) {
    EXPECT_NEAR(d.probs[x], w[x] / z, 1e-13);
    sum += d.probs[x];
  }
  EXPECT_NEAR(sum, 1.0, 1e-12);
}

TEST(ModelDistribution, ShiftInvariance) {
  // A constant added through the output of a biased last layer.
  MlpEnergyModel m({4, 3, 1}, {true, true});
  m.initialize(8);
  const auto before = model_distribution(m);
  m.params()[static_cast<Eigen::Index>(m.param_count()) - 1] += 3.7;
  const auto after = model_distribution(m);
  for (std::size_t x = 0; x < 16; ++x) EXPECT_NEAR(before.probs[x], after.probs[x], 1e-14);
}

TEST(ModelDistribution, ResourceCap) {
  EXPECT_THROW(model_distribution(MlpEnergyModel({30, 1}, {false})), ResourceError);
}

TEST(ExactSample, PointMass) {
  ProbDist d{3, std::vector<double>(8, 0.0)};
  d.probs[5] = 1.0;
  for (BitString x : exact_sample(d, 1000, 3)) EXPECT_EQ(x, 5u);
}

TEST(ExactSample, UniformFrequencies) {
  const ProbDist d{2, {0.25, 0.25, 0.25, 0.25}};
  std::vector<double> freq(4, 0.0);
  const std::size_t draws = 100000;
  for (BitString x : exact_sample(d, draws, 11)) freq[x] += 1.0 / draws;
  for (double f : freq) EXPECT_NEAR(f, 0.25, 0.01);
}

TEST(ExactSample, EmpiricalDistanceAndDeterminism) {
  const auto d = random_target(4, 3);
  const std::size_t draws = 100000;
  const auto s = exact_sample(d, draws, 21);
  EXPECT_EQ(s, exact_sample(d, draws, 21));
  std::vector<double> freq(16, 0.0);
  for (BitString x : s) freq[x] += 1.0 / draws;
  double tv = 0.0;
  for (std::size_t x = 0; x < 16; ++x) tv += 0.5 * std::abs(freq[x] - d.probs[x]);
  EXPECT_LT(tv, 0.02);
}

TEST(CeGradient, IdenticalSamplesGiveZero) {
  auto m = MlpEnergyModel::adam_profile(3, 2);
  m.initialize(1);
  const std::vector<BitString> s{1, 2, 2, 7};
  EXPECT_EQ(ce_gradient(m, s, s).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_THROW(ce_gradient(m, s, std::vector<BitString>{}), InvalidInput);
}

TEST(CeGradient, ExactGradientMatchesFiniteDifferences) {
  // 2 qubits, 8 hidden units.
  MlpEnergyModel m({2, 8, 1}, {true, false});
  m.initialize(13);
  const auto target = random_target(2, 14);
  const Eigen::VectorXd loss_grad = -exact_ce_gradient(m, target);
  const Eigen::VectorXd fd = oracle::fd_cross_entropy_gradient(m, target.probs, 1e-5);
  EXPECT_LT(max_rel_error(loss_grad, fd), 1e-4);
  EXPECT_NEAR(cross_entropy(m, target), oracle::loop_cross_entropy(m, target.probs), 1e-12);
}

TEST(CeGradient, FullBatchSamplesReproduceExactGradient) {
  auto m = MlpEnergyModel::adam_profile(3, 3);
  m.initialize(2);
  const ProbDist target{3, {0.125, 0.125, 0.25, 0.0625, 0.0625, 0.125, 0.125, 0.125}};
  const ProbDist pw = model_distribution(m);
  // Sample lists whose empirical frequencies equal the distributions.
  const std::size_t s = 1024;
  std::vector<BitString> ts;
  for (BitString x = 0; x < 8; ++x) ts.insert(ts.end(), static_cast<std::size_t>(target.probs[x] * s), x);
  const Eigen::VectorXd sampled_target_part = ce_gradient(m, ts, ts);
  EXPECT_EQ(sampled_target_part.norm(), 0.0);
  std::vector<BitString> all(8);
  for (BitString x = 0; x < 8; ++x) all[x] = x;
  std::vector<double> w(8);
  for (BitString x = 0; x < 8; ++x) w[x] = target.probs[x] - pw.probs[x];
  EXPECT_LT(max_rel_error(m.weighted_gradient(all, w), exact_ce_gradient(m, target)), 1e-12);
}

TEST(CeGradient, LinearModelClosedForm) {
  const std::vector<double> w{0.2, -0.5};
  const auto m = linear_model(w);
  const ProbDist target{2, {0.1, 0.2, 0.3, 0.4}};
  const auto pw = model_distribution(m);
  const Eigen::VectorXd g = exact_ce_gradient(m, target);
  for (int i = 0; i < 2; ++i) {
    double spin_p = 0.0, spin_w = 0.0;
    for (BitString x = 0; x < 4; ++x) {
      const double z = ((x >> i) & 1) ? -1.0 : 1.0;
      spin_p += target.probs[x] * z;
      spin_w += pw.probs[x] * z;
    }
    EXPECT_NEAR(g[i], spin_p - spin_w, 1e-14);
  }
}

TEST(Fisher, IdenticalSamplesGiveZero) {
  auto m = MlpEnergyModel::adam_profile(3, 2);
  m.initialize(6);
  const std::vector<BitString> s(50, 3);
  EXPECT_EQ(fisher_matrix(m, s).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Fisher, MatchesTwoPassCovariance) {
  MlpEnergyModel m({3, 4, 1}, {true, false});
  m.initialize(30);
  const auto samples = exact_sample(model_distribution(m), 64, 5);
  std::vector<Eigen::VectorXd> rows;
  for (BitString x : samples) rows.push_back(oracle::fd_energy_gradient(m, x, 1e-6));
  // Analytic per-sample rows for the oracle; finite differences only confirm them.
  const Eigen::MatrixXd g = m.per_sample_gradients(samples);
  for (std::size_t b = 0; b < samples.size(); ++b) {
    EXPECT_LT(max_rel_error(g.row(static_cast<Eigen::Index>(b)).transpose(), rows[b]), 1e-7);
    rows[b] = g.row(static_cast<Eigen::Index>(b)).transpose();
  }
  const Eigen::MatrixXd expect = oracle::two_pass_covariance(rows);
  EXPECT_LT((fisher_matrix(m, samples) - expect).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Fisher, PositiveSemidefinite) {
  auto m = MlpEnergyModel::ngd_profile(4);
  m.initialize(12);
  const auto f = fisher_matrix(m, exact_sample(model_distribution(m), 256, 4));
  EXPECT_EQ((f - f.transpose()).cwiseAbs().maxCoeff(), 0.0);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(f);
  EXPECT_GE(es.eigenvalues().minCoeff(), -1e-10);
}

TEST(Adam, ZeroGradientLeavesParameters) {
  Eigen::VectorXd p = Eigen::VectorXd::LinSpaced(5, -1.0, 1.0);
  const Eigen::VectorXd before = p;
  AdamState st(5);
  adam_step(p, st, Eigen::VectorXd::Zero(5), TrainConfig{});
  EXPECT_EQ(p, before);
  EXPECT_EQ(st.step, 1);
}

TEST(Adam, FirstStepIsSignLike) {
  Eigen::VectorXd p = Eigen::VectorXd::Zero(3);
  AdamState st(3);
  Eigen::VectorXd g(3);
  g << 2.0, -0.5, 1e-3;
  TrainConfig cfg;
  adam_step(p, st, g, cfg);
  for (int i = 0; i < 3; ++i) {
    EXPECT_NEAR(p[i], -cfg.learning_rate * g[i] / (std::abs(g[i]) + cfg.adam_epsilon), 1e-15);
  }
}

TEST(Adam, QuadraticBowlDecreasesMonotonically) {
  Eigen::VectorXd p(2);
  p << 1.0, -2.0;
  const Eigen::Vector2d curvature(1.0, 3.0);
  auto loss = [&](const Eigen::VectorXd& x) { return 0.5 * (curvature.array() * x.array().square()).sum(); };
  AdamState st(2);
  TrainConfig cfg;
  double prev = loss(p);
  for (int t = 0; t < 100; ++t) {
    const Eigen::VectorXd g = curvature.array() * p.array();
    adam_step(p, st, g, cfg);
    const double now = loss(p);
    EXPECT_LT(now, prev);
    prev = now;
  }
}

TEST(Ngd, IdentityFisherIsPlainGradientStep) {
  TrainConfig cfg;
  cfg.beta1 = 0.0;
  cfg.beta2 = 0.0;
  cfg.damping = 0.0;
  cfg.learning_rate = 0.1;
  Eigen::VectorXd p = Eigen::VectorXd::Zero(3);
  NgdState st(3);
  const Eigen::Vector3d g(1.0, -2.0, 0.5);
  ngd_step(p, st, Eigen::MatrixXd::Identity(3, 3), g, cfg);
  EXPECT_LT((p + 0.1 * g).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Ngd, NewtonStepOnQuadratic) {
  // L(w) = 1/2 (w - w*)^T A (w - w*): with F = A one step at lr 1 lands on w*.
  Eigen::Matrix2d a;
  a << 3.0, 1.0, 1.0, 2.0;
  const Eigen::Vector2d target(0.7, -1.3);
  Eigen::VectorXd w = Eigen::Vector2d(-2.0, 4.0);
  TrainConfig cfg;
  cfg.beta1 = cfg.beta2 = 0.0;
  cfg.damping = 0.0;
  cfg.learning_rate = 1.0;
  NgdState st(2);
  const Eigen::VectorXd g = a * (w - target);
  ngd_step(w, st, a, g, cfg);
  EXPECT_LT((w - target).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Ngd, MovingAverages) {
  TrainConfig cfg;
  cfg.damping = 0.0;
  Eigen::VectorXd p = Eigen::VectorXd::Zero(1);
  NgdState st(1);
  ngd_step(p, st, Eigen::MatrixXd::Constant(1, 1, 2.0), Eigen::VectorXd::Constant(1, 4.0), cfg);
  EXPECT_NEAR(st.fisher(0, 0), (1 - cfg.beta2) * 2.0, 1e-15);
  EXPECT_NEAR(st.gradient[0], (1 - cfg.beta1) * 4.0, 1e-15);
}

TEST(Ngd, LargeDampingShrinksStep) {
  TrainConfig cfg;
  cfg.beta1 = cfg.beta2 = 0.0;
  cfg.learning_rate = 1.0;
  const Eigen::Vector2d g(1.0, -1.0);
  Eigen::Matrix2d f;
  f << 2.0, 0.5, 0.5, 1.0;
  for (double damping : {1e3, 1e6, 1e9}) {
    cfg.damping = damping;
    Eigen::VectorXd p = Eigen::VectorXd::Zero(2);
    NgdState st(2);
    ngd_step(p, st, f, g, cfg);
    // damping * (F + damping I)^{-1} g = g - F g / damping + O(damping^-2)
    EXPECT_LT((-p * damping - g).norm(), 5.0 * g.norm() / damping);
    EXPECT_LT(p.norm(), 2.0 * g.norm() / damping);
  }
}

TEST(Ngd, SingularSystemReported) {
  TrainConfig cfg;
  cfg.damping = 0.0;
  Eigen::VectorXd p = Eigen::VectorXd::Zero(2);
  NgdState st(2);
  try {
    ngd_step(p, st, Eigen::MatrixXd::Zero(2, 2), Eigen::VectorXd::Ones(2), cfg);
    FAIL() << "expected NumericalError";
  } catch (const NumericalError& e) {
    EXPECT_NE(std::string(e.what()).find("condition"), std::string::npos);
  }
}

TEST(TrainConfig, ValidationAndJson) {
  TrainConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.learning_rate = 0.0;
  EXPECT_THROW(cfg.validate(), InvalidInput);
  cfg = TrainConfig{};
  cfg.beta2 = 1.0;
  EXPECT_THROW(cfg.validate(), InvalidInput);
  cfg = TrainConfig{};
  cfg.batch = 0;
  EXPECT_THROW(cfg.validate(), InvalidInput);

  cfg = TrainConfig{};
  cfg.optimizer = OptimizerKind::Ngd;
  cfg.seed = 99;
  cfg.epochs = 17;
  const nlohmann::json j = cfg;
  const auto back = j.get<TrainConfig>();
  EXPECT_EQ(back.optimizer, OptimizerKind::Ngd);
  EXPECT_EQ(back.seed, 99u);
  EXPECT_EQ(back.epochs, 17);
  EXPECT_EQ(parse_optimizer("adam"), OptimizerKind::Adam);
  EXPECT_THROW(parse_optimizer("sgd"), InvalidInput);
}

TEST(Train, SelfTargetStaysConverged) {
  auto m = MlpEnergyModel::adam_profile(6, 2);
  m.initialize(3);
  const auto target = model_distribution(m);
  TrainConfig cfg;
  cfg.epochs = 100;
  cfg.seed = 4;
  const auto r = train(target, cfg, m);
  ASSERT_EQ(r.trace.size(), 100u);
  for (const auto& rec : r.trace) EXPECT_LT(rec.kl_forward, 1e-3);
  EXPECT_LT(r.final_kl_forward, 1e-3);
  EXPECT_FALSE(r.aborted);
}

TEST(Train, DeterministicTraces) {
  auto m = MlpEnergyModel::adam_profile(4, 3);
  m.initialize(1);
  const auto target = random_target(4, 8);
  TrainConfig cfg;
  cfg.epochs = 30;
  cfg.seed = 12;
  const auto a = train(target, cfg, m);
  const auto b = train(target, cfg, m);
  ASSERT_EQ(a.trace.size(), b.trace.size());
  for (std::size_t k = 0; k < a.trace.size(); ++k) {
    EXPECT_EQ(a.trace[k].kl_forward, b.trace[k].kl_forward);
    EXPECT_EQ(a.trace[k].kl_reverse, b.trace[k].kl_reverse);
    EXPECT_EQ(a.trace[k].grad_norm, b.trace[k].grad_norm);
  }
  EXPECT_EQ(a.model, b.model);
}

TEST(Train, ProductTargetLossTrendsDown) {
  const int n = 8;
  const auto target = circuit_distribution(sample_instance(n, 0.0, 31), Family::F);
  auto m = MlpEnergyModel::adam_profile(n, 30);
  m.initialize(32);
  TrainConfig cfg;
  cfg.epochs = 500;
  cfg.seed = 33;
  const auto r = train(target, cfg, m);
  ASSERT_FALSE(r.aborted) << r.message;
  const int window = 50;
  std::vector<double> means;
  for (std::size_t start = 0; start + window <= r.trace.size(); start += window) {
    double mean = 0.0;
    for (int k = 0; k < window; ++k) mean += r.trace[start + k].kl_forward / window;
    means.push_back(mean);
  }
  // Once converged the windows sit on the batch-sampling noise floor, so the
  // trend is judged by the least-squares slope rather than pairwise order.
  for (std::size_t w = 1; w < means.size(); ++w) {
    EXPECT_LT(means[w], means[0]);
    EXPECT_LT(means[w], 1e-2) << "window " << w;
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double k = static_cast<double>(means.size());
  for (std::size_t w = 0; w < means.size(); ++w) {
    sx += w;
    sy += means[w];
    sxx += double(w) * w;
    sxy += w * means[w];
  }
  EXPECT_LE((k * sxy - sx * sy) / (k * sxx - sx * sx), 0.0);
}

TEST(Train, NgdReducesKl) {
  const auto target = random_target(4, 40);
  auto m = MlpEnergyModel::ngd_profile(4);
  m.initialize(41);
  TrainConfig cfg;
  cfg.optimizer = OptimizerKind::Ngd;
  cfg.learning_rate = 0.05;
  cfg.epochs = 200;
  cfg.batch = 512;
  cfg.seed = 42;
  const auto r = train(target, cfg, m);
  ASSERT_FALSE(r.aborted) << r.message;
  EXPECT_LT(r.final_kl_forward, 0.5 * r.trace.front().kl_forward);
}

TEST(Train, StopKlEndsEarly) {
  auto m = MlpEnergyModel::adam_profile(3, 2);
  const ProbDist uniform{3, std::vector<double>(8, 0.125)};
  TrainConfig cfg;
  cfg.stop_kl = 1e-6;
  const auto r = train(uniform, cfg, m);
  EXPECT_EQ(r.trace.size(), 1u);
}

TEST(Train, RejectsMismatchedTarget) {
  EXPECT_THROW(train(random_target(3, 1), TrainConfig{}, MlpEnergyModel::ngd_profile(4)),
               InvalidInput);
}

TEST(TraceIo, JsonLinesFormat) {
  const std::vector<TraceRecord> trace{{0, 0.5, 0.25, 1.0, 2.0}, {1, 0.4, 0.2, 0.5, 1.5}};
  std::ostringstream out;
  write_trace_jsonl(out, trace);
  std::istringstream in(out.str());
  std::string line;
  int count = 0;
  while (std::getline(in, line)) {
    const auto j = nlohmann::json::parse(line);
    for (const char* key : {"epoch", "kl_forward", "kl_reverse", "grad_norm", "wall_ms"}) {
      EXPECT_TRUE(j.contains(key)) << key;
    }
    EXPECT_EQ(j.at("epoch").get<int>(), count);
    ++count;
  }
  EXPECT_EQ(count, 2);
}

TEST(Checkpoint, RoundTrip) {
  auto m = MlpEnergyModel::adam_profile(4, 2);
  m.initialize(77);
  const auto path = std::filesystem::temp_directory_path() / "iqpx_ckpt_test.bin";
  write_checkpoint(path, m);
  EXPECT_EQ(read_checkpoint(path), m);
  std::filesystem::resize_file(path, std::filesystem::file_size(path) - 3);
  EXPECT_THROW(read_checkpoint(path), IoError);
  std::filesystem::remove(path);
}

}  // namespace
}  // namespace iqpx
