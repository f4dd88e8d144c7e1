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

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <nlohmann/json.hpp>

#include "iqpx/errors.hpp"
#include "oracles.hpp"

namespace iqpx {
namespace {

constexpr double kPi = std::numbers::pi;

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

TEST(SampleInstance, QZeroHasNoCouplings) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    EXPECT_TRUE(sample_instance(8, 0.0, seed).phi.empty());
  }
}

TEST(SampleInstance, QOneHasAllPairs) {
  const auto inst = sample_instance(4, 1.0, 3);
  ASSERT_EQ(inst.phi.size(), 6u);
  int k = 0;
  for (int i = 0; i < 4; ++i) {
    for (int j = i + 1; j < 4; ++j, ++k) {
      EXPECT_EQ(inst.phi[k].i, i);
      EXPECT_EQ(inst.phi[k].j, j);
    }
  }
}

TEST(SampleInstance, GatingFractionAtHalf) {
  std::size_t present = 0;
  const int seeds = 10000;
  for (int s = 0; s < seeds; ++s) present += sample_instance(8, 0.5, s).phi.size();
  const double fraction = static_cast<double>(present) / (28.0 * seeds);
  EXPECT_NEAR(fraction, 0.5, 0.02);
}

TEST(SampleInstance, AnglesInRangeAndDeterministic) {
  const auto a = sample_instance(10, 0.3, 77);
  const auto b = sample_instance(10, 0.3, 77);
  EXPECT_EQ(a, b);
  EXPECT_NE(a, sample_instance(10, 0.3, 78));
  for (double t : a.theta) {
    EXPECT_GE(t, -kPi);
    EXPECT_LE(t, kPi);
  }
  for (const auto& c : a.phi) {
    EXPECT_LT(c.i, c.j);
    EXPECT_GE(c.value, -kPi);
    EXPECT_LE(c.value, kPi);
  }
}

TEST(SampleInstance, ThetaSharedAcrossGateDensity) {
  EXPECT_EQ(sample_instance(8, 0.0, 5).theta, sample_instance(8, 1.0, 5).theta);
}

TEST(SampleInstance, CouplingValuesSharedAcrossGateDensity) {
  const auto low = sample_instance(8, 0.3, 9);
  const auto high = sample_instance(8, 1.0, 9);
  for (const auto& c : low.phi) EXPECT_EQ(high.coupling(c.i, c.j), c.value);
}

TEST(SampleInstance, RejectsBadArguments) {
  EXPECT_THROW(sample_instance(3, 0.5, 0), InvalidInput);
  EXPECT_THROW(sample_instance(0, 0.5, 0), InvalidInput);
  EXPECT_THROW(sample_instance(28, 0.5, 0), InvalidInput);
  EXPECT_THROW(sample_instance(4, -0.1, 0), InvalidInput);
  EXPECT_THROW(sample_instance(4, 1.5, 0), InvalidInput);
}

TEST(MakeInstance, ValidatesAndFlagsDegenerateAngles) {
  EXPECT_TRUE(make_instance({0.3, kPi / 2}, {}).degenerate_angles);
  EXPECT_TRUE(make_instance({0.0, 0.2}, {}).degenerate_angles);
  EXPECT_FALSE(make_instance({0.3, 0.2}, {}).degenerate_angles);
  EXPECT_THROW(make_instance({0.1, 0.2, 0.3}, {}), InvalidInput);
  EXPECT_THROW(make_instance({4.0, 0.2}, {}), InvalidInput);
  EXPECT_THROW(make_instance({0.1, 0.2}, {{1, 1, 0.1}}), InvalidInput);
  EXPECT_THROW(make_instance({0.1, 0.2}, {{0, 1, 5.0}}), InvalidInput);
}

TEST(PhaseFunction, ZeroAnglesGiveZero) {
  const auto inst = make_instance(std::vector<double>(4, 0.0), {});
  for (std::uint64_t y = 0; y < 16; ++y) {
    EXPECT_EQ(phase_function(inst, y, Family::F), 0.0);
    EXPECT_EQ(phase_function(inst, y, Family::D), 0.0);
  }
}

TEST(PhaseFunction, TwoQubitExamples) {
  const double a = 0.3, b = -1.1;
  const auto inst = make_instance({a, b}, {});
  EXPECT_DOUBLE_EQ(phase_function(inst, 0b01, Family::F), -a + b);
  EXPECT_DOUBLE_EQ(phase_function(inst, 0b01, Family::D), a - b);
  EXPECT_DOUBLE_EQ(phase_function(inst, 0b11, Family::D), phase_function(inst, 0b11, Family::F));
}

TEST(PhaseFunction, CouplingTerm) {
  const auto inst = make_instance({0.0, 0.0, 0.0, 0.0}, {{1, 3, 0.7}});
  EXPECT_DOUBLE_EQ(phase_function(inst, 0b0000, Family::F), 0.7);
  EXPECT_DOUBLE_EQ(phase_function(inst, 0b0010, Family::F), -0.7);
  EXPECT_DOUBLE_EQ(phase_function(inst, 0b1010, Family::F), 0.7);
}

TEST(OutputState, ZeroAnglesGiveDeltaAtZero) {
  for (int n : {2, 4, 8}) {
    const auto psi = output_state(make_instance(std::vector<double>(n, 0.0), {}), Family::F);
    EXPECT_NEAR(std::abs(psi.amplitudes[0]), 1.0, 1e-14);
    for (std::size_t x = 1; x < psi.amplitudes.size(); ++x) {
      EXPECT_LT(std::abs(psi.amplitudes[x]), 1e-14);
    }
  }
}

TEST(OutputState, MatchesDenseOracle) {
  for (int n : {2, 4, 6}) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const auto inst = sample_instance(n, 0.6, 1000 + seed);
      for (Family fam : {Family::D, Family::F}) {
        const auto fast = output_state(inst, fam).amplitudes;
        const auto dense = oracle::dense_output_state(inst, fam);
        for (std::size_t x = 0; x < fast.size(); ++x) {
          EXPECT_LT(std::abs(fast[x] - dense[x]), 1e-10) << "n=" << n << " x=" << x;
        }
      }
    }
  }
}

TEST(OutputState, NormalizedForRandomInstances) {
  for (int n : {4, 8, 12}) {
    const auto psi = output_state(sample_instance(n, 0.5, n), Family::D);
    double norm = 0.0;
    for (const auto& a : psi.amplitudes) norm += std::norm(a);
    EXPECT_NEAR(norm, 1.0, 1e-10);
  }
}

TEST(OutputState, ResourceCap) {
  const auto inst = sample_instance(12, 0.0, 1);
  EXPECT_THROW(output_state(inst, Family::F, 10), ResourceError);
}

TEST(OutputDistribution, DeltaAndUniformStates) {
  Statevector delta{3, std::vector<std::complex<double>>(8, 0.0)};
  delta.amplitudes[0] = 1.0;
  const auto p = output_distribution(delta);
  EXPECT_EQ(p.probs[0], 1.0);
  Statevector flat{3, std::vector<std::complex<double>>(8, std::sqrt(1.0 / 8))};
  for (double v : output_distribution(flat).probs) EXPECT_NEAR(v, 0.125, 1e-15);
}

TEST(OutputDistribution, MatchesDenseOracleProbabilities) {
  const auto inst = sample_instance(4, 0.7, 21);
  const auto p = circuit_distribution(inst, Family::D);
  EXPECT_LT(max_abs_diff(p.probs, oracle::dense_output_probs(inst, Family::D)), 1e-10);
}

TEST(ParityPermute, UniformIsFixed) {
  ProbDist u{4, std::vector<double>(16, 1.0 / 16)};
  EXPECT_EQ(parity_permute(u).probs, u.probs);
}

TEST(ParityPermute, Involution) {
  const auto d = circuit_distribution(sample_instance(6, 0.4, 8), Family::F);
  EXPECT_EQ(parity_permute(parity_permute(d)).probs, d.probs);
}

TEST(ParityPermute, OddQubitCountRejected) {
  ProbDist d{3, std::vector<double>(8, 0.125)};
  EXPECT_THROW(parity_permute(d), InvalidInput);
}

TEST(ParityPermute, MapsFamilyFToFamilyDAgainstDenseOracle) {
  for (int n : {4, 6}) {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      const auto inst = sample_instance(n, 0.5, 5000 + seed);
      const auto r = circuit_distribution(inst, Family::F);
      const auto p_dense = oracle::dense_output_probs(inst, Family::D);
      EXPECT_LT(max_abs_diff(parity_permute(r).probs, p_dense), 1e-10);
    }
  }
}

class FamilyEquivalence : public ::testing::TestWithParam<int> {};

TEST_P(FamilyEquivalence, PipelinesAgree) {
  const int n = GetParam();
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto inst = sample_instance(n, 0.3 + 0.07 * seed, 900 + seed);
    const auto p = circuit_distribution(inst, Family::D);
    const auto r = circuit_distribution(inst, Family::F);
    EXPECT_LT(max_abs_diff(p.probs, parity_permute(r).probs), 1e-10);
  }
}

INSTANTIATE_TEST_SUITE_P(EvenN, FamilyEquivalence, ::testing::Values(2, 4, 6, 8, 10));

TEST(AnalyticProduct, Examples) {
  for (double v : analytic_product_distribution(std::vector<double>(5, kPi / 4)).probs) {
    EXPECT_NEAR(v, 1.0 / 32, 1e-15);
  }
  const auto point = analytic_product_distribution(std::vector<double>(3, 0.0));
  EXPECT_EQ(point.probs[0], 1.0);
  for (std::size_t x = 1; x < 8; ++x) EXPECT_EQ(point.probs[x], 0.0);
}

TEST(AnalyticProduct, MatchesPipelineAtQZero) {
  for (int n : {4, 6}) {
    const auto inst = sample_instance(n, 0.0, 40 + n);
    const auto r = circuit_distribution(inst, Family::F);
    const auto a = analytic_product_distribution(inst.theta);
    double tv = 0.0;
    for (std::size_t x = 0; x < a.probs.size(); ++x) tv += std::abs(a.probs[x] - r.probs[x]);
    EXPECT_LT(0.5 * tv, 1e-10);
  }
}

TEST(AnalyticProduct, FactorizesPerQubit) {
  const std::vector<double> theta{0.4, -1.2, 2.5};
  const auto a = analytic_product_distribution(theta);
  for (std::uint64_t x = 0; x < 8; ++x) {
    double expect = 1.0;
    for (int k = 0; k < 3; ++k) {
      const double c = std::cos(theta[k]);
      expect *= ((x >> k) & 1) ? 1.0 - c * c : c * c;
    }
    EXPECT_NEAR(a.probs[x], expect, 1e-15);
  }
}

TEST(ProbDistInvariants, NormalizedAndStrictlyPositive) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto inst = sample_instance(10, 0.2, seed);
    ASSERT_FALSE(inst.degenerate_angles);
    for (Family fam : {Family::D, Family::F}) {
      const auto p = circuit_distribution(inst, fam);
      EXPECT_NO_THROW(validate(p));
      double sum = 0.0, lo = 1.0;
      for (double v : p.probs) {
        sum += v;
        lo = std::min(lo, v);
      }
      EXPECT_NEAR(sum, 1.0, 1e-10);
      EXPECT_GT(lo, 0.0);
    }
  }
}

TEST(ProbDistInvariants, ValidateRejectsBadInput) {
  EXPECT_THROW(validate(ProbDist{2, {0.5, 0.5, 0.1, -0.1}}), InvalidInput);
  EXPECT_THROW(validate(ProbDist{2, {0.5, 0.5}}), InvalidInput);
  EXPECT_THROW(validate(ProbDist{1, {0.5, 0.6}}), InvalidInput);
}

TEST(CircuitJson, RoundTrip) {
  const auto inst = sample_instance(6, 0.5, 12);
  const nlohmann::json j = inst;
  EXPECT_EQ(j.at("phi").size(), inst.phi.size());
  EXPECT_EQ(j.get<CircuitInstance>(), inst);
}

TEST(CircuitJson, ParsesCanonicalForm) {
  const auto j = nlohmann::json::parse(
      R"({"n_qubits":2,"q":1.0,"seed":4,"theta":[0.1,0.2],"phi":[[0,1,0.5]]})");
  const auto inst = j.get<CircuitInstance>();
  EXPECT_EQ(inst.coupling(0, 1), 0.5);
  EXPECT_EQ(inst.coupling(1, 0), 0.5);
  EXPECT_EQ(inst.seed, 4u);
}

TEST(FamilyNames, RoundTrip) {
  EXPECT_EQ(parse_family("D"), Family::D);
  EXPECT_EQ(parse_family(to_string(Family::F)), Family::F);
  EXPECT_THROW(parse_family("X"), InvalidInput);
}

}  // namespace
}  // namespace iqpx
