/*
 * Copyright 2026 The SenseCrypt Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "sensecrypt/mask_opt.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include <gtest/gtest.h>

namespace sensecrypt {
namespace {

// Plug-in MI from an explicit joint histogram, independent of the solver's
// per-bin bookkeeping.
double HistogramMi(const std::vector<double>& w, const std::vector<double>& x,
                   int bins) {
  double lo = 0.0, hi = 0.0;
  for (double v : w) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  auto bin = [&](double v) {
    if (!(hi > lo)) return 0;
    int b = static_cast<int>(std::floor((v - lo) / (hi - lo) * bins));
    return std::clamp(b, 0, bins - 1);
  };
  std::map<std::pair<int, int>, double> joint;
  std::map<int, double> pw, px;
  const double n = static_cast<double>(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    const int a = bin(w[i]);
    const int b = bin(x[i]);
    joint[{a, b}] += 1.0 / n;
    pw[a] += 1.0 / n;
    px[b] += 1.0 / n;
  }
  double mi = 0.0;
  for (const auto& [k, p] : joint) mi += p * std::log2(p / (pw[k.first] * px[k.second]));
  return mi;
}

EncryptionMask FromBits(std::vector<std::uint8_t> bits) {
  EncryptionMask m;
  m.bits = std::move(bits);
  return m;
}

TEST(MaskOpt, SecurityThresholdPresets) {
  EXPECT_NEAR(SecurityThreshold(1.0, SecurityParams::CifarPreset()), 0.9323, 1e-4);
  EXPECT_NEAR(SecurityThreshold(1.0, SecurityParams::FmnistPreset()), 0.8093, 1e-4);
  const auto p = SecurityParams::FmnistPreset();
  EXPECT_DOUBLE_EQ(SecurityThreshold(0.4, p), 1.0 - 0.7 * std::exp(-1.3 * 0.4));
}

TEST(MaskOpt, SecurityThresholdIncreasesWithBudget) {
  const auto p = SecurityParams::FmnistPreset();
  double prev = SecurityThreshold(0.01, p);
  for (double a = 0.02; a <= 1.0; a += 0.01) {
    const double t = SecurityThreshold(a, p);
    EXPECT_GT(t, prev);
    prev = t;
  }
}

TEST(MaskOpt, BudgetCapFloors) {
  EXPECT_EQ(BudgetCap(0.3, 10), 3u);
  EXPECT_EQ(BudgetCap(0.7, 10), 7u);
  EXPECT_EQ(BudgetCap(1.0, 7), 7u);
  EXPECT_EQ(BudgetCap(0.29, 10), 2u);
  EXPECT_EQ(BudgetCap(1.0 / 3.0, 3), 1u);
}

TEST(MaskOpt, MutualInformationHandValues) {
  // Four bins over [0, 3.5]; each weight occupies its own bin.
  const std::vector<double> w = {0.5, 1.5, 2.5, 3.5};
  EXPECT_NEAR(MaskMutualInformation(w, EncryptionMask(4), {4}), 2.0, 1e-12);
  // Masking the second weight merges it into the zero bin.
  EXPECT_NEAR(MaskMutualInformation(w, FromBits({0, 1, 0, 0}), {4}), 1.5, 1e-12);
  EXPECT_NEAR(MaskMutualInformation(w, FromBits({1, 1, 1, 1}), {4}), 0.0, 1e-12);
}

TEST(MaskOpt, MutualInformationMatchesHistogramOracle) {
  std::mt19937_64 gen(11);
  std::normal_distribution<double> z;
  std::bernoulli_distribution coin(0.4);
  for (int t = 0; t < 30; ++t) {
    std::vector<double> w(200), x(200);
    EncryptionMask mask(200);
    for (std::size_t i = 0; i < w.size(); ++i) {
      w[i] = z(gen) + (t % 3 == 0 ? 2.0 : 0.0);
      mask.bits[i] = coin(gen);
      x[i] = mask[i] ? 0.0 : w[i];
    }
    const int bins = 8 + t;
    EXPECT_NEAR(MaskMutualInformation(w, mask, {bins}), HistogramMi(w, x, bins), 1e-9);
    EXPECT_NEAR(MutualInformation(w, x, {bins}), HistogramMi(w, x, bins), 1e-9);
  }
}

TEST(MaskOpt, NoMaskGivesEntropyAllMaskGivesZero) {
  std::mt19937_64 gen(2);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> w(500);
  for (auto& v : w) v = u(gen);
  EncryptionMask none(w.size()), all(w.size());
  std::fill(all.bits.begin(), all.bits.end(), 1);
  EXPECT_NEAR(MaskMutualInformation(w, none), HistogramMi(w, w, 64), 1e-9);
  EXPECT_NEAR(MaskMutualInformation(w, all), 0.0, 1e-12);
}

TEST(MaskOpt, CoverageAndObjective) {
  const std::vector<double> g = {4.0, 3.0, 2.0, 1.0};
  const auto m = FromBits({1, 0, 1, 0});
  EXPECT_DOUBLE_EQ(Coverage(g, m), 0.6);
  SecurityParams p;
  p.beta1 = 2.0;
  p.beta2 = 1.0;
  EXPECT_DOUBLE_EQ(ScalarizedObjective(g, m, p), 2.0 * 0.5 - 0.6);
}

TEST(MaskOpt, UnconstrainedSelectsAboveMeanItems) {
  std::mt19937_64 gen(4);
  std::exponential_distribution<double> e(1.0);
  SecurityParams p;
  p.C = 1.0;
  p.B = 1e-6;
  p.eta_mi = 1e9;
  for (int t = 0; t < 20; ++t) {
    std::vector<double> g(40), w(40);
    for (auto& v : g) v = e(gen);
    for (auto& v : w) v = e(gen) - 0.5;
    double total = 0.0;
    for (double v : g) total += v;
    const auto s = SolveMask(g, 1.0, p, w);
    ASSERT_TRUE(s.feasible());
    for (std::size_t k = 0; k < g.size(); ++k) {
      EXPECT_EQ(s.mask[k], g[k] / total > 1.0 / g.size()) << k;
    }
  }
}

struct Instance {
  std::vector<double> gamma, w;
  double alpha;
  SecurityParams params;
  int bins;
};

Instance RandomInstance(std::mt19937_64& gen, std::size_t n) {
  std::exponential_distribution<double> e(1.0);
  std::normal_distribution<double> z;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Instance in;
  in.gamma.resize(n);
  in.w.resize(n);
  for (auto& v : in.gamma) v = e(gen);
  for (auto& v : in.w) v = z(gen);
  in.alpha = 0.2 + 0.8 * u(gen);
  in.params.B = 0.5 + 2.0 * u(gen);
  in.params.C = 0.1 + 0.8 * u(gen);
  in.params.eta_mi = 0.3 + 2.5 * u(gen);
  in.bins = 4 + static_cast<int>(u(gen) * 6);
  return in;
}

TEST(MaskOpt, SolverMatchesBruteForce) {
  std::mt19937_64 gen(2026);
  for (int t = 0; t < 80; ++t) {
    const auto in = RandomInstance(gen, 4 + t % 11);
    const MIEstimatorConfig cfg{in.bins};
    const auto exact = BruteForceMask(in.gamma, in.alpha, in.params, in.w, cfg);
    const auto fast = SolveMask(in.gamma, in.alpha, in.params, in.w, cfg);
    ASSERT_EQ(exact.feasible(), fast.feasible()) << t;
    if (!exact.feasible()) {
      EXPECT_EQ(exact.status, fast.status) << t;
      continue;
    }
    EXPECT_EQ(fast.status, SolveStatus::kOptimal) << t;
    EXPECT_EQ(exact.mask, fast.mask) << t;
    EXPECT_NEAR(exact.objective, fast.objective, 1e-12) << t;
  }
}

TEST(MaskOpt, FeasibleSolutionsSatisfyConstraints) {
  std::mt19937_64 gen(77);
  for (int t = 0; t < 60; ++t) {
    const auto in = RandomInstance(gen, 30 + t);
    const MIEstimatorConfig cfg{in.bins};
    const auto s = SolveMask(in.gamma, in.alpha, in.params, in.w, cfg);
    if (!s.feasible()) continue;
    EXPECT_LE(s.mask.Popcount(), BudgetCap(in.alpha, in.gamma.size()));
    EXPECT_GE(Coverage(in.gamma, s.mask), SecurityThreshold(in.alpha, in.params) - 1e-12);
    EXPECT_LE(MaskMutualInformation(in.w, s.mask, cfg), in.params.eta_mi + 1e-12);
    EXPECT_DOUBLE_EQ(s.coverage, Coverage(in.gamma, s.mask));
    EXPECT_DOUBLE_EQ(s.objective, ScalarizedObjective(in.gamma, s.mask, in.params));
  }
}

TEST(MaskOpt, SolverIsScaleInvariantInGamma) {
  std::mt19937_64 gen(8);
  for (int t = 0; t < 20; ++t) {
    auto in = RandomInstance(gen, 50);
    const MIEstimatorConfig cfg{in.bins};
    const auto base = SolveMask(in.gamma, in.alpha, in.params, in.w, cfg);
    for (auto& g : in.gamma) g *= 64.0;
    const auto scaled = SolveMask(in.gamma, in.alpha, in.params, in.w, cfg);
    EXPECT_EQ(base.status, scaled.status);
    EXPECT_EQ(base.mask, scaled.mask);
  }
}

TEST(MaskOpt, InfeasibleStatuses) {
  const std::vector<double> g = {5.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0};
  const std::vector<double> w = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
  SecurityParams p;
  // Cap 1 protects at most 5/14 of the sensitivity.
  const auto sec = SolveMask(g, 0.1, p, w);
  EXPECT_EQ(sec.status, SolveStatus::kInfeasibleSecurity);
  EXPECT_FALSE(sec.feasible());
  EXPECT_EQ(BruteForceMask(g, 0.1, p, w).status, SolveStatus::kInfeasibleSecurity);

  // Full budget meets the threshold but zero leakage needs every bit.
  p.eta_mi = 0.0;
  const auto mi = SolveMask(g, 0.9, p, w);
  EXPECT_EQ(mi.status, SolveStatus::kInfeasibleMutualInformation);
  EXPECT_EQ(BruteForceMask(g, 0.9, p, w).status, SolveStatus::kInfeasibleMutualInformation);
}

TEST(MaskOpt, InvalidArgumentsThrow) {
  const std::vector<double> g = {1.0, 2.0};
  const std::vector<double> w = {1.0, 2.0};
  SecurityParams p;
  EXPECT_THROW(SolveMask(g, 0.0, p, w), std::invalid_argument);
  EXPECT_THROW(SolveMask(g, 1.5, p, w), std::invalid_argument);
  EXPECT_THROW(SolveMask(g, 0.5, p, std::vector<double>{1.0}), std::invalid_argument);
  EXPECT_THROW(SolveMask(std::vector<double>{0.0, 0.0}, 0.5, p, w), std::invalid_argument);
  EXPECT_THROW(SolveMask(std::vector<double>{-1.0, 1.0}, 0.5, p, w), std::invalid_argument);
  p.C = 1.5;
  EXPECT_THROW(SolveMask(g, 0.5, p, w), std::invalid_argument);
  std::vector<double> big(25, 1.0);
  EXPECT_THROW(BruteForceMask(big, 0.5, SecurityParams{}, big), std::invalid_argument);
}

TEST(MaskOpt, PreferenceOrder) {
  const auto a = FromBits({1, 0, 0});
  const auto b = FromBits({0, 1, 0});
  const auto ab = FromBits({1, 1, 0});
  EXPECT_TRUE(MaskPreferred(-0.5, ab, -0.4, a));
  EXPECT_TRUE(MaskPreferred(-0.5, a, -0.5 + 1e-13, ab));
  EXPECT_TRUE(MaskPreferred(-0.5, a, -0.5, b));
  EXPECT_FALSE(MaskPreferred(-0.5, b, -0.5, a));
  EXPECT_FALSE(MaskPreferred(-0.5, a, -0.5, a));
}

TEST(MaskOpt, StrategyMasks) {
  const std::vector<double> g = {0.5, 3.0, 1.0, 2.0, 0.1};
  const auto high = StrategyMask(g, 0.4, Strategy::kHigh, 0);
  EXPECT_EQ(high, FromBits({0, 1, 0, 1, 0}));
  const auto low = StrategyMask(g, 0.4, Strategy::kLow, 0);
  EXPECT_EQ(low, FromBits({1, 0, 0, 0, 1}));
  const auto rnd = StrategyMask(g, 0.6, Strategy::kRandom, 5);
  EXPECT_EQ(rnd.Popcount(), 3u);
  EXPECT_EQ(rnd, StrategyMask(g, 0.6, Strategy::kRandom, 5));
  EXPECT_EQ(StrategyMask(g, 0.0, Strategy::kHigh, 0).Popcount(), 0u);
  EXPECT_EQ(StrategyMask(g, 1.0, Strategy::kRandom, 1).Popcount(), 5u);
  EXPECT_THROW(StrategyMask(g, 1.1, Strategy::kHigh, 0), std::invalid_argument);
  EXPECT_EQ(ParseStrategy("high"), Strategy::kHigh);
  EXPECT_EQ(ToString(ParseStrategy("random")), "random");
  EXPECT_THROW(ParseStrategy("middle"), std::invalid_argument);
}

TEST(MaskOpt, DescendingOrderBreaksTiesByIndex) {
  const std::vector<double> g = {1.0, 2.0, 1.0, 2.0};
  EXPECT_EQ(DescendingOrder(g), (std::vector<std::size_t>{1, 3, 0, 2}));
  EXPECT_EQ(TopMask(g, 3), FromBits({1, 1, 0, 1}));
}

TEST(MaskOpt, RunLengthSerialization) {
  const auto m = FromBits({1, 1, 0, 0, 0, 1});
  const Bytes b = m.Serialize();
  // u64 length, u32 run count, runs {0, 2, 3, 1}.
  ASSERT_EQ(b.size(), 8u + 4u + 4u * 4u);
  EXPECT_EQ(b[7], 6);
  EXPECT_EQ(b[11], 4);
  EXPECT_EQ(b[15], 0);
  EXPECT_EQ(b[19], 2);
  EXPECT_EQ(EncryptionMask::Deserialize(b), m);

  std::mt19937_64 gen(6);
  std::bernoulli_distribution coin(0.3);
  for (int t = 0; t < 20; ++t) {
    EncryptionMask r(static_cast<std::size_t>(t * 37));
    for (auto& bit : r.bits) bit = coin(gen);
    EXPECT_EQ(EncryptionMask::Deserialize(r.Serialize()), r);
  }
  Bytes cut(b.begin(), b.end() - 2);
  EXPECT_THROW(EncryptionMask::Deserialize(cut), DecodeError);
}

}  // namespace
}  // namespace sensecrypt
