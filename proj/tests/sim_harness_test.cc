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

#include "sensecrypt/sim_harness.h"

#include <cmath>

#include <gtest/gtest.h>

#include "json.hpp"

namespace sensecrypt {
namespace {

ScenarioConfig Scenario(MaskPolicy method, TopologyMode topology = TopologyMode::kDualServer) {
  ScenarioConfig cfg;
  cfg.name = "unit";
  cfg.seed = 3;
  cfg.iterations = 2;
  cfg.method = method;
  cfg.data.class_count = 4;
  cfg.data.per_class = 40;
  cfg.data.dim = 4;
  cfg.partition.clients = 4;
  for (int i = 0; i < 4; ++i) cfg.profiles.push_back({i, 40.0, 16.0 / (i + 1), 0});
  cfg.federation.topology = topology;
  cfg.federation.key_bits = 128;
  cfg.federation.hidden = 6;
  cfg.federation.cluster_clients = false;
  cfg.federation.train.batch_size = 16;
  return cfg;
}

TEST(SimHarness, ClientTimeFormula) {
  TimingModel tm;
  const ClientProfile p{0, 10.0, 4.0, 0};
  const auto none = EstimateClientTime(p, 0, 1000, tm, 500);
  EXPECT_DOUBLE_EQ(none.encrypt, 0.0);
  EXPECT_DOUBLE_EQ(none.upload, 8000.0 / 10e6);
  EXPECT_DOUBLE_EQ(none.train, 500 * 7.6e-6 / 4.0);
  const auto some = EstimateClientTime(p, 100, 1000, tm, 500);
  EXPECT_DOUBLE_EQ(some.encrypt, 100 * 1.6e-2 / 4.0);
  EXPECT_DOUBLE_EQ(some.upload, (100.0 * 768 + 900.0 * 8) / 10e6);
  EXPECT_DOUBLE_EQ(some.total(), some.train + some.encrypt + some.upload);
  EXPECT_THROW(EstimateClientTime(p, 1001, 1000, tm), std::invalid_argument);
  EXPECT_THROW(EstimateClientTime({0, 0.0, 1.0, 0}, 1, 10, tm), std::invalid_argument);
}

TEST(SimHarness, DoublingComputeHalvesComputeTime) {
  TimingModel tm;
  const auto a = EstimateClientTime({0, 20.0, 3.0, 0}, 400, 1000, tm, 900);
  const auto b = EstimateClientTime({0, 20.0, 6.0, 0}, 400, 1000, tm, 900);
  EXPECT_NEAR(b.train, a.train / 2.0, 1e-15);
  EXPECT_NEAR(b.encrypt, a.encrypt / 2.0, 1e-15);
  EXPECT_DOUBLE_EQ(b.upload, a.upload);
}

TEST(SimHarness, UniformMaskTracksComputeRatio) {
  TimingModel tm;
  double fast = 0.0, slow = 0.0;
  for (int v = 1; v <= 6; ++v) {
    const double t = EstimateClientTime({v, 50.0, static_cast<double>(v), 0}, 900, 1000, tm).total();
    if (v == 6) fast = t;
    if (v == 1) slow = t;
  }
  EXPECT_NEAR(slow / fast, 6.0, 0.05);
}

TEST(SimHarness, MethodCostOrdering) {
  const auto plain = RunScenario(Scenario(MaskPolicy::kPlaintext));
  const auto sense = RunScenario(Scenario(MaskPolicy::kSenseCrypt));
  const auto full = RunScenario(Scenario(MaskPolicy::kFullHe));
  EXPECT_LT(plain.total_wall_clock, sense.total_wall_clock);
  EXPECT_LT(sense.total_wall_clock, full.total_wall_clock);
  for (std::size_t e = 0; e < plain.iterations.size(); ++e) {
    EXPECT_LE(plain.iterations[e].upstream_bytes, sense.iterations[e].upstream_bytes);
    EXPECT_LE(sense.iterations[e].upstream_bytes, full.iterations[e].upstream_bytes);
    EXPECT_DOUBLE_EQ(full.iterations[e].mean_encryption_ratio, 1.0);
    EXPECT_DOUBLE_EQ(plain.iterations[e].mean_encryption_ratio, 0.0);
  }
}

TEST(SimHarness, SingleServerDownloadCoversEveryUpload) {
  const auto m = RunScenario(Scenario(MaskPolicy::kSenseCrypt, TopologyMode::kSingleServer));
  for (const auto& r : m.rows) {
    EXPECT_GE(r.download_bytes, r.upload_bytes);
    EXPECT_GE(r.decrypt_s, 0.0);
  }
  const auto d = RunScenario(Scenario(MaskPolicy::kSenseCrypt));
  for (const auto& r : d.rows) {
    EXPECT_EQ(r.download_bytes, d.param_count * 8);
    EXPECT_DOUBLE_EQ(r.decrypt_s, 0.0);
  }
}

TEST(SimHarness, RunsAreDeterministic) {
  const auto cfg = Scenario(MaskPolicy::kSenseCrypt);
  const auto a = RunScenario(cfg);
  const auto b = RunScenario(cfg);
  EXPECT_EQ(a.ToCsv(), b.ToCsv());
  EXPECT_EQ(a.ToJson(), b.ToJson());
}

TEST(SimHarness, HomogeneousClientsHaveUnitSpread) {
  auto cfg = Scenario(MaskPolicy::kFullHe);
  for (auto& p : cfg.profiles) p.compute_units = 8.0;
  const auto m = RunScenario(cfg);
  EXPECT_NEAR(StragglerSpread(m), 1.0, 0.05);
  for (const auto& s : m.iterations) EXPECT_NEAR(s.spread, 1.0, 0.05);
}

TEST(SimHarness, MetricsSerialization) {
  const auto m = RunScenario(Scenario(MaskPolicy::kSenseCrypt));
  const std::string csv = m.ToCsv();
  const auto lines = std::count(csv.begin(), csv.end(), '\n');
  EXPECT_EQ(static_cast<std::size_t>(lines), m.rows.size() + 1);
  EXPECT_EQ(m.rows.size(), 4u * 2u);
  const auto j = nlohmann::json::parse(m.ToJson());
  EXPECT_EQ(j["method"], "sensecrypt");
  const auto plot = nlohmann::json::parse(PlotData({m}));
  EXPECT_TRUE(plot.contains("communication"));
  EXPECT_TRUE(plot.contains("accuracy"));
  EXPECT_TRUE(plot.contains("client_round_time"));
}

TEST(SimHarness, ComputeSweepRunsEveryList) {
  auto cfg = Scenario(MaskPolicy::kPlaintext);
  cfg.iterations = 1;
  cfg.compute_sweep = {{4, 4, 4, 4}, {8, 4, 2, 1}};
  const auto runs = RunComputeSweep(cfg);
  ASSERT_EQ(runs.size(), 2u);
  EXPECT_EQ(runs[1].client_compute_units, (std::vector<double>{8, 4, 2, 1}));
  EXPECT_EQ(runs[0].scenario, "unit_round1");
  EXPECT_GT(StragglerSpread(runs[1]), StragglerSpread(runs[0]));
}

TEST(SimHarness, StrategyStudyEndpoints) {
  const auto snap = TrainDeskSnapshot(Scenario(MaskPolicy::kSenseCrypt));
  const std::vector<double> ratios = {0.0, 0.5, 1.0};
  const auto rows = StrategyStudy(snap, ratios, 1);
  ASSERT_EQ(rows.size(), 9u);
  const double h = MaskMutualInformation(snap.w, EncryptionMask(snap.w.size()));
  for (const auto& r : rows) {
    if (r.ratio == 0.0) {
      EXPECT_NEAR(r.mutual_information, h, 1e-12);
    } else if (r.ratio == 1.0) {
      EXPECT_NEAR(r.mutual_information, 0.0, 1e-12);
    }
  }
}

TEST(SimHarness, SweepCellsReportSolverOutcome) {
  const auto snap = TrainDeskSnapshot(Scenario(MaskPolicy::kSenseCrypt));
  SecurityParams base;
  base.eta_mi = 1e9;
  const auto cells = SweepBC(snap, 0.5, {0.5, 2.0}, {0.1, 0.9}, base);
  ASSERT_EQ(cells.size(), 4u);
  for (const auto& c : cells) {
    if (c.feasible) {
      EXPECT_GT(c.encryption_ratio, 0.0);
      EXPECT_LE(c.encryption_ratio, 0.5 + 1e-12);
    } else {
      EXPECT_EQ(c.encryption_ratio, 0.0);
    }
  }
}

}  // namespace
}  // namespace sensecrypt
