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

#include "sensecrypt/scenario_config.h"

#include <gtest/gtest.h>

namespace sensecrypt {
namespace {

constexpr const char* kMinimal = R"({"clients": {"count": 3}})";

std::string LocationOf(const std::string& text) {
  try {
    ParseScenarioConfig(text);
  } catch (const ConfigError& e) {
    return e.location();
  }
  return "<no error>";
}

TEST(ScenarioConfig, MinimalConfigUsesDefaults) {
  const auto cfg = ParseScenarioConfig(kMinimal);
  EXPECT_EQ(cfg.profiles.size(), 3u);
  EXPECT_EQ(cfg.partition.clients, 3);
  EXPECT_EQ(cfg.method, MaskPolicy::kSenseCrypt);
  EXPECT_EQ(cfg.federation.topology, TopologyMode::kDualServer);
  EXPECT_DOUBLE_EQ(cfg.federation.security.B, 1.3);
  EXPECT_DOUBLE_EQ(cfg.federation.security.C, 0.7);
  EXPECT_DOUBLE_EQ(cfg.federation.security.eta_mi, 2.0);
}

TEST(ScenarioConfig, PerClientListsAndScalars) {
  const auto cfg = ParseScenarioConfig(
      R"({"clients": {"count": 3, "bandwidth_mbps": [10, 20, 30], "compute_units": 4}})");
  EXPECT_DOUBLE_EQ(cfg.profiles[1].bandwidth_mbps, 20.0);
  EXPECT_DOUBLE_EQ(cfg.profiles[2].compute_units, 4.0);
  EXPECT_EQ(LocationOf(R"({"clients": {"count": 3, "compute_units": [1, 2]}})"),
            "clients.compute_units");
  EXPECT_EQ(LocationOf(R"({"clients": {"count": 2, "compute_units": [1, -2]}})"),
            "clients.compute_units");
}

TEST(ScenarioConfig, SyntaxErrorsReportLineAndColumn) {
  const std::string loc = LocationOf("{\n  \"clients\": {\"count\": 3},\n  \"seed\": ,\n}");
  EXPECT_EQ(loc.rfind("line 3, column", 0), 0u) << loc;
  EXPECT_EQ(LocationOf("").rfind("line 1", 0), 0u);
}

TEST(ScenarioConfig, SemanticErrorsReportFieldPath) {
  EXPECT_EQ(LocationOf(R"({"clients": {"count": 3}, "solver": {"B": "x"}})"), "solver.B");
  EXPECT_EQ(LocationOf(R"({"clients": {"count": 3}, "solver": {"C": 2.0}})"), "solver");
  EXPECT_EQ(LocationOf(R"({"clients": {"count": 3}, "he": {"key_bits": 16}})"), "he.key_bits");
  EXPECT_EQ(LocationOf(R"({"clients": {"count": 3}, "training": {"epochs": 0}})"),
            "training.epochs");
  EXPECT_EQ(LocationOf(R"({"clients": {"count": 0}})"), "clients.count");
  EXPECT_EQ(LocationOf(R"({"seed": 1})"), "clients");
  EXPECT_EQ(LocationOf(R"({"clients": {"count": 3}, "method": "half"})"), "method");
}

TEST(ScenarioConfig, UnknownFieldsAreRejected) {
  EXPECT_EQ(LocationOf(R"({"clients": {"count": 3}, "extra": 1})"), "extra");
  EXPECT_EQ(LocationOf(R"({"clients": {"count": 3}, "solver": {"gamma": 1}})"), "solver.gamma");
}

TEST(ScenarioConfig, CanonicalJsonRoundTrips) {
  const auto cfg = ParseScenarioConfig(R"({
    "name": "rt", "seed": 9, "iterations": 4, "method": "uniform_mask",
    "topology": "single_server",
    "data": {"class_count": 6, "per_class": 30, "dim": 5},
    "partition": {"mode": "label_shard", "classes_per_client": 2},
    "clients": {"count": 4, "bandwidth_mbps": [5, 6, 7, 8], "compute_units": 2},
    "solver": {"B": 1.5, "C": 0.3, "eta_mi": 1.25},
    "clustering": {"enabled": false, "dp_epsilon": 0.5},
    "sweep": {"compute_units": [[1, 2, 3, 4], [4, 3, 2, 1]]}
  })");
  const std::string canon = ScenarioConfigToJson(cfg);
  const auto again = ParseScenarioConfig(canon);
  EXPECT_EQ(ScenarioConfigToJson(again), canon);
  EXPECT_EQ(ConfigHash(again), ConfigHash(cfg));
  EXPECT_EQ(again.method, MaskPolicy::kUniformMask);
  EXPECT_EQ(again.federation.topology, TopologyMode::kSingleServer);
  EXPECT_FALSE(again.federation.cluster_clients);
  ASSERT_TRUE(again.federation.dp_epsilon.has_value());
  EXPECT_DOUBLE_EQ(*again.federation.dp_epsilon, 0.5);
  EXPECT_EQ(again.compute_sweep.size(), 2u);
}

TEST(ScenarioConfig, HashDistinguishesConfigs) {
  const auto a = ParseScenarioConfig(R"({"clients": {"count": 3}, "seed": 1})");
  const auto b = ParseScenarioConfig(R"({"clients": {"count": 3}, "seed": 2})");
  EXPECT_NE(ConfigHash(a), ConfigHash(b));
  EXPECT_EQ(ConfigHash(a).size(), 16u);
}

TEST(ScenarioConfig, PresetsParse) {
  for (const char* name : {"stat_het", "sys_het", "combined", "straggler_sweep",
                           "budget_attack_profile"}) {
    const auto cfg = LoadScenarioConfig(std::string(SENSECRYPT_PRESET_DIR) + "/" + name + ".json");
    EXPECT_EQ(cfg.name, name);
    cfg.Validate();
  }
}

}  // namespace
}  // namespace sensecrypt
