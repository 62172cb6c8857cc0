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

#ifndef SENSECRYPT_SIM_HARNESS_H_
#define SENSECRYPT_SIM_HARNESS_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sensecrypt/budget.h"
#include "sensecrypt/fl_runtime.h"
#include "sensecrypt/model_kit.h"

namespace sensecrypt {

// Linear cost model. Compute coefficients are seconds on one compute unit;
// defaults come from tools/paillier_bench at 2048-bit keys.
struct TimingModel {
  double enc_seconds_per_param_per_unit = 1.6e-2;
  double dec_seconds_per_param_per_unit = 1.6e-2;
  double train_seconds_per_sample_per_unit = 7.6e-6;
  double aggregate_seconds_per_ciphertext = 9.3e-6;  // one AddCipher, server
  double server_compute_units = 104.0;               // aggregator and DKMS
  std::size_t ciphertext_bytes = 768;
  std::size_t plaintext_bytes = 8;

  void Validate() const;
  SizeConstants sizes() const { return {ciphertext_bytes, plaintext_bytes}; }
};

struct ClientTime {
  double train = 0.0;
  double encrypt = 0.0;
  double upload = 0.0;
  double total() const { return train + encrypt + upload; }
};

// Pre-barrier time of one client: training over `samples` rows, encryption
// of `mask_popcount` slots, and upload of the mixed vector.
ClientTime EstimateClientTime(const ClientProfile& profile,
                              std::size_t mask_popcount, std::size_t model_size,
                              const TimingModel& tm, std::size_t samples = 0);

struct ClientIterationRow {
  int iteration = 0;
  int client_id = 0;
  int cluster_id = 0;
  double alpha = 1.0;
  std::size_t cap = 0;
  std::size_t popcount = 0;
  std::string status;
  bool fallback = false;
  double coverage = 0.0;
  double mutual_information = 0.0;
  double train_s = 0.0;
  double encrypt_s = 0.0;
  double upload_s = 0.0;
  double round_s = 0.0;  // train + encrypt + upload
  double download_s = 0.0;
  double decrypt_s = 0.0;
  std::size_t upload_bytes = 0;
  std::size_t download_bytes = 0;
  double accuracy = 0.0;
};

struct IterationSummary {
  int iteration = 0;
  double wall_clock = 0.0;  // slowest cluster
  double spread = 1.0;      // max/min client round time
  double mean_accuracy = 0.0;
  std::size_t upstream_bytes = 0;
  std::size_t downstream_bytes = 0;
  double mean_encryption_ratio = 0.0;   // mean client popcount / N
  double union_ratio = 0.0;             // mean applied cluster union / N
  double sensecrypt_global_union_ratio = 0.0;
  double sensecrypt_cluster_union_ratio = 0.0;  // mean over clusters
};

struct Metrics {
  std::string scenario;
  std::string method;
  std::size_t param_count = 0;
  std::size_t cluster_count = 0;
  std::vector<int> cluster_labels;
  std::vector<double> alphas;
  std::vector<ClientIterationRow> rows;
  std::vector<IterationSummary> iterations;
  std::size_t infeasible_rounds = 0;
  double total_wall_clock = 0.0;
  double final_accuracy = 0.0;
  std::vector<double> client_compute_units;  // per client, for plot series

  std::string ToCsv() const;
  std::string ToJson() const;
};

struct DataConfig {
  int class_count = 10;
  int per_class = 100;
  std::size_t dim = 16;
  double spread = 1.0;
  double center_scale = 2.0;
  double test_fraction = 0.2;
  std::string csv_path;  // optional; replaces synthetic blobs
};

struct ScenarioConfig {
  std::string name = "custom";
  MaskPolicy method = MaskPolicy::kSenseCrypt;
  std::vector<ClientProfile> profiles;
  PartitionSpec partition;
  DataConfig data;
  FederationConfig federation;
  TimingModel timing;
  int iterations = 5;
  std::uint64_t seed = 0;
  // Optional compute-unit lists; each produces one run of the scenario.
  std::vector<std::vector<double>> compute_sweep;

  void Validate() const;
};

// Builds per-client training/test splits for the scenario.
std::vector<ClientSetup> BuildClients(const ScenarioConfig& cfg);

Metrics RunScenario(const ScenarioConfig& cfg);
// The same scenario under every compute-unit list of compute_sweep.
std::vector<Metrics> RunComputeSweep(const ScenarioConfig& cfg);

// Timing over finished RoundRecords.
Metrics ComputeMetrics(const ScenarioConfig& cfg, const Federation& fed,
                       const std::vector<RoundRecord>& records,
                       const std::vector<std::size_t>& global_unions,
                       const std::vector<std::vector<std::size_t>>& cluster_unions);

// max_i / min_i of each client's mean round time across iterations.
double StragglerSpread(const Metrics& m);

// Trained parameters and sensitivities of one client's desk model, the input
// of the component-level sweeps.
struct DeskSnapshot {
  std::vector<double> w;
  std::vector<double> gamma;
};
DeskSnapshot TrainDeskSnapshot(const ScenarioConfig& cfg, std::size_t client = 0);

struct SweepCell {
  double B = 0.0;
  double C = 0.0;
  double encryption_ratio = 0.0;  // 0 when infeasible
  double mutual_information = 0.0;
  bool feasible = false;
  std::string status;
};
std::vector<SweepCell> SweepBC(const DeskSnapshot& snap, double alpha,
                               const std::vector<double>& b_values,
                               const std::vector<double>& c_values,
                               const SecurityParams& base,
                               const MIEstimatorConfig& mi = {});

struct StrategyRow {
  Strategy strategy = Strategy::kHigh;
  double ratio = 0.0;
  double mutual_information = 0.0;
};
std::vector<StrategyRow> StrategyStudy(const DeskSnapshot& snap,
                                       const std::vector<double>& ratios,
                                       std::uint64_t seed,
                                       const MIEstimatorConfig& mi = {});

// Per-figure series keyed by figure role: training time per iteration,
// communication bytes, accuracy, per-client round time.
std::string PlotData(const std::vector<Metrics>& runs);

}  // namespace sensecrypt

#endif  // SENSECRYPT_SIM_HARNESS_H_
