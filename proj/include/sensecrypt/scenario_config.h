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

#ifndef SENSECRYPT_SCENARIO_CONFIG_H_
#define SENSECRYPT_SCENARIO_CONFIG_H_

#include <stdexcept>
#include <string>
#include <vector>

#include "sensecrypt/sim_harness.h"

namespace sensecrypt {

// Malformed or invalid configuration. what() reads "<location>: <reason>",
// where location is "line L, column C" for syntax errors and a JSON path
// such as "solver.B" otherwise.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& location, const std::string& reason)
      : std::runtime_error(location + ": " + reason), location_(location) {}
  const std::string& location() const { return location_; }

 private:
  std::string location_;
};

// Schema (all sections optional except clients):
//   name, seed, iterations, method, topology
//   data:       class_count, per_class, dim, spread, center_scale,
//               test_fraction, csv
//   partition:  mode (iid | label_shard), classes_per_client,
//               one_per_remaining_class
//   clients:    count, bandwidth_mbps, compute_units (scalar or per-client
//               list)
//   he:         key_bits, scale_bits, max_magnitude, server_weighting,
//               weight_bits
//   solver:     B, C, eta_mi, beta1, beta2, mi_bins, node_limit
//   training:   epochs, lr, batch_size, sensitivity_epochs, hidden,
//               gradient (full_data | last_batch)
//   clustering: enabled, dp_epsilon, dp_delta, dp_clip, damping, max_iter,
//               convergence_window
//   timing:     enc_seconds_per_param_per_unit,
//               dec_seconds_per_param_per_unit,
//               train_seconds_per_sample_per_unit,
//               aggregate_seconds_per_ciphertext, server_compute_units,
//               ciphertext_bytes, plaintext_bytes
//   sweep:      compute_units (list of per-client lists)
ScenarioConfig ParseScenarioConfig(const std::string& text);
ScenarioConfig LoadScenarioConfig(const std::string& path);

// Canonical JSON; parsing it yields an equal configuration.
std::string ScenarioConfigToJson(const ScenarioConfig& cfg);
// FNV-1a 64 of the canonical JSON, hex encoded.
std::string ConfigHash(const ScenarioConfig& cfg);

}  // namespace sensecrypt

#endif  // SENSECRYPT_SCENARIO_CONFIG_H_
