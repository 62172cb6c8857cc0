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

#ifndef SENSECRYPT_BUDGET_H_
#define SENSECRYPT_BUDGET_H_

#include <span>
#include <string>
#include <vector>

namespace sensecrypt {

struct ClientProfile {
  int client_id = 0;
  double bandwidth_mbps = 1.0;  // r_i, megabytes per second
  double compute_units = 1.0;   // v_i, CPU count
  std::size_t data_size = 0;    // n_i, FedAvg weight numerator
};

// u_i / max_j |u_j|.
std::vector<double> MaxAbsScale(std::span<const double> values);

// Per-cluster budgets alpha_i = m_i / max_j m_j with
// m_i = min(scaled bandwidth, scaled compute). The fastest client gets 1.
std::vector<double> EncryptionBudgets(std::span<const ClientProfile> cluster);

}  // namespace sensecrypt

#endif  // SENSECRYPT_BUDGET_H_
