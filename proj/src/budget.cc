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

#include "sensecrypt/budget.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sensecrypt {

std::vector<double> MaxAbsScale(std::span<const double> values) {
  double peak = 0.0;
  for (double v : values) peak = std::max(peak, std::fabs(v));
  if (!(peak > 0.0)) throw std::invalid_argument("all-zero input");
  std::vector<double> out;
  out.reserve(values.size());
  for (double v : values) out.push_back(v / peak);
  return out;
}

std::vector<double> EncryptionBudgets(std::span<const ClientProfile> cluster) {
  if (cluster.empty()) throw std::invalid_argument("empty cluster");
  std::vector<double> r, v;
  for (const auto& p : cluster) {
    if (!(p.bandwidth_mbps > 0.0) || !(p.compute_units > 0.0)) {
      throw std::invalid_argument("client capabilities must be positive");
    }
    r.push_back(p.bandwidth_mbps);
    v.push_back(p.compute_units);
  }
  const auto r_bar = MaxAbsScale(r);
  const auto v_bar = MaxAbsScale(v);
  std::vector<double> capability(cluster.size());
  for (std::size_t i = 0; i < cluster.size(); ++i) {
    capability[i] = std::min(r_bar[i], v_bar[i]);
  }
  return MaxAbsScale(capability);
}

}  // namespace sensecrypt
