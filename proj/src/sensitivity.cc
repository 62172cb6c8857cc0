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

#include "sensecrypt/sensitivity.h"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace sensecrypt {

void ModelParams::Validate() const {
  std::size_t total = 0;
  for (const auto& l : layout) total += l.size();
  if (total != values.size()) {
    throw std::invalid_argument("parameter count does not match layout");
  }
}

double SensitivityVector::Total() const {
  return std::accumulate(gamma.begin(), gamma.end(), 0.0);
}

SensitivityVector TaylorSensitivity(std::span<const double> params,
                                    std::span<const double> grads) {
  if (params.size() != grads.size()) {
    throw std::invalid_argument("parameter/gradient length mismatch");
  }
  SensitivityVector s;
  s.gamma.resize(params.size());
  for (std::size_t k = 0; k < params.size(); ++k) {
    s.gamma[k] = std::fabs(params[k] * grads[k]);
  }
  return s;
}

SensitivityVector TaylorSensitivity(const ModelParams& params,
                                    const GradientVector& grads) {
  params.Validate();
  return TaylorSensitivity(params.values, grads.values);
}

double ExactSensitivity(const LossFunction& loss,
                        std::span<const double> params, std::size_t k) {
  if (k >= params.size()) throw std::out_of_range("parameter index");
  if (params[k] == 0.0) return 0.0;
  std::vector<double> zeroed(params.begin(), params.end());
  zeroed[k] = 0.0;
  return std::fabs(loss(params) - loss(zeroed));
}

std::vector<double> ExactSensitivities(const LossFunction& loss,
                                       std::span<const double> params) {
  const double base = loss(params);
  std::vector<double> work(params.begin(), params.end());
  std::vector<double> out(params.size(), 0.0);
  for (std::size_t k = 0; k < params.size(); ++k) {
    if (params[k] == 0.0) continue;
    work[k] = 0.0;
    out[k] = std::fabs(base - loss(work));
    work[k] = params[k];
  }
  return out;
}

SensitivityVector NormalizeSensitivity(const SensitivityVector& s) {
  const double total = s.Total();
  if (!(total > 0.0)) {
    throw std::invalid_argument("cannot normalize an all-zero sensitivity");
  }
  SensitivityVector out;
  out.gamma.reserve(s.size());
  for (double g : s.gamma) out.gamma.push_back(g / total);
  return out;
}

}  // namespace sensecrypt
