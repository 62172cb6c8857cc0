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

#ifndef SENSECRYPT_SENSITIVITY_H_
#define SENSECRYPT_SENSITIVITY_H_

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace sensecrypt {

struct LayerShape {
  std::string name;
  std::size_t rows = 0;
  std::size_t cols = 1;

  std::size_t size() const { return rows * cols; }
  friend bool operator==(const LayerShape&, const LayerShape&) = default;
};

// Flat parameter vector plus the layer layout needed to reassemble it.
struct ModelParams {
  std::vector<double> values;
  std::vector<LayerShape> layout;

  std::size_t size() const { return values.size(); }
  // Throws std::invalid_argument if values.size() != sum of layer sizes.
  void Validate() const;
};

// Aligned index-for-index with a ModelParams vector.
struct GradientVector {
  std::vector<double> values;
  std::size_t size() const { return values.size(); }
};

// Per-parameter importance, all entries >= 0.
struct SensitivityVector {
  std::vector<double> gamma;
  std::size_t size() const { return gamma.size(); }
  double Total() const;
};

// gamma_k = |w_k * g_k|.
SensitivityVector TaylorSensitivity(std::span<const double> params,
                                    std::span<const double> grads);
SensitivityVector TaylorSensitivity(const ModelParams& params,
                                    const GradientVector& grads);

// Loss of a model evaluated at an arbitrary flat parameter vector over a
// fixed batch.
using LossFunction = std::function<double(std::span<const double>)>;

// |L(W) - L(W with w_k := 0)|, two forward passes.
double ExactSensitivity(const LossFunction& loss,
                        std::span<const double> params, std::size_t k);
// All indices at once; L(W) is evaluated a single time.
std::vector<double> ExactSensitivities(const LossFunction& loss,
                                       std::span<const double> params);

// Rescales to unit sum. Throws if the total is not positive.
SensitivityVector NormalizeSensitivity(const SensitivityVector& s);

}  // namespace sensecrypt

#endif  // SENSECRYPT_SENSITIVITY_H_
