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

#ifndef SENSECRYPT_MODEL_KIT_H_
#define SENSECRYPT_MODEL_KIT_H_

#include <cstddef>
#include <cstdint>
#include <istream>
#include <span>
#include <string>
#include <vector>

#include "sensecrypt/sensitivity.h"

namespace sensecrypt {

// Row-major samples x dim feature matrix with one class label per row.
struct Dataset {
  std::size_t dim = 0;
  int class_count = 0;
  std::vector<double> features;
  std::vector<int> labels;

  std::size_t size() const { return labels.size(); }
  std::span<const double> row(std::size_t i) const {
    return std::span<const double>(features).subspan(i * dim, dim);
  }
  void Validate() const;
  Dataset Subset(std::span<const std::size_t> rows) const;
  // Normalized label histogram of length class_count.
  std::vector<double> LabelHistogram() const;
  // Distinct labels present, ascending.
  std::vector<int> PresentClasses() const;
};

// One Gaussian blob per class. Centers are N(0, center_scale^2) per
// coordinate, samples add N(0, spread^2) per coordinate.
Dataset SynthBlobs(int class_count, int per_class, std::size_t dim, double spread,
                   std::uint64_t seed, double center_scale = 2.0);

// Header row, float feature columns, trailing integer label column.
Dataset ParseCsvDataset(std::istream& in);
Dataset ReadCsvDataset(const std::string& path);

enum class PartitionMode { kIid, kLabelShard };

struct PartitionSpec {
  PartitionMode mode = PartitionMode::kIid;
  int clients = 1;
  int classes_per_client = 1;  // label_shard only
  // label_shard only: each client also receives one sample of every class it
  // does not hold.
  bool one_per_remaining_class = false;
  std::uint64_t seed = 0;

  void Validate(int class_count) const;
};

PartitionMode ParsePartitionMode(const std::string& s);
std::string ToString(PartitionMode m);

// Classes held by `client` under label_shard: (client * cpc + t) mod
// class_count for t < cpc. Clients with equal sets form one category.
std::vector<int> ShardClasses(int client, int classes_per_client,
                              int class_count);

// Disjoint cover of `d`. When `rows` is given it receives the source row
// indices of every part.
std::vector<Dataset> Partition(const Dataset& d, const PartitionSpec& spec,
                               std::vector<std::vector<std::size_t>>* rows = nullptr);

// input -> hidden (tanh) -> output (softmax) perceptron. Layout: W1 (hidden x
// input), b1, W2 (output x hidden), b2.
struct MLPModel {
  std::size_t input = 0;
  std::size_t hidden = 0;
  std::size_t output = 0;
  ModelParams params;

  static MLPModel Create(std::size_t input, std::size_t hidden,
                         std::size_t output, std::uint64_t seed);
  static std::vector<LayerShape> Layout(std::size_t input, std::size_t hidden,
                                        std::size_t output);
  std::size_t ParamCount() const { return params.size(); }
  void Validate() const;
  MLPModel WithValues(std::vector<double> values) const;
};

inline constexpr std::size_t kDefaultHidden = 32;

struct ForwardResult {
  double loss = 0.0;            // mean cross-entropy, natural log
  std::vector<double> logits;   // rows x output
};

// All rows of `d` when `rows` is empty.
ForwardResult ForwardLoss(const MLPModel& m, const Dataset& d,
                          std::span<const std::size_t> rows = {});
// Mean loss with the model's weights replaced by `w`.
double LossAt(const MLPModel& shape, std::span<const double> w,
              const Dataset& d, std::span<const std::size_t> rows = {});
// Gradient of the mean loss.
GradientVector Backward(const MLPModel& m, const Dataset& d,
                        std::span<const std::size_t> rows = {});
MLPModel SgdStep(const MLPModel& m, const GradientVector& g, double lr);
LossFunction MakeLossFunction(const MLPModel& shape, const Dataset& d);

enum class GradientSource {
  kFullData,   // whole local dataset at the final parameters
  kLastBatch,  // final mini-batch at the final parameters
};

struct TrainOptions {
  int epochs = 1;
  double lr = 0.1;
  std::size_t batch_size = 32;
  std::uint64_t seed = 0;
  GradientSource gradient = GradientSource::kFullData;
};

struct LocalResult {
  MLPModel model;
  GradientVector gradient;
  std::vector<double> epoch_losses;  // full-data loss after each epoch
};

LocalResult TrainLocal(const MLPModel& m, const Dataset& d,
                       const TrainOptions& opts);

// Fraction of rows whose argmax logit equals the label. Rows whose label is
// not in `classes` are skipped when `classes` is non-empty.
double Accuracy(const MLPModel& m, const Dataset& d,
                std::span<const int> classes = {});

}  // namespace sensecrypt

#endif  // SENSECRYPT_MODEL_KIT_H_
