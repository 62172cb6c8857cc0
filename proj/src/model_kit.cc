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

#include "sensecrypt/model_kit.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

namespace sensecrypt {
namespace {

std::vector<std::size_t> AllRows(const Dataset& d,
                                 std::span<const std::size_t> rows) {
  if (!rows.empty()) return {rows.begin(), rows.end()};
  std::vector<std::size_t> all(d.size());
  std::iota(all.begin(), all.end(), 0);
  return all;
}

void CheckShapes(const MLPModel& m, std::span<const double> w, const Dataset& d) {
  if (w.size() != m.hidden * m.input + m.hidden + m.output * m.hidden + m.output) {
    throw std::invalid_argument("parameter vector does not match model dims");
  }
  if (d.dim != m.input) throw std::invalid_argument("feature dim mismatch");
  if (static_cast<std::size_t>(d.class_count) != m.output) {
    throw std::invalid_argument("class count mismatch");
  }
}

// Offsets of the four parameter blocks in the flat vector.
struct Offsets {
  std::size_t w1, b1, w2, b2;
  explicit Offsets(const MLPModel& m)
      : w1(0),
        b1(m.hidden * m.input),
        w2(b1 + m.hidden),
        b2(w2 + m.output * m.hidden) {}
};

// Hidden activations and softmax probabilities for one sample.
void Forward(const MLPModel& m, std::span<const double> w,
             std::span<const double> x, std::vector<double>& h,
             std::vector<double>& logits) {
  const Offsets o(m);
  h.assign(m.hidden, 0.0);
  logits.assign(m.output, 0.0);
  for (std::size_t j = 0; j < m.hidden; ++j) {
    double a = w[o.b1 + j];
    const double* row = &w[o.w1 + j * m.input];
    for (std::size_t i = 0; i < m.input; ++i) a += row[i] * x[i];
    h[j] = std::tanh(a);
  }
  for (std::size_t c = 0; c < m.output; ++c) {
    double z = w[o.b2 + c];
    const double* row = &w[o.w2 + c * m.hidden];
    for (std::size_t j = 0; j < m.hidden; ++j) z += row[j] * h[j];
    logits[c] = z;
  }
}

// Returns -log softmax(z)[label] and writes the probabilities into p.
double SoftmaxCrossEntropy(std::span<const double> z, int label,
                           std::vector<double>& p) {
  const double mx = *std::max_element(z.begin(), z.end());
  double sum = 0.0;
  p.resize(z.size());
  for (std::size_t c = 0; c < z.size(); ++c) {
    p[c] = std::exp(z[c] - mx);
    sum += p[c];
  }
  for (double& v : p) v /= sum;
  return -(z[label] - mx - std::log(sum));
}

}  // namespace

void Dataset::Validate() const {
  if (class_count <= 0) throw std::invalid_argument("class_count must be > 0");
  if (features.size() != labels.size() * dim) {
    throw std::invalid_argument("feature/label row count mismatch");
  }
  for (int l : labels) {
    if (l < 0 || l >= class_count) throw std::invalid_argument("label out of range");
  }
}

Dataset Dataset::Subset(std::span<const std::size_t> rows) const {
  Dataset out;
  out.dim = dim;
  out.class_count = class_count;
  out.features.reserve(rows.size() * dim);
  out.labels.reserve(rows.size());
  for (std::size_t r : rows) {
    if (r >= size()) throw std::out_of_range("row index out of range");
    auto x = row(r);
    out.features.insert(out.features.end(), x.begin(), x.end());
    out.labels.push_back(labels[r]);
  }
  return out;
}

std::vector<double> Dataset::LabelHistogram() const {
  std::vector<double> h(class_count, 0.0);
  for (int l : labels) h[l] += 1.0;
  if (!labels.empty()) {
    for (double& v : h) v /= static_cast<double>(labels.size());
  }
  return h;
}

std::vector<int> Dataset::PresentClasses() const {
  std::vector<int> out(labels.begin(), labels.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

Dataset SynthBlobs(int class_count, int per_class, std::size_t dim, double spread,
                   std::uint64_t seed, double center_scale) {
  if (class_count <= 0 || per_class <= 0 || dim == 0) {
    throw std::invalid_argument("blob sizes must be positive");
  }
  if (spread < 0.0) throw std::invalid_argument("spread must be >= 0");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> centers(static_cast<std::size_t>(class_count) * dim);
  for (double& c : centers) c = center_scale * normal(rng);
  Dataset d;
  d.dim = dim;
  d.class_count = class_count;
  d.features.reserve(static_cast<std::size_t>(class_count) * per_class * dim);
  for (int c = 0; c < class_count; ++c) {
    for (int s = 0; s < per_class; ++s) {
      for (std::size_t i = 0; i < dim; ++i) {
        d.features.push_back(centers[c * dim + i] + spread * normal(rng));
      }
      d.labels.push_back(c);
    }
  }
  return d;
}

Dataset ParseCsvDataset(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("empty CSV");
  const std::size_t columns =
      static_cast<std::size_t>(std::count(line.begin(), line.end(), ',')) + 1;
  if (columns < 2) throw std::invalid_argument("CSV needs features and a label");
  Dataset d;
  d.dim = columns - 1;
  int max_label = -1;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    std::stringstream ss(line);
    ss.imbue(std::locale::classic());
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != columns) {
      throw std::invalid_argument("CSV line " + std::to_string(line_no) +
                                  ": expected " + std::to_string(columns) +
                                  " columns");
    }
    try {
      for (std::size_t i = 0; i + 1 < columns; ++i) {
        std::size_t used = 0;
        d.features.push_back(std::stod(cells[i], &used));
      }
      const int label = std::stoi(cells.back());
      if (label < 0) throw std::invalid_argument("negative label");
      d.labels.push_back(label);
      max_label = std::max(max_label, label);
    } catch (const std::logic_error&) {
      throw std::invalid_argument("CSV line " + std::to_string(line_no) +
                                  ": malformed number");
    }
  }
  d.class_count = max_label + 1;
  d.Validate();
  return d;
}

Dataset ReadCsvDataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return ParseCsvDataset(in);
}

void PartitionSpec::Validate(int class_count) const {
  if (clients <= 0) throw std::invalid_argument("clients must be > 0");
  if (mode == PartitionMode::kLabelShard &&
      (classes_per_client <= 0 || classes_per_client > class_count)) {
    throw std::invalid_argument("classes_per_client must lie in [1, class_count]");
  }
}

PartitionMode ParsePartitionMode(const std::string& s) {
  if (s == "iid") return PartitionMode::kIid;
  if (s == "label_shard") return PartitionMode::kLabelShard;
  throw std::invalid_argument("unknown partition mode: " + s);
}

std::string ToString(PartitionMode m) {
  return m == PartitionMode::kIid ? "iid" : "label_shard";
}

std::vector<int> ShardClasses(int client, int classes_per_client,
                              int class_count) {
  std::vector<int> out;
  for (int t = 0; t < classes_per_client; ++t) {
    out.push_back((client * classes_per_client + t) % class_count);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<Dataset> Partition(const Dataset& d, const PartitionSpec& spec,
                               std::vector<std::vector<std::size_t>>* rows_out) {
  d.Validate();
  spec.Validate(d.class_count);
  std::mt19937_64 rng(spec.seed);
  std::vector<std::vector<std::size_t>> by_class(d.class_count);
  for (std::size_t r = 0; r < d.size(); ++r) by_class[d.labels[r]].push_back(r);
  for (auto& rows : by_class) std::shuffle(rows.begin(), rows.end(), rng);

  std::vector<std::vector<std::size_t>> parts(spec.clients);
  if (spec.mode == PartitionMode::kIid) {
    // Stratified deal; the running offset keeps client totals within one.
    std::size_t next = 0;
    for (const auto& rows : by_class) {
      for (std::size_t r : rows) parts[next++ % spec.clients].push_back(r);
    }
  } else {
    std::vector<std::vector<int>> holders(d.class_count);
    for (int i = 0; i < spec.clients; ++i) {
      for (int c : ShardClasses(i, spec.classes_per_client, d.class_count)) {
        holders[c].push_back(i);
      }
    }
    for (int c = 0; c < d.class_count; ++c) {
      auto& rows = by_class[c];
      if (rows.empty()) continue;
      if (holders[c].empty()) {
        throw std::invalid_argument("class " + std::to_string(c) +
                                    " has no holder under this spec");
      }
      std::size_t pos = 0;
      if (spec.one_per_remaining_class) {
        for (int i = 0; i < spec.clients; ++i) {
          if (std::find(holders[c].begin(), holders[c].end(), i) !=
              holders[c].end()) {
            continue;
          }
          if (pos >= rows.size()) {
            throw std::invalid_argument("too few samples for per-class extras");
          }
          parts[i].push_back(rows[pos++]);
        }
      }
      if (rows.size() - pos < holders[c].size()) {
        throw std::invalid_argument("too few samples of class " +
                                    std::to_string(c) + " for its holders");
      }
      std::size_t k = 0;
      for (; pos < rows.size(); ++pos) {
        parts[holders[c][k++ % holders[c].size()]].push_back(rows[pos]);
      }
    }
  }
  std::vector<Dataset> out;
  out.reserve(parts.size());
  for (auto& p : parts) {
    if (p.empty()) throw std::invalid_argument("a client received no samples");
    std::sort(p.begin(), p.end());
    out.push_back(d.Subset(p));
  }
  if (rows_out) *rows_out = std::move(parts);
  return out;
}

std::vector<LayerShape> MLPModel::Layout(std::size_t input, std::size_t hidden,
                                         std::size_t output) {
  return {{"w1", hidden, input},
          {"b1", hidden, 1},
          {"w2", output, hidden},
          {"b2", output, 1}};
}

MLPModel MLPModel::Create(std::size_t input, std::size_t hidden,
                          std::size_t output, std::uint64_t seed) {
  if (input == 0 || hidden == 0 || output < 2) {
    throw std::invalid_argument("invalid model dims");
  }
  MLPModel m;
  m.input = input;
  m.hidden = hidden;
  m.output = output;
  m.params.layout = Layout(input, hidden, output);
  std::mt19937_64 rng(seed);
  const double a1 = std::sqrt(6.0 / static_cast<double>(input + hidden));
  const double a2 = std::sqrt(6.0 / static_cast<double>(hidden + output));
  std::uniform_real_distribution<double> u1(-a1, a1), u2(-a2, a2);
  auto& v = m.params.values;
  for (std::size_t k = 0; k < hidden * input; ++k) v.push_back(u1(rng));
  for (std::size_t k = 0; k < hidden; ++k) v.push_back(0.0);
  for (std::size_t k = 0; k < output * hidden; ++k) v.push_back(u2(rng));
  for (std::size_t k = 0; k < output; ++k) v.push_back(0.0);
  return m;
}

void MLPModel::Validate() const {
  params.Validate();
  if (params.layout != Layout(input, hidden, output)) {
    throw std::invalid_argument("layout does not match model dims");
  }
  for (double v : params.values) {
    if (!std::isfinite(v)) throw std::invalid_argument("non-finite parameter");
  }
}

MLPModel MLPModel::WithValues(std::vector<double> values) const {
  if (values.size() != ParamCount()) {
    throw std::invalid_argument("parameter count mismatch");
  }
  MLPModel m = *this;
  m.params.values = std::move(values);
  return m;
}

ForwardResult ForwardLoss(const MLPModel& m, const Dataset& d,
                          std::span<const std::size_t> rows) {
  CheckShapes(m, m.params.values, d);
  const auto idx = AllRows(d, rows);
  if (idx.empty()) throw std::invalid_argument("empty batch");
  ForwardResult r;
  r.logits.reserve(idx.size() * m.output);
  std::vector<double> h, z, p;
  for (std::size_t s : idx) {
    Forward(m, m.params.values, d.row(s), h, z);
    r.loss += SoftmaxCrossEntropy(z, d.labels[s], p);
    r.logits.insert(r.logits.end(), z.begin(), z.end());
  }
  r.loss /= static_cast<double>(idx.size());
  return r;
}

double LossAt(const MLPModel& shape, std::span<const double> w,
              const Dataset& d, std::span<const std::size_t> rows) {
  CheckShapes(shape, w, d);
  const auto idx = AllRows(d, rows);
  if (idx.empty()) throw std::invalid_argument("empty batch");
  std::vector<double> h, z, p;
  double loss = 0.0;
  for (std::size_t s : idx) {
    Forward(shape, w, d.row(s), h, z);
    loss += SoftmaxCrossEntropy(z, d.labels[s], p);
  }
  return loss / static_cast<double>(idx.size());
}

GradientVector Backward(const MLPModel& m, const Dataset& d,
                        std::span<const std::size_t> rows) {
  const auto& w = m.params.values;
  CheckShapes(m, w, d);
  const auto idx = AllRows(d, rows);
  if (idx.empty()) throw std::invalid_argument("empty batch");
  const Offsets o(m);
  GradientVector g;
  g.values.assign(w.size(), 0.0);
  auto& gv = g.values;
  std::vector<double> h, z, p, dh(m.hidden);
  const double inv = 1.0 / static_cast<double>(idx.size());
  for (std::size_t s : idx) {
    const auto x = d.row(s);
    Forward(m, w, x, h, z);
    SoftmaxCrossEntropy(z, d.labels[s], p);
    p[d.labels[s]] -= 1.0;  // dL/dz
    std::fill(dh.begin(), dh.end(), 0.0);
    for (std::size_t c = 0; c < m.output; ++c) {
      const double dz = p[c] * inv;
      gv[o.b2 + c] += dz;
      for (std::size_t j = 0; j < m.hidden; ++j) {
        gv[o.w2 + c * m.hidden + j] += dz * h[j];
        dh[j] += w[o.w2 + c * m.hidden + j] * dz;
      }
    }
    for (std::size_t j = 0; j < m.hidden; ++j) {
      const double da = dh[j] * (1.0 - h[j] * h[j]);
      gv[o.b1 + j] += da;
      for (std::size_t i = 0; i < m.input; ++i) {
        gv[o.w1 + j * m.input + i] += da * x[i];
      }
    }
  }
  return g;
}

MLPModel SgdStep(const MLPModel& m, const GradientVector& g, double lr) {
  if (g.size() != m.ParamCount()) throw std::invalid_argument("gradient length mismatch");
  MLPModel out = m;
  for (std::size_t k = 0; k < g.size(); ++k) out.params.values[k] -= lr * g.values[k];
  return out;
}

LossFunction MakeLossFunction(const MLPModel& shape, const Dataset& d) {
  return [shape, &d](std::span<const double> w) { return LossAt(shape, w, d); };
}

LocalResult TrainLocal(const MLPModel& m, const Dataset& d,
                       const TrainOptions& opts) {
  CheckShapes(m, m.params.values, d);
  if (d.size() == 0) throw std::invalid_argument("empty local dataset");
  if (opts.epochs < 0 || opts.batch_size == 0) {
    throw std::invalid_argument("invalid training options");
  }
  std::mt19937_64 rng(opts.seed);
  std::vector<std::size_t> order(d.size());
  std::iota(order.begin(), order.end(), 0);
  LocalResult r;
  r.model = m;
  std::vector<std::size_t> last_batch(order.begin(),
                                      order.begin() + std::min(opts.batch_size, order.size()));
  for (int e = 0; e < opts.epochs; ++e) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t start = 0; start < order.size(); start += opts.batch_size) {
      const std::size_t end = std::min(order.size(), start + opts.batch_size);
      std::span<const std::size_t> batch(order.data() + start, end - start);
      r.model = SgdStep(r.model, Backward(r.model, d, batch), opts.lr);
      last_batch.assign(batch.begin(), batch.end());
    }
    r.epoch_losses.push_back(ForwardLoss(r.model, d).loss);
  }
  r.gradient = opts.gradient == GradientSource::kFullData
                   ? Backward(r.model, d)
                   : Backward(r.model, d, last_batch);
  return r;
}

double Accuracy(const MLPModel& m, const Dataset& d, std::span<const int> classes) {
  CheckShapes(m, m.params.values, d);
  std::vector<double> h, z;
  std::size_t hit = 0, seen = 0;
  for (std::size_t s = 0; s < d.size(); ++s) {
    if (!classes.empty() &&
        std::find(classes.begin(), classes.end(), d.labels[s]) == classes.end()) {
      continue;
    }
    Forward(m, m.params.values, d.row(s), h, z);
    const auto best = std::max_element(z.begin(), z.end()) - z.begin();
    ++seen;
    if (best == d.labels[s]) ++hit;
  }
  return seen == 0 ? 0.0 : static_cast<double>(hit) / static_cast<double>(seen);
}

}  // namespace sensecrypt
