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

#include "sensecrypt/clustering.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <stdexcept>

#include "json.hpp"

namespace sensecrypt {
namespace {

double SquaredDistance(std::span<const double> a, std::span<const double> b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double t = a[i] - b[i];
    d += t * t;
  }
  return d;
}

std::vector<int> ArgmaxOverExemplars(const SimilarityMatrix& sim,
                                     const std::vector<int>& exemplars) {
  std::vector<int> c(sim.n, 0);
  for (std::size_t i = 0; i < sim.n; ++i) {
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t e = 0; e < exemplars.size(); ++e) {
      const double v = sim.at(i, exemplars[e]);
      if (v > best) {
        best = v;
        c[i] = static_cast<int>(e);
      }
    }
  }
  for (std::size_t e = 0; e < exemplars.size(); ++e) {
    c[exemplars[e]] = static_cast<int>(e);
  }
  return c;
}

}  // namespace

double GaussianSigma(double epsilon, double delta) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be > 0");
  if (!(delta > 0.0 && delta < 1.0)) {
    throw std::invalid_argument("delta must lie in (0, 1)");
  }
  return std::sqrt(2.0 * std::log(1.25 / delta)) / epsilon;
}

DPParams DPParams::Calibrated(double epsilon, double clip_norm, double delta) {
  DPParams p;
  p.epsilon = epsilon;
  p.delta = delta;
  p.clip_norm = clip_norm;
  p.sigma = GaussianSigma(epsilon, delta);
  return p;
}

DPParams DPParams::Noiseless(double clip_norm) {
  DPParams p;
  p.epsilon = std::numeric_limits<double>::infinity();
  p.clip_norm = clip_norm;
  p.sigma = 0.0;
  return p;
}

SensitivityVector DpPerturb(const SensitivityVector& s, const DPParams& dp,
                            std::uint64_t seed) {
  if (!(dp.clip_norm > 0.0)) throw std::invalid_argument("clip_norm must be > 0");
  double norm = 0.0;
  for (double g : s.gamma) norm += g * g;
  norm = std::sqrt(norm);
  const double scale = 1.0 / std::max(1.0, norm / dp.clip_norm);
  SensitivityVector out;
  out.gamma.resize(s.size());
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  const double stddev = dp.sigma * dp.clip_norm;
  for (std::size_t k = 0; k < s.size(); ++k) {
    out.gamma[k] = s.gamma[k] * scale;
    if (stddev > 0.0) out.gamma[k] += stddev * noise(rng);
  }
  return out;
}

double EuclideanDistance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("length mismatch");
  return std::sqrt(SquaredDistance(a, b));
}

SimilarityMatrix SimilarityMatrix::FromPoints(const PointSet& points) {
  SimilarityMatrix m;
  m.n = points.size();
  m.s.assign(m.n * m.n, 0.0);
  for (std::size_t i = 0; i < m.n; ++i) {
    if (points[i].size() != points[0].size()) {
      throw std::invalid_argument("points differ in dimension");
    }
    for (std::size_t j = i + 1; j < m.n; ++j) {
      const double v = -SquaredDistance(points[i], points[j]);
      m.at(i, j) = v;
      m.at(j, i) = v;
    }
  }
  m.SetPreference(MedianOffDiagonal(m));
  return m;
}

double SimilarityMatrix::MedianOffDiagonal(const SimilarityMatrix& m) {
  std::vector<double> off;
  off.reserve(m.n * (m.n - 1));
  for (std::size_t i = 0; i < m.n; ++i) {
    for (std::size_t j = 0; j < m.n; ++j) {
      if (i != j) off.push_back(m.at(i, j));
    }
  }
  if (off.empty()) return 0.0;
  std::sort(off.begin(), off.end());
  const std::size_t h = off.size() / 2;
  return off.size() % 2 ? off[h] : 0.5 * (off[h - 1] + off[h]);
}

void SimilarityMatrix::SetPreference(double p) {
  preference = p;
  for (std::size_t i = 0; i < n; ++i) at(i, i) = p;
}

std::string ClusterAssignment::ToJson(const std::string& method,
                                      std::optional<double> epsilon) const {
  nlohmann::json j;
  j["labels"] = labels;
  j["exemplars"] = exemplars;
  j["method"] = method;
  j["epsilon"] = epsilon ? nlohmann::json(*epsilon) : nlohmann::json(nullptr);
  return j.dump();
}

ClusterAssignment AffinityPropagation(const SimilarityMatrix& sim,
                                      const AffinityOptions& opts) {
  const std::size_t n = sim.n;
  if (sim.s.size() != n * n) throw std::invalid_argument("matrix not square");
  if (!(opts.damping >= 0.5 && opts.damping < 1.0)) {
    throw std::invalid_argument("damping must lie in [0.5, 1)");
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (sim.at(i, j) != sim.at(j, i)) {
        throw std::invalid_argument("similarity matrix is not symmetric");
      }
    }
  }
  ClusterAssignment out;
  if (n == 0) return out;

  // Degenerate input: every similarity and preference equal. Message
  // passing never breaks the tie, so resolve it directly.
  bool all_equal = true;
  for (std::size_t i = 0; i < n && all_equal; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j && sim.at(i, j) != sim.at(0, n > 1 ? 1 : 0)) {
        all_equal = false;
        break;
      }
    }
  }
  if (n == 1 || (all_equal && sim.preference <= sim.at(0, n > 1 ? 1 : 0))) {
    out.labels.assign(n, 0);
    out.exemplars = {0};
    return out;
  }

  // Message passing runs on a copy carrying a seeded perturbation at machine
  // epsilon. Exactly symmetric ties (two points equally good as each other's
  // exemplar) otherwise keep both as exemplars forever.
  std::vector<double> work = sim.s;
  {
    std::mt19937_64 tie(0x5eedULL);
    std::normal_distribution<double> z(0.0, 1.0);
    constexpr double kEps = std::numeric_limits<double>::epsilon();
    constexpr double kTiny = std::numeric_limits<double>::min();
    for (double& v : work) v += (kEps * v + kTiny * 100.0) * z(tie);
  }
  auto S = [&](std::size_t i, std::size_t k) { return work[i * n + k]; };

  std::vector<double> r(n * n, 0.0), a(n * n, 0.0), tmp(n * n, 0.0);
  const double d = opts.damping;
  std::vector<int> same_count(n, 0);
  std::vector<char> prev(n, 0);
  bool converged = false;
  int it = 0;
  for (; it < opts.max_iter; ++it) {
    // Responsibilities.
    for (std::size_t i = 0; i < n; ++i) {
      double max1 = -std::numeric_limits<double>::infinity();
      double max2 = max1;
      std::size_t arg = 0;
      for (std::size_t k = 0; k < n; ++k) {
        const double v = a[i * n + k] + S(i, k);
        if (v > max1) {
          max2 = max1;
          max1 = v;
          arg = k;
        } else if (v > max2) {
          max2 = v;
        }
      }
      for (std::size_t k = 0; k < n; ++k) {
        const double fresh = S(i, k) - (k == arg ? max2 : max1);
        r[i * n + k] = d * r[i * n + k] + (1.0 - d) * fresh;
      }
    }
    // Availabilities.
    for (std::size_t k = 0; k < n; ++k) {
      double col = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double rp = i == k ? r[k * n + k] : std::max(0.0, r[i * n + k]);
        tmp[i * n + k] = rp;
        col += rp;
      }
      for (std::size_t i = 0; i < n; ++i) {
        double fresh = col - tmp[i * n + k];
        if (i != k) fresh = std::min(0.0, fresh);
        a[i * n + k] = d * a[i * n + k] + (1.0 - d) * fresh;
      }
    }
    // Convergence: every point's exemplar status unchanged for a full window.
    std::vector<char> flags(n);
    std::size_t k_count = 0;
    for (std::size_t i = 0; i < n; ++i) {
      flags[i] = (a[i * n + i] + r[i * n + i]) > 0.0;
      k_count += flags[i];
    }
    for (std::size_t i = 0; i < n; ++i) {
      same_count[i] = (it > 0 && flags[i] == prev[i]) ? same_count[i] + 1 : 1;
    }
    prev = flags;
    if (k_count > 0 && it + 1 >= opts.convergence_window) {
      bool stable = true;
      for (int c : same_count) stable &= c >= opts.convergence_window;
      if (stable) {
        converged = true;
        ++it;
        break;
      }
    }
  }
  out.iterations = it;
  out.converged = converged;

  std::vector<int> exemplars;
  for (std::size_t i = 0; i < n; ++i) {
    if (a[i * n + i] + r[i * n + i] > 0.0) exemplars.push_back(static_cast<int>(i));
  }
  if (exemplars.empty()) {
    out.converged = false;
    out.labels.assign(n, -1);
    return out;
  }
  // Refine each exemplar to the member with the largest in-cluster
  // similarity sum, then reassign.
  std::vector<int> c = ArgmaxOverExemplars(sim, exemplars);
  for (std::size_t e = 0; e < exemplars.size(); ++e) {
    double best = -std::numeric_limits<double>::infinity();
    int best_j = exemplars[e];
    for (std::size_t j = 0; j < n; ++j) {
      if (c[j] != static_cast<int>(e)) continue;
      double sum = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (c[i] == static_cast<int>(e)) sum += sim.at(i, j);
      }
      if (sum > best) {
        best = sum;
        best_j = static_cast<int>(j);
      }
    }
    exemplars[e] = best_j;
  }
  std::sort(exemplars.begin(), exemplars.end());
  exemplars.erase(std::unique(exemplars.begin(), exemplars.end()),
                  exemplars.end());
  out.labels = ArgmaxOverExemplars(sim, exemplars);
  out.exemplars = std::move(exemplars);
  return out;
}

ClusterAssignment KMeans(const PointSet& points, int k, std::uint64_t seed) {
  const std::size_t n = points.size();
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  if (static_cast<std::size_t>(k) > n) {
    throw std::invalid_argument("k exceeds point count");
  }
  const std::size_t dim = points[0].size();
  std::mt19937_64 rng(seed);

  // k-means++ seeding.
  PointSet centers;
  centers.push_back(points[std::uniform_int_distribution<std::size_t>(0, n - 1)(rng)]);
  std::vector<double> dist(n);
  while (centers.size() < static_cast<std::size_t>(k)) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& c : centers) best = std::min(best, SquaredDistance(points[i], c));
      dist[i] = best;
      total += best;
    }
    std::size_t pick = 0;
    if (total > 0.0) {
      double u = std::uniform_real_distribution<double>(0.0, total)(rng);
      for (; pick + 1 < n && u >= dist[pick]; ++pick) u -= dist[pick];
    } else {
      pick = std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
    }
    centers.push_back(points[pick]);
  }

  std::vector<int> labels(n, -1);
  int it = 0;
  bool changed = true;
  for (; it < 300 && changed; ++it) {
    changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      int best_c = 0;
      double best = std::numeric_limits<double>::infinity();
      for (int c = 0; c < k; ++c) {
        const double d = SquaredDistance(points[i], centers[c]);
        if (d < best) {
          best = d;
          best_c = c;
        }
      }
      if (labels[i] != best_c) {
        labels[i] = best_c;
        changed = true;
      }
    }
    std::vector<std::size_t> counts(k, 0);
    PointSet sums(k, std::vector<double>(dim, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
      ++counts[labels[i]];
      for (std::size_t t = 0; t < dim; ++t) sums[labels[i]][t] += points[i][t];
    }
    for (int c = 0; c < k; ++c) {
      if (counts[c] == 0) {
        // Re-seed an empty cluster with the point farthest from its center.
        std::size_t far = 0;
        double far_d = -1.0;
        for (std::size_t i = 0; i < n; ++i) {
          const double d = SquaredDistance(points[i], centers[labels[i]]);
          if (d > far_d) {
            far_d = d;
            far = i;
          }
        }
        centers[c] = points[far];
        labels[far] = c;
        changed = true;
        continue;
      }
      for (std::size_t t = 0; t < dim; ++t) centers[c][t] = sums[c][t] / counts[c];
    }
  }

  // Relabel in order of first appearance and pick exemplars.
  std::map<int, int> remap;
  for (int l : labels) remap.emplace(l, static_cast<int>(remap.size()));
  ClusterAssignment out;
  out.iterations = it;
  out.converged = !changed;
  out.labels.resize(n);
  std::vector<int> old_of(remap.size());
  for (auto [old_l, new_l] : remap) old_of[new_l] = old_l;
  for (std::size_t i = 0; i < n; ++i) out.labels[i] = remap[labels[i]];
  out.exemplars.resize(remap.size());
  for (std::size_t c = 0; c < remap.size(); ++c) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      if (out.labels[i] != static_cast<int>(c)) continue;
      const double d = SquaredDistance(points[i], centers[old_of[c]]);
      if (d < best) {
        best = d;
        out.exemplars[c] = static_cast<int>(i);
      }
    }
  }
  return out;
}

double SilhouetteScore(const PointSet& points, std::span<const int> labels) {
  const std::size_t n = points.size();
  if (labels.size() != n) throw std::invalid_argument("label count mismatch");
  std::map<int, std::size_t> sizes;
  for (int l : labels) ++sizes[l];
  if (sizes.size() < 2) {
    throw std::invalid_argument("silhouette needs at least two clusters");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    std::map<int, double> sum;
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) sum[labels[j]] += EuclideanDistance(points[i], points[j]);
    }
    const std::size_t own = sizes[labels[i]];
    // Singleton clusters score 0 by convention.
    if (own == 1) continue;
    const double a = sum[labels[i]] / static_cast<double>(own - 1);
    double b = std::numeric_limits<double>::infinity();
    for (auto [l, cnt] : sizes) {
      if (l != labels[i]) b = std::min(b, sum[l] / static_cast<double>(cnt));
    }
    const double denom = std::max(a, b);
    total += denom > 0.0 ? (b - a) / denom : 0.0;
  }
  return total / static_cast<double>(n);
}

double AdjustedRandIndex(std::span<const int> pred, std::span<const int> truth) {
  if (pred.size() != truth.size()) throw std::invalid_argument("length mismatch");
  auto pairs = [](double c) { return c * (c - 1.0) / 2.0; };
  std::map<std::pair<int, int>, double> joint;
  std::map<int, double> rows, cols;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    joint[{pred[i], truth[i]}] += 1;
    rows[pred[i]] += 1;
    cols[truth[i]] += 1;
  }
  double both_same = 0.0, same_pred = 0.0, same_truth = 0.0;
  for (auto& [_, c] : joint) both_same += pairs(c);
  for (auto& [_, c] : rows) same_pred += pairs(c);
  for (auto& [_, c] : cols) same_truth += pairs(c);
  const double b11 = both_same;
  const double b01 = same_pred - both_same;
  const double b10 = same_truth - both_same;
  const double b00 = pairs(static_cast<double>(pred.size())) - b11 - b01 - b10;
  const double denom = (b00 + b01) * (b01 + b11) + (b00 + b10) * (b10 + b11);
  if (denom == 0.0) {
    // Both partitions trivial (all-singletons or all-one-cluster).
    return (b01 == 0.0 && b10 == 0.0) ? 1.0 : 0.0;
  }
  return 2.0 * (b00 * b11 - b01 * b10) / denom;
}

double LabelEmd(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("class count mismatch");
  const double sa = std::accumulate(a.begin(), a.end(), 0.0);
  const double sb = std::accumulate(b.begin(), b.end(), 0.0);
  if (!(sa > 0.0) || !(sb > 0.0)) {
    throw std::invalid_argument("histogram has no mass");
  }
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d += std::fabs(a[i] / sa - b[i] / sb);
  return 0.5 * d;
}

}  // namespace sensecrypt
