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

#ifndef SENSECRYPT_CLUSTERING_H_
#define SENSECRYPT_CLUSTERING_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sensecrypt/sensitivity.h"

namespace sensecrypt {

using PointSet = std::vector<std::vector<double>>;

inline constexpr double kDefaultDpDelta = 1e-5;

// sigma = sqrt(2 ln(1.25 / delta)) / epsilon.
double GaussianSigma(double epsilon, double delta = kDefaultDpDelta);

struct DPParams {
  double epsilon = 1.0;
  double delta = kDefaultDpDelta;
  double clip_norm = 1.0;
  double sigma = 0.0;

  // Calibrated through the Gaussian mechanism.
  static DPParams Calibrated(double epsilon, double clip_norm,
                             double delta = kDefaultDpDelta);
  // No noise; only clipping is applied.
  static DPParams Noiseless(double clip_norm);
};

// Clips to l2 norm clip_norm, then adds N(0, sigma^2 clip_norm^2) per entry.
// Noise can make entries negative; they are kept.
SensitivityVector DpPerturb(const SensitivityVector& s, const DPParams& dp,
                            std::uint64_t seed);

double EuclideanDistance(std::span<const double> a, std::span<const double> b);

struct SimilarityMatrix {
  std::size_t n = 0;
  std::vector<double> s;  // row-major n x n; the diagonal holds preference
  double preference = 0.0;

  double at(std::size_t i, std::size_t j) const { return s[i * n + j]; }
  double& at(std::size_t i, std::size_t j) { return s[i * n + j]; }

  // s(i, j) = -||x_i - x_j||^2 off the diagonal; preference = median of the
  // off-diagonal entries.
  static SimilarityMatrix FromPoints(const PointSet& points);
  static double MedianOffDiagonal(const SimilarityMatrix& m);
  void SetPreference(double p);
};

struct ClusterAssignment {
  std::vector<int> labels;       // cluster id per point, -1 if unassigned
  std::vector<int> exemplars;    // exemplars[c] is the center of cluster c
  bool converged = true;
  int iterations = 0;

  std::size_t cluster_count() const { return exemplars.size(); }
  // Serialized form: {labels, exemplars, method, epsilon}.
  std::string ToJson(const std::string& method,
                     std::optional<double> epsilon) const;
};

struct AffinityOptions {
  double damping = 0.9;
  int max_iter = 200;
  int convergence_window = 15;
};

ClusterAssignment AffinityPropagation(const SimilarityMatrix& sim,
                                      const AffinityOptions& opts = {});

// Lloyd's algorithm with k-means++ seeding. Exemplars are the members
// closest to each final centroid.
ClusterAssignment KMeans(const PointSet& points, int k, std::uint64_t seed);

// Mean silhouette over all points. Requires at least two clusters.
double SilhouetteScore(const PointSet& points, std::span<const int> labels);

// Pair-counting adjusted Rand index.
double AdjustedRandIndex(std::span<const int> pred, std::span<const int> truth);

// Wasserstein-1 between two label distributions under the unit discrete
// ground metric. Inputs are normalized internally.
double LabelEmd(std::span<const double> a, std::span<const double> b);

}  // namespace sensecrypt

#endif  // SENSECRYPT_CLUSTERING_H_
