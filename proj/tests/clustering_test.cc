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
#include <random>

#include <gtest/gtest.h>

namespace sensecrypt {
namespace {

// Pair-enumeration form of the adjusted Rand index.
double PairwiseAri(const std::vector<int>& a, const std::vector<int>& b) {
  double ss = 0, sd = 0, ds = 0, dd = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = i + 1; j < a.size(); ++j) {
      const bool x = a[i] == a[j];
      const bool y = b[i] == b[j];
      if (x && y) ss += 1;
      else if (x) sd += 1;
      else if (y) ds += 1;
      else dd += 1;
    }
  }
  const double den = (ss + sd) * (sd + dd) + (ss + ds) * (ds + dd);
  if (den == 0.0) return 1.0;
  return 2.0 * (ss * dd - sd * ds) / den;
}

// Same partition up to relabeling.
bool SamePartition(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a.size(); ++j)
      if ((a[i] == a[j]) != (b[i] == b[j])) return false;
  return true;
}

// Exhaustive search over exemplar subsets maximizing the net similarity.
std::vector<int> BestExemplarPartition(const SimilarityMatrix& m) {
  const std::size_t n = m.n;
  double best = -std::numeric_limits<double>::infinity();
  std::vector<int> best_labels;
  for (std::uint32_t set = 1; set < (1u << n); ++set) {
    double total = 0.0;
    std::vector<int> labels(n);
    for (std::size_t i = 0; i < n; ++i) {
      if (set >> i & 1u) {
        total += m.at(i, i);
        labels[i] = static_cast<int>(i);
        continue;
      }
      double s = -std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < n; ++k) {
        if ((set >> k & 1u) && m.at(i, k) > s) {
          s = m.at(i, k);
          labels[i] = static_cast<int>(k);
        }
      }
      total += s;
    }
    if (total > best) {
      best = total;
      best_labels = labels;
    }
  }
  return best_labels;
}

PointSet Blobs(int clusters, int per, double spread, std::uint64_t seed,
               std::vector<int>* truth) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> z;
  PointSet pts;
  for (int c = 0; c < clusters; ++c) {
    for (int j = 0; j < per; ++j) {
      pts.push_back({10.0 * c + spread * z(gen), -7.0 * c + spread * z(gen)});
      if (truth) truth->push_back(c);
    }
  }
  return pts;
}

TEST(Clustering, EuclideanDistance) {
  const std::vector<double> a = {0.0, 0.0};
  const std::vector<double> b = {3.0, 4.0};
  EXPECT_DOUBLE_EQ(EuclideanDistance(a, b), 5.0);
  EXPECT_DOUBLE_EQ(EuclideanDistance(b, b), 0.0);
}

TEST(Clustering, GaussianSigmaMatchesClosedForm) {
  EXPECT_NEAR(GaussianSigma(0.1, 1e-5), 48.4481, 1e-3);
  EXPECT_NEAR(GaussianSigma(1.0), std::sqrt(2.0 * std::log(1.25e5)), 1e-12);
  const auto dp = DPParams::Calibrated(0.5, 2.0);
  EXPECT_DOUBLE_EQ(dp.sigma, GaussianSigma(0.5));
  EXPECT_DOUBLE_EQ(dp.clip_norm, 2.0);
}

TEST(Clustering, NoiselessPerturbOnlyClips) {
  const SensitivityVector s{{3.0, 4.0}};
  const auto out = DpPerturb(s, DPParams::Noiseless(1.0), 9);
  EXPECT_NEAR(out.gamma[0], 0.6, 1e-12);
  EXPECT_NEAR(out.gamma[1], 0.8, 1e-12);
  const auto kept = DpPerturb(s, DPParams::Noiseless(10.0), 9);
  EXPECT_EQ(kept.gamma, s.gamma);
}

TEST(Clustering, DpNoiseHasCalibratedSpread) {
  const SensitivityVector s{{0.1, 0.2, 0.3}};
  const auto dp = DPParams::Calibrated(1.0, 0.5);
  const double expected = dp.sigma * dp.clip_norm;
  double sum = 0.0, sq = 0.0;
  const int trials = 4000;
  for (int t = 0; t < trials; ++t) {
    const auto out = DpPerturb(s, dp, 1000 + t);
    const double e = out.gamma[1] - 0.2;
    sum += e;
    sq += e * e;
  }
  const double mean = sum / trials;
  const double sd = std::sqrt(sq / trials - mean * mean);
  EXPECT_NEAR(sd / expected, 1.0, 0.05);
  EXPECT_NEAR(mean / expected, 0.0, 0.1);
}

TEST(Clustering, DpPerturbDeterministicPerSeed) {
  const SensitivityVector s{{1.0, 2.0, 3.0, 4.0}};
  const auto dp = DPParams::Calibrated(0.2, 1.0);
  EXPECT_EQ(DpPerturb(s, dp, 3).gamma, DpPerturb(s, dp, 3).gamma);
  EXPECT_NE(DpPerturb(s, dp, 3).gamma, DpPerturb(s, dp, 4).gamma);
}

TEST(Clustering, SimilarityFromPoints) {
  const PointSet pts = {{0.0}, {1.0}, {3.0}};
  const auto m = SimilarityMatrix::FromPoints(pts);
  EXPECT_DOUBLE_EQ(m.at(0, 1), -1.0);
  EXPECT_DOUBLE_EQ(m.at(0, 2), -9.0);
  EXPECT_DOUBLE_EQ(m.at(2, 1), -4.0);
  // Off-diagonal entries are {-1,-1,-9,-9,-4,-4}; median -4.
  EXPECT_DOUBLE_EQ(m.preference, -4.0);
  EXPECT_DOUBLE_EQ(m.at(1, 1), -4.0);
}

TEST(Clustering, AffinityMatchesExhaustiveExemplarSearch) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto pts = Blobs(2, 3, 0.5, seed, nullptr);
    const auto m = SimilarityMatrix::FromPoints(pts);
    const auto ap = AffinityPropagation(m, {0.5, 400, 30});
    ASSERT_TRUE(ap.converged) << seed;
    EXPECT_TRUE(SamePartition(ap.labels, BestExemplarPartition(m))) << seed;
  }
}

TEST(Clustering, AffinityRecoversSeparatedBlobs) {
  std::vector<int> truth;
  const auto pts = Blobs(3, 8, 0.3, 21, &truth);
  const auto ap = AffinityPropagation(SimilarityMatrix::FromPoints(pts));
  EXPECT_EQ(ap.cluster_count(), 3u);
  EXPECT_DOUBLE_EQ(AdjustedRandIndex(ap.labels, truth), 1.0);
  for (std::size_t c = 0; c < ap.exemplars.size(); ++c) {
    EXPECT_EQ(ap.labels[ap.exemplars[c]], static_cast<int>(c));
  }
}

TEST(Clustering, IdenticalPointsFormOneCluster) {
  const PointSet pts(6, std::vector<double>{1.5, -2.0});
  const auto ap = AffinityPropagation(SimilarityMatrix::FromPoints(pts));
  EXPECT_EQ(ap.cluster_count(), 1u);
  for (int l : ap.labels) EXPECT_EQ(l, 0);
}

TEST(Clustering, AffinityInvariantToConstantShift) {
  const auto pts = Blobs(3, 5, 0.4, 8, nullptr);
  auto m = SimilarityMatrix::FromPoints(pts);
  const auto base = AffinityPropagation(m);
  for (auto& v : m.s) v -= 17.0;
  m.preference -= 17.0;
  const auto shifted = AffinityPropagation(m);
  EXPECT_TRUE(SamePartition(base.labels, shifted.labels));
}

TEST(Clustering, AffinityRejectsNonSquare) {
  SimilarityMatrix m;
  m.n = 3;
  m.s.assign(4, 0.0);
  EXPECT_THROW(AffinityPropagation(m), std::invalid_argument);
}

TEST(Clustering, AdjustedRandMatchesPairEnumeration) {
  std::mt19937_64 gen(17);
  std::uniform_int_distribution<int> lab(0, 3);
  for (int t = 0; t < 50; ++t) {
    std::vector<int> a(15), b(15);
    for (auto& v : a) v = lab(gen);
    for (auto& v : b) v = lab(gen);
    EXPECT_NEAR(AdjustedRandIndex(a, b), PairwiseAri(a, b), 1e-12);
  }
  const std::vector<int> x = {0, 0, 1, 1, 2};
  const std::vector<int> y = {5, 5, 9, 9, 7};
  EXPECT_DOUBLE_EQ(AdjustedRandIndex(x, y), 1.0);
}

TEST(Clustering, SilhouetteHandValue) {
  const PointSet pts = {{0.0}, {1.0}, {4.0}, {5.0}};
  const std::vector<int> labels = {0, 0, 1, 1};
  const double outer = 1.0 - 1.0 / 4.5;
  const double inner = 1.0 - 1.0 / 3.5;
  EXPECT_NEAR(SilhouetteScore(pts, labels), (outer + inner) / 2.0, 1e-12);
  const std::vector<int> one = {0, 0, 0, 0};
  EXPECT_THROW(SilhouetteScore(pts, one), std::invalid_argument);
}

TEST(Clustering, LabelEmdIsTotalVariation) {
  const std::vector<double> a = {1.0, 0.0, 0.0};
  const std::vector<double> b = {0.0, 0.0, 1.0};
  EXPECT_DOUBLE_EQ(LabelEmd(a, b), 1.0);
  const std::vector<double> c = {2.0, 1.0, 1.0};
  const std::vector<double> d = {1.0, 1.0, 2.0};
  EXPECT_NEAR(LabelEmd(c, d), 0.25, 1e-12);
  EXPECT_DOUBLE_EQ(LabelEmd(c, c), 0.0);
}

TEST(Clustering, KMeansRecoversBlobs) {
  std::vector<int> truth;
  const auto pts = Blobs(4, 10, 0.5, 5, &truth);
  const auto km = KMeans(pts, 4, 99);
  EXPECT_EQ(km.cluster_count(), 4u);
  EXPECT_DOUBLE_EQ(AdjustedRandIndex(km.labels, truth), 1.0);
  for (std::size_t c = 0; c < km.exemplars.size(); ++c) {
    EXPECT_EQ(km.labels[km.exemplars[c]], static_cast<int>(c));
  }
}

TEST(Clustering, JsonCarriesLabelsAndEpsilon) {
  ClusterAssignment a;
  a.labels = {0, 1, 0};
  a.exemplars = {2, 1};
  const auto js = a.ToJson("affinity", 0.25);
  EXPECT_NE(js.find("\"labels\""), std::string::npos);
  EXPECT_NE(js.find("0.25"), std::string::npos);
  EXPECT_NE(a.ToJson("affinity", std::nullopt).find("null"), std::string::npos);
}

}  // namespace
}  // namespace sensecrypt
