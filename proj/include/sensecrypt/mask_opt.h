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

#ifndef SENSECRYPT_MASK_OPT_H_
#define SENSECRYPT_MASK_OPT_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sensecrypt/byte_io.h"
#include "sensecrypt/sensitivity.h"

namespace sensecrypt {

struct EncryptionMask {
  std::vector<std::uint8_t> bits;  // 1 = encrypt

  EncryptionMask() = default;
  explicit EncryptionMask(std::size_t n) : bits(n, 0) {}

  std::size_t size() const { return bits.size(); }
  std::size_t Popcount() const;
  std::vector<std::size_t> Indices() const;
  bool operator[](std::size_t k) const { return bits[k] != 0; }
  friend bool operator==(const EncryptionMask&, const EncryptionMask&) = default;

  // u64 length, u32 run count, then u32 run lengths alternating zeros/ones
  // starting with a (possibly empty) zero run.
  Bytes Serialize() const;
  static EncryptionMask Deserialize(std::span<const std::uint8_t> b);
};

struct SecurityParams {
  double B = 1.3;
  double C = 0.7;
  double eta_mi = 2.0;  // bits
  double beta1 = 1.0;
  double beta2 = 1.0;

  void Validate() const;

  static SecurityParams FmnistPreset() { return {1.3, 0.7, 2.0, 1.0, 1.0}; }
  static SecurityParams CifarPreset() { return {2.0, 0.5, 2.0, 1.0, 1.0}; }
  static SecurityParams SweepOptimum() { return {1.5, 0.3, 2.0, 1.0, 1.0}; }
};

struct MIEstimatorConfig {
  int bin_count = 64;
};

// Required protected-sensitivity fraction: 1 - C exp(-B alpha).
double SecurityThreshold(double alpha, const SecurityParams& params);

// floor(alpha * n), robust to representation error in alpha.
std::size_t BudgetCap(double alpha, std::size_t n);

// Plug-in estimate from the joint 2-D histogram of (w_k, masked_k), log
// base 2. Both axes share equal-width bins spanning [min(w, 0), max(w, 0)].
double MutualInformation(std::span<const double> w,
                         std::span<const double> masked,
                         const MIEstimatorConfig& cfg = {});
// MI between w and (1 - mask) * w.
double MaskMutualInformation(std::span<const double> w,
                             const EncryptionMask& mask,
                             const MIEstimatorConfig& cfg = {});

// sum(mask * gamma) / sum(gamma), summed in index order.
double Coverage(std::span<const double> gamma, const EncryptionMask& mask);
// beta1 * popcount / N - beta2 * coverage; lower is better.
double ScalarizedObjective(std::span<const double> gamma,
                           const EncryptionMask& mask,
                           const SecurityParams& params);

// Total order used by every solver: objective (1e-12 tolerance), then fewer
// bits, then the lexicographically smaller ascending index list. Returns
// true when candidate `a` is strictly preferred over `b`.
bool MaskPreferred(double objective_a, const EncryptionMask& a,
                   double objective_b, const EncryptionMask& b);

enum class SolveStatus {
  kOptimal,
  kFeasible,  // feasible, optimality not proven (search budget exhausted)
  kInfeasibleSecurity,
  kInfeasibleMutualInformation,
};

std::string ToString(SolveStatus s);

struct MaskSolution {
  EncryptionMask mask;
  SolveStatus status = SolveStatus::kOptimal;
  double objective = 0.0;
  double coverage = 0.0;
  double mutual_information = 0.0;
  double threshold = 0.0;
  std::size_t cap = 0;
  std::size_t nodes = 0;

  bool feasible() const {
    return status == SolveStatus::kOptimal || status == SolveStatus::kFeasible;
  }
};

struct SolveOptions {
  std::size_t node_limit = 2'000'000;
};

// Minimizes the scalarized objective under the budget, security-level and
// MI constraints.
MaskSolution SolveMask(std::span<const double> gamma, double alpha,
                       const SecurityParams& params, std::span<const double> w,
                       const MIEstimatorConfig& cfg = {},
                       const SolveOptions& opts = {});

inline constexpr std::size_t kBruteForceMaxParams = 24;

// Exhaustive enumeration of all 2^N masks. Throws for N > 24.
MaskSolution BruteForceMask(std::span<const double> gamma, double alpha,
                            const SecurityParams& params,
                            std::span<const double> w,
                            const MIEstimatorConfig& cfg = {});

enum class Strategy { kHigh, kLow, kRandom };
Strategy ParseStrategy(const std::string& s);
std::string ToString(Strategy s);

// Exactly floor(ratio * N) bits by descending gamma, ascending gamma, or a
// seeded uniform sample.
EncryptionMask StrategyMask(std::span<const double> gamma, double ratio,
                            Strategy strategy, std::uint64_t seed);

// Indices sorted by descending gamma, ties by lower index.
std::vector<std::size_t> DescendingOrder(std::span<const double> gamma);
// The `count` highest-gamma indices as a mask.
EncryptionMask TopMask(std::span<const double> gamma, std::size_t count);

}  // namespace sensecrypt

#endif  // SENSECRYPT_MASK_OPT_H_
