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

#include "sensecrypt/mask_opt.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <stdexcept>

namespace sensecrypt {
namespace {

constexpr double kObjectiveTolerance = 1e-12;
constexpr double kBoundaryTolerance = 1e-9;

// Equal-width bins over [min(w, 0), max(w, 0)], shared by both histogram
// axes so that the binning of w never depends on the mask.
struct Binning {
  double lo = 0.0;
  double hi = 0.0;
  int bins = 1;

  int Of(double v) const {
    if (!(hi > lo)) return 0;
    const double t = (v - lo) / (hi - lo) * bins;
    const int idx = static_cast<int>(std::floor(t));
    return std::clamp(idx, 0, bins - 1);
  }
};

Binning MakeBinning(std::span<const double> w, int bins) {
  Binning b;
  b.bins = bins;
  for (double v : w) {
    b.lo = std::min(b.lo, v);
    b.hi = std::max(b.hi, v);
  }
  return b;
}

void ValidateProblem(std::span<const double> gamma, double alpha,
                     const SecurityParams& params, std::span<const double> w,
                     const MIEstimatorConfig& cfg) {
  params.Validate();
  if (cfg.bin_count < 2) throw std::invalid_argument("bin_count must be >= 2");
  if (gamma.size() != w.size()) {
    throw std::invalid_argument("sensitivity/parameter length mismatch");
  }
  if (gamma.empty()) throw std::invalid_argument("empty parameter vector");
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw std::invalid_argument("alpha must lie in (0, 1]");
  }
  double total = 0.0;
  for (double g : gamma) {
    if (!(g >= 0.0) || !std::isfinite(g)) {
      throw std::invalid_argument("sensitivities must be finite and >= 0");
    }
    total += g;
  }
  if (!(total > 0.0)) throw std::invalid_argument("all-zero sensitivity");
}

double Entropy2Term(double q) { return q > 0.0 ? -q * std::log2(q) : 0.0; }

// MI contributed by bin j (not the zero bin) with c of its n items masked.
double BinTerm(std::size_t n, std::size_t c, std::size_t total) {
  const double nn = static_cast<double>(n);
  const double cc = static_cast<double>(c);
  const double tt = static_cast<double>(total);
  double v = (nn - cc) / tt * std::log2(tt / nn);
  if (c > 0) v += cc / tt * std::log2(cc / nn);
  return v;
}

MaskSolution Finish(std::span<const double> gamma, std::span<const double> w,
                    const SecurityParams& params, const MIEstimatorConfig& cfg,
                    EncryptionMask mask, SolveStatus status, double tau,
                    std::size_t cap) {
  MaskSolution s;
  s.objective = ScalarizedObjective(gamma, mask, params);
  s.coverage = Coverage(gamma, mask);
  s.mutual_information = MaskMutualInformation(w, mask, cfg);
  s.mask = std::move(mask);
  s.status = status;
  s.threshold = tau;
  s.cap = cap;
  return s;
}

bool CoverageMeets(double covered_sum, double total, double tau,
                   std::span<const double> gamma, const EncryptionMask* mask) {
  const double cov = covered_sum / total;
  if (std::fabs(cov - tau) > kBoundaryTolerance || mask == nullptr) {
    return cov >= tau;
  }
  return Coverage(gamma, *mask) >= tau;
}

// Exhaustive search over per-bin masked counts. Within a bin, any fixed
// count is best served by the bin's highest-gamma items, so the search space
// collapses from 2^N masks to prod(n_j + 1) count profiles.
class ProfileSearch {
 public:
  ProfileSearch(std::span<const double> gamma, std::span<const double> w,
                const SecurityParams& params, const MIEstimatorConfig& cfg,
                double tau, std::size_t cap, std::size_t node_limit)
      : gamma_(gamma),
        w_(w),
        params_(params),
        cfg_(cfg),
        tau_(tau),
        cap_(cap),
        node_limit_(node_limit),
        n_(gamma.size()) {
    total_ = std::accumulate(gamma.begin(), gamma.end(), 0.0);
    const Binning binning = MakeBinning(w, cfg.bin_count);
    zero_bin_ = binning.Of(0.0);
    std::vector<std::vector<std::size_t>> members(cfg.bin_count);
    for (std::size_t k : DescendingOrder(gamma)) {
      members[binning.Of(w[k])].push_back(k);
    }
    for (int j = 0; j < cfg.bin_count; ++j) {
      if (members[j].empty()) continue;
      Bin b;
      b.id = j;
      b.items = std::move(members[j]);
      b.gamma_prefix.assign(b.items.size() + 1, 0.0);
      for (std::size_t c = 0; c < b.items.size(); ++c) {
        b.gamma_prefix[c + 1] = b.gamma_prefix[c] + gamma[b.items[c]];
      }
      bins_.push_back(std::move(b));
    }
    std::stable_sort(bins_.begin(), bins_.end(), [](const Bin& a, const Bin& b) {
      return a.gamma_prefix.back() > b.gamma_prefix.back();
    });
    for (const Bin& b : bins_) {
      if (b.id == zero_bin_) zero_count_ = b.items.size();
    }

    // Suffix bounds per depth.
    const std::size_t depth = bins_.size();
    rem_negative_.assign(depth + 1, 0.0);
    rem_nonzero_items_.assign(depth + 1, 0);
    rem_top_.assign(depth + 1, {0.0});
    std::vector<double> pool;
    for (std::size_t d = depth; d-- > 0;) {
      const Bin& b = bins_[d];
      double neg = 0.0;
      for (std::size_t k : b.items) {
        neg += std::min(0.0, ItemValue(k));
        pool.push_back(gamma[k]);
      }
      rem_negative_[d] = rem_negative_[d + 1] + neg;
      rem_nonzero_items_[d] =
          rem_nonzero_items_[d + 1] + (b.id == zero_bin_ ? 0 : b.items.size());
      std::vector<double> sorted = pool;
      std::sort(sorted.begin(), sorted.end(), std::greater<>());
      auto& top = rem_top_[d];
      top.assign(sorted.size() + 1, 0.0);
      for (std::size_t i = 0; i < sorted.size(); ++i) top[i + 1] = top[i] + sorted[i];
    }
    counts_.assign(depth, 0);
  }

  void SetIncumbent(const EncryptionMask& m) {
    best_mask_ = m;
    best_objective_ = ScalarizedObjective(gamma_, m, params_);
    has_best_ = true;
  }

  void Run() { Visit(0, 0, 0.0, 0.0, 0); }

  bool has_best() const { return has_best_; }
  bool truncated() const { return truncated_; }
  std::size_t nodes() const { return nodes_; }
  const EncryptionMask& best() const { return best_mask_; }

 private:
  struct Bin {
    int id = 0;
    std::vector<std::size_t> items;  // descending gamma
    std::vector<double> gamma_prefix;
  };

  double ItemValue(std::size_t k) const {
    return params_.beta1 / static_cast<double>(n_) -
           params_.beta2 * gamma_[k] / total_;
  }

  double Phi(std::size_t masked_outside_zero) const {
    return Entropy2Term(static_cast<double>(zero_count_ + masked_outside_zero) /
                        static_cast<double>(n_));
  }

  EncryptionMask BuildMask() const {
    EncryptionMask m(n_);
    for (std::size_t d = 0; d < bins_.size(); ++d) {
      for (std::size_t c = 0; c < counts_[d]; ++c) m.bits[bins_[d].items[c]] = 1;
    }
    return m;
  }

  void Visit(std::size_t d, std::size_t used, double covered, double bin_terms,
             std::size_t masked_outside_zero) {
    if (truncated_) return;
    if (++nodes_ > node_limit_) {
      truncated_ = true;
      return;
    }
    const double objective_now =
        params_.beta1 * static_cast<double>(used) / static_cast<double>(n_) -
        params_.beta2 * covered / total_;
    if (d == bins_.size()) {
      Leaf(used, covered, bin_terms, masked_outside_zero, objective_now);
      return;
    }
    const std::size_t rem = cap_ - used;
    const auto& top = rem_top_[d];
    const double max_cover = covered + top[std::min(rem, top.size() - 1)];
    if (max_cover / total_ < tau_ - kBoundaryTolerance) return;
    if (has_best_ &&
        objective_now + rem_negative_[d] > best_objective_ + kObjectiveTolerance) {
      return;
    }
    const std::size_t reach =
        masked_outside_zero + std::min(rem, rem_nonzero_items_[d]);
    const double mi_floor =
        bin_terms + std::min(Phi(masked_outside_zero), Phi(reach));
    if (mi_floor > params_.eta_mi + kBoundaryTolerance) return;

    const Bin& b = bins_[d];
    const bool is_zero = b.id == zero_bin_;
    const std::size_t n = b.items.size();
    for (std::size_t c = std::min(n, rem) + 1; c-- > 0;) {
      counts_[d] = c;
      Visit(d + 1, used + c, covered + b.gamma_prefix[c],
            bin_terms + (is_zero ? 0.0 : BinTerm(n, c, n_)),
            masked_outside_zero + (is_zero ? 0 : c));
    }
    counts_[d] = 0;
  }

  void Leaf(std::size_t used, double covered, double bin_terms,
            std::size_t masked_outside_zero, double objective) {
    if (has_best_ && objective > best_objective_ + kObjectiveTolerance) return;
    const double cov = covered / total_;
    std::optional<EncryptionMask> mask;
    if (std::fabs(cov - tau_) <= kBoundaryTolerance) {
      mask = BuildMask();
      if (Coverage(gamma_, *mask) < tau_) return;
    } else if (cov < tau_) {
      return;
    }
    const double mi = bin_terms + Phi(masked_outside_zero);
    if (std::fabs(mi - params_.eta_mi) <= kBoundaryTolerance) {
      if (!mask) mask = BuildMask();
      if (MaskMutualInformation(w_, *mask, cfg_) > params_.eta_mi) return;
    } else if (mi > params_.eta_mi) {
      return;
    }
    (void)used;
    if (has_best_ && objective >= best_objective_ - kObjectiveTolerance) {
      if (!mask) mask = BuildMask();
      objective = ScalarizedObjective(gamma_, *mask, params_);
      if (!MaskPreferred(objective, *mask, best_objective_, best_mask_)) return;
    }
    if (!mask) mask = BuildMask();
    best_mask_ = std::move(*mask);
    best_objective_ = ScalarizedObjective(gamma_, best_mask_, params_);
    has_best_ = true;
  }

  std::span<const double> gamma_;
  std::span<const double> w_;
  const SecurityParams& params_;
  const MIEstimatorConfig& cfg_;
  double tau_;
  std::size_t cap_;
  std::size_t node_limit_;
  std::size_t n_;
  double total_ = 0.0;
  int zero_bin_ = 0;
  std::size_t zero_count_ = 0;
  std::vector<Bin> bins_;
  std::vector<double> rem_negative_;
  std::vector<std::size_t> rem_nonzero_items_;
  std::vector<std::vector<double>> rem_top_;
  std::vector<std::size_t> counts_;

  bool has_best_ = false;
  bool truncated_ = false;
  std::size_t nodes_ = 0;
  EncryptionMask best_mask_;
  double best_objective_ = 0.0;
};

}  // namespace

std::size_t EncryptionMask::Popcount() const {
  return static_cast<std::size_t>(std::count(bits.begin(), bits.end(), 1));
}

std::vector<std::size_t> EncryptionMask::Indices() const {
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < bits.size(); ++k) {
    if (bits[k]) out.push_back(k);
  }
  return out;
}

Bytes EncryptionMask::Serialize() const {
  std::vector<std::uint32_t> runs;
  std::uint8_t current = 0;
  std::uint32_t run = 0;
  for (std::uint8_t b : bits) {
    if (b != current) {
      runs.push_back(run);
      run = 0;
      current = b;
    }
    ++run;
  }
  runs.push_back(run);
  ByteWriter w;
  w.PutU64(bits.size());
  w.PutU32(static_cast<std::uint32_t>(runs.size()));
  for (std::uint32_t r : runs) w.PutU32(r);
  return w.Take();
}

EncryptionMask EncryptionMask::Deserialize(std::span<const std::uint8_t> b) {
  ByteReader r(b);
  const std::uint64_t n = r.GetU64();
  const std::uint32_t count = r.GetU32();
  EncryptionMask m;
  m.bits.reserve(n);
  std::uint8_t current = 0;
  for (std::uint32_t i = 0; i < count; ++i) {
    const std::uint32_t run = r.GetU32();
    if (m.bits.size() + run > n) throw DecodeError("mask runs exceed length");
    m.bits.insert(m.bits.end(), run, current);
    current ^= 1;
  }
  if (m.bits.size() != n) throw DecodeError("mask runs do not cover length");
  return m;
}

void SecurityParams::Validate() const {
  if (!(B > 0.0)) throw std::invalid_argument("B must be > 0");
  if (!(C > 0.0 && C <= 1.0)) throw std::invalid_argument("C must lie in (0, 1]");
  if (!(eta_mi >= 0.0)) throw std::invalid_argument("eta_mi must be >= 0");
  if (!(beta1 > 0.0) || !(beta2 > 0.0)) {
    throw std::invalid_argument("scalarization weights must be > 0");
  }
}

double SecurityThreshold(double alpha, const SecurityParams& params) {
  return 1.0 - params.C * std::exp(-params.B * alpha);
}

std::size_t BudgetCap(double alpha, std::size_t n) {
  return static_cast<std::size_t>(
      std::floor(alpha * static_cast<double>(n) + 1e-9));
}

double MutualInformation(std::span<const double> w,
                         std::span<const double> masked,
                         const MIEstimatorConfig& cfg) {
  if (w.size() != masked.size()) throw std::invalid_argument("length mismatch");
  if (cfg.bin_count < 2) throw std::invalid_argument("bin_count must be >= 2");
  const std::size_t n = w.size();
  if (n == 0) return 0.0;
  const Binning binning = MakeBinning(w, cfg.bin_count);
  const int bins = cfg.bin_count;
  std::vector<std::size_t> px(bins, 0), py(bins, 0);
  std::vector<int> keys(n);
  for (std::size_t k = 0; k < n; ++k) {
    const int bx = binning.Of(w[k]);
    const int by = binning.Of(masked[k]);
    ++px[bx];
    ++py[by];
    keys[k] = bx * bins + by;
  }
  std::sort(keys.begin(), keys.end());
  const double nn = static_cast<double>(n);
  double mi = 0.0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && keys[j] == keys[i]) ++j;
    const double c = static_cast<double>(j - i);
    const double cx = static_cast<double>(px[keys[i] / bins]);
    const double cy = static_cast<double>(py[keys[i] % bins]);
    mi += c / nn * std::log2(c * nn / (cx * cy));
    i = j;
  }
  return std::max(0.0, mi);
}

double MaskMutualInformation(std::span<const double> w,
                             const EncryptionMask& mask,
                             const MIEstimatorConfig& cfg) {
  if (mask.size() != w.size()) throw std::invalid_argument("length mismatch");
  std::vector<double> masked(w.begin(), w.end());
  for (std::size_t k = 0; k < masked.size(); ++k) {
    if (mask[k]) masked[k] = 0.0;
  }
  return MutualInformation(w, masked, cfg);
}

double Coverage(std::span<const double> gamma, const EncryptionMask& mask) {
  if (mask.size() != gamma.size()) throw std::invalid_argument("length mismatch");
  double total = 0.0, covered = 0.0;
  for (std::size_t k = 0; k < gamma.size(); ++k) {
    total += gamma[k];
    if (mask[k]) covered += gamma[k];
  }
  return total > 0.0 ? covered / total : 0.0;
}

double ScalarizedObjective(std::span<const double> gamma,
                           const EncryptionMask& mask,
                           const SecurityParams& params) {
  return params.beta1 * static_cast<double>(mask.Popcount()) /
             static_cast<double>(mask.size()) -
         params.beta2 * Coverage(gamma, mask);
}

bool MaskPreferred(double objective_a, const EncryptionMask& a,
                   double objective_b, const EncryptionMask& b) {
  if (objective_a < objective_b - kObjectiveTolerance) return true;
  if (objective_a > objective_b + kObjectiveTolerance) return false;
  const std::size_t pa = a.Popcount(), pb = b.Popcount();
  if (pa != pb) return pa < pb;
  const auto ia = a.Indices(), ib = b.Indices();
  return std::lexicographical_compare(ia.begin(), ia.end(), ib.begin(), ib.end());
}

std::string ToString(SolveStatus s) {
  switch (s) {
    case SolveStatus::kOptimal: return "optimal";
    case SolveStatus::kFeasible: return "feasible";
    case SolveStatus::kInfeasibleSecurity: return "infeasible_security";
    case SolveStatus::kInfeasibleMutualInformation: return "infeasible_mi";
  }
  return "unknown";
}

std::vector<std::size_t> DescendingOrder(std::span<const double> gamma) {
  std::vector<std::size_t> order(gamma.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return gamma[a] > gamma[b];
  });
  return order;
}

EncryptionMask TopMask(std::span<const double> gamma, std::size_t count) {
  EncryptionMask m(gamma.size());
  const auto order = DescendingOrder(gamma);
  for (std::size_t i = 0; i < std::min(count, order.size()); ++i) {
    m.bits[order[i]] = 1;
  }
  return m;
}

MaskSolution SolveMask(std::span<const double> gamma, double alpha,
                       const SecurityParams& params, std::span<const double> w,
                       const MIEstimatorConfig& cfg, const SolveOptions& opts) {
  ValidateProblem(gamma, alpha, params, w, cfg);
  const std::size_t n = gamma.size();
  const double total = std::accumulate(gamma.begin(), gamma.end(), 0.0);
  const std::size_t cap = BudgetCap(alpha, n);
  const double tau = SecurityThreshold(alpha, params);
  const auto order = DescendingOrder(gamma);

  // Without the MI constraint the objective is separable, so for each count
  // m the top-m prefix dominates every other m-subset.
  std::vector<double> prefix(cap + 1, 0.0);
  for (std::size_t m = 0; m < cap; ++m) prefix[m + 1] = prefix[m] + gamma[order[m]];
  auto prefix_mask = [&](std::size_t m) {
    EncryptionMask mask(n);
    for (std::size_t i = 0; i < m; ++i) mask.bits[order[i]] = 1;
    return mask;
  };
  auto prefix_feasible = [&](std::size_t m) {
    if (std::fabs(prefix[m] / total - tau) > kBoundaryTolerance) {
      return prefix[m] / total >= tau;
    }
    EncryptionMask mask = prefix_mask(m);
    return CoverageMeets(prefix[m], total, tau, gamma, &mask);
  };

  std::optional<std::size_t> best_m;
  double best_obj = 0.0;
  for (std::size_t m = 0; m <= cap; ++m) {
    if (!prefix_feasible(m)) continue;
    const double obj = params.beta1 * static_cast<double>(m) / static_cast<double>(n) -
                       params.beta2 * prefix[m] / total;
    if (!best_m || obj < best_obj - kObjectiveTolerance) {
      best_m = m;
      best_obj = obj;
    }
  }
  if (!best_m) {
    return Finish(gamma, w, params, cfg, prefix_mask(cap),
                  SolveStatus::kInfeasibleSecurity, tau, cap);
  }
  EncryptionMask relaxed = prefix_mask(*best_m);
  if (MaskMutualInformation(w, relaxed, cfg) <= params.eta_mi) {
    return Finish(gamma, w, params, cfg, std::move(relaxed),
                  SolveStatus::kOptimal, tau, cap);
  }

  // MI binds. Greedy repair: extend the prefix along descending gamma until
  // the MI constraint holds; its result seeds the exact profile search.
  ProfileSearch search(gamma, w, params, cfg, tau, cap, opts.node_limit);
  for (std::size_t m = *best_m + 1; m <= cap; ++m) {
    EncryptionMask candidate = prefix_mask(m);
    if (MaskMutualInformation(w, candidate, cfg) <= params.eta_mi) {
      search.SetIncumbent(candidate);
      break;
    }
  }
  search.Run();
  if (!search.has_best()) {
    MaskSolution s = Finish(gamma, w, params, cfg, prefix_mask(cap),
                            SolveStatus::kInfeasibleMutualInformation, tau, cap);
    s.nodes = search.nodes();
    return s;
  }
  MaskSolution s = Finish(gamma, w, params, cfg, search.best(),
                          search.truncated() ? SolveStatus::kFeasible
                                             : SolveStatus::kOptimal,
                          tau, cap);
  s.nodes = search.nodes();
  return s;
}

MaskSolution BruteForceMask(std::span<const double> gamma, double alpha,
                            const SecurityParams& params,
                            std::span<const double> w,
                            const MIEstimatorConfig& cfg) {
  ValidateProblem(gamma, alpha, params, w, cfg);
  const std::size_t n = gamma.size();
  if (n > kBruteForceMaxParams) {
    throw std::invalid_argument("brute force limited to 24 parameters");
  }
  const std::size_t cap = BudgetCap(alpha, n);
  const double tau = SecurityThreshold(alpha, params);
  double total = 0.0;
  for (double g : gamma) total += g;

  bool any_secure = false;
  bool have = false;
  EncryptionMask best;
  double best_obj = 0.0;
  EncryptionMask mask(n);
  for (std::uint64_t code = 0; code < (std::uint64_t{1} << n); ++code) {
    std::size_t count = 0;
    double covered = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const bool on = (code >> k) & 1;
      mask.bits[k] = on;
      if (on) {
        ++count;
        covered += gamma[k];
      }
    }
    if (count > cap) continue;
    const double cov = covered / total;
    if (cov < tau) continue;
    any_secure = true;
    const double obj = params.beta1 * static_cast<double>(count) /
                           static_cast<double>(n) -
                       params.beta2 * cov;
    if (have && obj > best_obj + kObjectiveTolerance) continue;
    if (MaskMutualInformation(w, mask, cfg) > params.eta_mi) continue;
    if (!have || MaskPreferred(obj, mask, best_obj, best)) {
      best = mask;
      best_obj = obj;
      have = true;
    }
  }
  if (!have) {
    return Finish(gamma, w, params, cfg, TopMask(gamma, cap),
                  any_secure ? SolveStatus::kInfeasibleMutualInformation
                             : SolveStatus::kInfeasibleSecurity,
                  tau, cap);
  }
  return Finish(gamma, w, params, cfg, std::move(best), SolveStatus::kOptimal,
                tau, cap);
}

Strategy ParseStrategy(const std::string& s) {
  if (s == "high") return Strategy::kHigh;
  if (s == "low") return Strategy::kLow;
  if (s == "random") return Strategy::kRandom;
  throw std::invalid_argument("unknown strategy: " + s);
}

std::string ToString(Strategy s) {
  switch (s) {
    case Strategy::kHigh: return "high";
    case Strategy::kLow: return "low";
    case Strategy::kRandom: return "random";
  }
  return "unknown";
}

EncryptionMask StrategyMask(std::span<const double> gamma, double ratio,
                            Strategy strategy, std::uint64_t seed) {
  if (!(ratio >= 0.0 && ratio <= 1.0)) {
    throw std::invalid_argument("ratio must lie in [0, 1]");
  }
  const std::size_t n = gamma.size();
  const std::size_t count = BudgetCap(ratio, n);
  std::vector<std::size_t> order;
  switch (strategy) {
    case Strategy::kHigh:
      order = DescendingOrder(gamma);
      break;
    case Strategy::kLow:
      order.resize(n);
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(),
                       [&](std::size_t a, std::size_t b) { return gamma[a] < gamma[b]; });
      break;
    case Strategy::kRandom: {
      order.resize(n);
      std::iota(order.begin(), order.end(), 0);
      std::mt19937_64 rng(seed);
      std::shuffle(order.begin(), order.end(), rng);
      break;
    }
  }
  EncryptionMask m(n);
  for (std::size_t i = 0; i < count; ++i) m.bits[order[i]] = 1;
  return m;
}

}  // namespace sensecrypt
