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

#include "sensecrypt/fl_runtime.h"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <map>
#include <numeric>
#include <stdexcept>
#include <thread>

namespace sensecrypt {
namespace {

std::uint64_t SplitMix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t Mix(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0,
                  std::uint64_t c = 0) {
  return SplitMix(SplitMix(SplitMix(SplitMix(seed) ^ a) ^ b) ^ c);
}

// Stream tags keep per-purpose RNG streams disjoint.
constexpr std::uint64_t kTagModel = 1;
constexpr std::uint64_t kTagKeys = 2;
constexpr std::uint64_t kTagWarmup = 3;
constexpr std::uint64_t kTagDp = 4;
constexpr std::uint64_t kTagTrain = 5;
constexpr std::uint64_t kTagEncrypt = 6;

void CheckSameLength(std::span<const MixedVector> vs) {
  if (vs.empty()) throw std::invalid_argument("nothing to aggregate");
  for (const auto& v : vs) {
    v.Validate();
    if (v.size() != vs[0].size()) throw std::invalid_argument("length mismatch");
    if (v.scale_bits != vs[0].scale_bits) {
      throw std::invalid_argument("scale mismatch");
    }
  }
}

void CheckKey(const MixedVector& v, const PaillierPublicKey& pk) {
  if (v.ciphertext_count() > 0 && v.key_id != pk.key_id) {
    throw KeyMismatchError("ciphertexts were produced under another key");
  }
}

bool Contains(std::span<const std::uint8_t> hay, std::span<const std::uint8_t> needle) {
  if (needle.empty() || needle.size() > hay.size()) return false;
  return std::search(hay.begin(), hay.end(),
                     std::boyer_moore_searcher(needle.begin(), needle.end())) !=
         hay.end();
}

}  // namespace

MixedVector SelectiveEncrypt(std::span<const double> w, const EncryptionMask& mask,
                             const PaillierPublicKey& pk,
                             const FixedPointCodec& codec, double weight,
                             PaillierRng& rng, bool weight_applied) {
  if (w.size() != mask.size()) throw std::invalid_argument("mask length mismatch");
  if (!(weight > 0.0 && weight <= 1.0)) {
    throw std::invalid_argument("weight must lie in (0, 1]");
  }
  if (codec.modulus() != pk.n) throw KeyMismatchError("codec modulus mismatch");
  MixedVector v;
  v.mask = mask;
  v.key_id = pk.key_id;
  v.scale_bits = codec.scale_bits();
  v.weight_applied = weight_applied;
  v.plain.assign(w.size(), 0.0);
  v.cipher.assign(w.size(), Ciphertext{});
  for (std::size_t k = 0; k < w.size(); ++k) {
    const double x = weight * w[k];
    if (mask[k]) {
      v.cipher[k] = Encrypt(pk, codec.Encode(x), rng);
    } else {
      v.plain[k] = x;
    }
  }
  return v;
}

EncryptionMask MaskUnion(std::span<const EncryptionMask> masks) {
  if (masks.empty()) throw std::invalid_argument("no masks to unite");
  EncryptionMask out(masks[0].size());
  for (const auto& m : masks) {
    if (m.size() != out.size()) throw std::invalid_argument("mask length mismatch");
    for (std::size_t k = 0; k < m.size(); ++k) out.bits[k] |= m.bits[k];
  }
  return out;
}

MixedVector Aggregate(std::span<const MixedVector> vs, const PaillierPublicKey& pk,
                      const FixedPointCodec& codec) {
  CheckSameLength(vs);
  std::vector<EncryptionMask> masks;
  int terms = 0;
  for (const auto& v : vs) {
    if (!v.weight_applied) {
      throw std::invalid_argument("aggregate expects pre-weighted inputs");
    }
    CheckKey(v, pk);
    masks.push_back(v.mask);
    terms += v.terms;
  }
  const FixedPointCodec slot_codec = codec.WithScale(vs[0].scale_bits);
  MixedVector out;
  out.mask = MaskUnion(masks);
  out.key_id = pk.key_id;
  out.scale_bits = vs[0].scale_bits;
  out.weight_applied = true;
  out.terms = terms;
  const std::size_t n = out.size();
  out.plain.assign(n, 0.0);
  out.cipher.assign(n, Ciphertext{});
  for (std::size_t k = 0; k < n; ++k) {
    if (!out.mask[k]) {
      double sum = 0.0;
      for (const auto& v : vs) sum += v.plain[k];
      out.plain[k] = sum;
      continue;
    }
    std::optional<Ciphertext> acc;
    for (const auto& v : vs) {
      if (!v.mask[k]) continue;
      acc = acc ? AddCipher(pk, *acc, v.cipher[k]) : v.cipher[k];
    }
    for (const auto& v : vs) {
      if (v.mask[k]) continue;
      *acc = AddPlain(pk, *acc, slot_codec.Encode(v.plain[k]));
    }
    out.cipher[k] = std::move(*acc);
  }
  return out;
}

MixedVector AggregateServerWeighted(std::span<const MixedVector> vs,
                                    std::span<const double> weights,
                                    const PaillierPublicKey& pk,
                                    const FixedPointCodec& codec,
                                    int weight_bits) {
  CheckSameLength(vs);
  if (weights.size() != vs.size()) throw std::invalid_argument("weight count mismatch");
  if (weight_bits < 1 || weight_bits > 52) {
    throw std::invalid_argument("weight_bits must lie in [1, 52]");
  }
  const double unit = std::ldexp(1.0, weight_bits);
  std::vector<mpz_class> q(vs.size());
  std::vector<double> qw(vs.size());
  std::vector<EncryptionMask> masks;
  int terms = 0;
  for (std::size_t i = 0; i < vs.size(); ++i) {
    if (vs[i].weight_applied) {
      throw std::invalid_argument("server weighting expects unweighted inputs");
    }
    if (!(weights[i] > 0.0 && weights[i] <= 1.0)) {
      throw std::invalid_argument("weight must lie in (0, 1]");
    }
    CheckKey(vs[i], pk);
    const double scaled = std::max(1.0, std::round(weights[i] * unit));
    q[i] = mpz_class(scaled);
    qw[i] = scaled / unit;
    masks.push_back(vs[i].mask);
    terms += vs[i].terms;
  }
  const int out_scale = vs[0].scale_bits + weight_bits;
  const FixedPointCodec out_codec = codec.WithScale(out_scale);
  MixedVector out;
  out.mask = MaskUnion(masks);
  out.key_id = pk.key_id;
  out.scale_bits = out_scale;
  out.weight_applied = true;
  out.terms = terms;
  const std::size_t n = out.size();
  out.plain.assign(n, 0.0);
  out.cipher.assign(n, Ciphertext{});
  for (std::size_t k = 0; k < n; ++k) {
    if (!out.mask[k]) {
      double sum = 0.0;
      for (std::size_t i = 0; i < vs.size(); ++i) sum += qw[i] * vs[i].plain[k];
      out.plain[k] = sum;
      continue;
    }
    std::optional<Ciphertext> acc;
    for (std::size_t i = 0; i < vs.size(); ++i) {
      if (!vs[i].mask[k]) continue;
      Ciphertext c = MulPlain(pk, vs[i].cipher[k], q[i]);
      acc = acc ? AddCipher(pk, *acc, c) : std::move(c);
    }
    for (std::size_t i = 0; i < vs.size(); ++i) {
      if (vs[i].mask[k]) continue;
      *acc = AddPlain(pk, *acc, out_codec.Encode(qw[i] * vs[i].plain[k]));
    }
    out.cipher[k] = std::move(*acc);
  }
  return out;
}

std::vector<double> DecryptAggregate(const MixedVector& v,
                                     const EncryptionMask& union_mask,
                                     const PaillierPrivateKey& sk,
                                     const FixedPointCodec& codec) {
  v.Validate();
  if (!(union_mask == v.mask)) {
    throw std::invalid_argument("union mask does not match the aggregate");
  }
  if (v.ciphertext_count() > 0 && sk.key_id() != v.key_id) {
    throw KeyMismatchError("private key does not match the aggregate");
  }
  const FixedPointCodec slot_codec = codec.WithScale(v.scale_bits);
  std::vector<double> out(v.size());
  for (std::size_t k = 0; k < v.size(); ++k) {
    out[k] = v.mask[k] ? slot_codec.DecodeSum(Decrypt(sk, v.cipher[k]), v.terms)
                       : v.plain[k];
  }
  return out;
}

TopologyMode ParseTopology(const std::string& s) {
  if (s == "single_server") return TopologyMode::kSingleServer;
  if (s == "dual_server") return TopologyMode::kDualServer;
  throw std::invalid_argument("unknown topology: " + s);
}

std::string ToString(TopologyMode m) {
  return m == TopologyMode::kSingleServer ? "single_server" : "dual_server";
}

MaskPolicy ParseMaskPolicy(const std::string& s) {
  if (s == "sensecrypt") return MaskPolicy::kSenseCrypt;
  if (s == "uniform_mask") return MaskPolicy::kUniformMask;
  if (s == "full_he") return MaskPolicy::kFullHe;
  if (s == "plaintext") return MaskPolicy::kPlaintext;
  throw std::invalid_argument("unknown method: " + s);
}

std::string ToString(MaskPolicy p) {
  switch (p) {
    case MaskPolicy::kSenseCrypt: return "sensecrypt";
    case MaskPolicy::kUniformMask: return "uniform_mask";
    case MaskPolicy::kFullHe: return "full_he";
    case MaskPolicy::kPlaintext: return "plaintext";
  }
  return "unknown";
}

Dkms::Dkms(std::uint32_t key_bits, std::uint64_t seed, int scale_bits,
           double max_magnitude)
    : sk_(GenerateKeyPair(key_bits, seed).second),
      codec_(sk_.public_key.n, scale_bits, max_magnitude) {}

Bytes Dkms::Handle(std::span<const std::uint8_t> request) {
  const DecryptRequest req = DecryptRequest::FromEnvelope(Envelope::Decode(request));
  DecryptResponse resp;
  resp.cluster_id = req.cluster_id;
  resp.iteration = req.iteration;
  resp.params = DecryptAggregate(req.model, req.union_mask, sk_, codec_);
  ++decryptions_;
  return resp.ToEnvelope().Encode();
}

Aggregator::Aggregator(PaillierPublicKey pk, int scale_bits, double max_magnitude)
    : pk_(std::move(pk)), codec_(pk_.n, scale_bits, max_magnitude) {}

Bytes Aggregator::AggregateUploads(std::span<const Bytes> uploads,
                                   bool server_weighting, int weight_bits) {
  if (uploads.empty()) throw std::invalid_argument("no uploads");
  std::vector<MaskedModelUpload> msgs;
  for (const auto& u : uploads) {
    transcript_.push_back(u);
    msgs.push_back(MaskedModelUpload::FromEnvelope(Envelope::Decode(u)));
  }
  std::stable_sort(msgs.begin(), msgs.end(), [](const auto& a, const auto& b) {
    return a.client_id < b.client_id;
  });
  std::vector<MixedVector> vs;
  double total = 0.0;
  for (auto& m : msgs) {
    total += static_cast<double>(m.data_size);
    vs.push_back(std::move(m.model));
  }
  AggregateBroadcast out;
  out.cluster_id = msgs[0].cluster_id;
  out.iteration = msgs[0].iteration;
  if (server_weighting) {
    std::vector<double> weights;
    for (const auto& m : msgs) weights.push_back(static_cast<double>(m.data_size) / total);
    out.model = AggregateServerWeighted(vs, weights, pk_, codec_, weight_bits);
  } else {
    out.model = Aggregate(vs, pk_, codec_);
  }
  Bytes b = out.ToEnvelope().Encode();
  transcript_.push_back(b);
  return b;
}

void Aggregator::VisitState(
    const std::function<void(std::span<const std::uint8_t>)>& f) const {
  f(pk_.Serialize());
  if (sk_) f(sk_->Serialize());
  for (const auto& m : transcript_) f(m);
}

AggregatorInspection InspectAggregator(const Aggregator& agg,
                                       const PaillierPrivateKey& reference) {
  AggregatorInspection r;
  r.holds_private_key = agg.holds_private_key();
  const Bytes blob = reference.Serialize();
  const std::vector<Bytes> secrets = {
      BigIntToBytes(reference.lambda), BigIntToBytes(reference.mu),
      BigIntToBytes(reference.p), BigIntToBytes(reference.q)};
  agg.VisitState([&](std::span<const std::uint8_t> buf) {
    ++r.buffers_scanned;
    if (Contains(buf, blob)) ++r.private_key_blobs;
    for (const auto& s : secrets) {
      if (Contains(buf, s)) ++r.secret_value_hits;
    }
  });
  return r;
}

void ParallelFor(std::size_t n, std::size_t threads,
                 const std::function<void(std::size_t)>& f) {
  threads = std::max<std::size_t>(1, std::min(threads, n));
  if (threads == 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(threads);
  for (std::size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      try {
        for (std::size_t i = t; i < n; i += threads) f(i);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

std::size_t ThreadsFromEnv(std::size_t fallback) {
  if (const char* v = std::getenv("SENSECRYPT_THREADS")) {
    char* end = nullptr;
    const long n = std::strtol(v, &end, 10);
    if (end != v && *end == '\0' && n > 0) return static_cast<std::size_t>(n);
  }
  return fallback;
}

Federation::Federation(const FederationConfig& cfg, std::vector<ClientSetup> clients)
    : cfg_(cfg),
      clients_(std::move(clients)),
      initial_([&] {
        if (clients_.empty()) throw std::invalid_argument("no clients");
        const Dataset& d0 = clients_[0].train;
        for (const auto& c : clients_) {
          c.train.Validate();
          if (c.train.dim != d0.dim || c.train.class_count != d0.class_count ||
              c.test.dim != d0.dim) {
            throw std::invalid_argument("client datasets disagree on shape");
          }
          if (c.train.size() == 0) throw std::invalid_argument("empty client dataset");
        }
        return MLPModel::Create(d0.dim, cfg.hidden, d0.class_count,
                                Mix(cfg.seed, kTagModel));
      }()),
      dkms_(cfg.topology == TopologyMode::kDualServer
                ? std::make_optional<Dkms>(cfg.key_bits, Mix(cfg.seed, kTagKeys),
                                           cfg.scale_bits, cfg.max_magnitude)
                : std::nullopt),
      aggregator_([&] {
        if (dkms_) {
          return Aggregator(dkms_->public_key(), cfg.scale_bits, cfg.max_magnitude);
        }
        auto [pk, sk] = GenerateKeyPair(cfg.key_bits, Mix(cfg.seed, kTagKeys));
        Aggregator agg(pk, cfg.scale_bits, cfg.max_magnitude);
        agg.AdoptPrivateKey(sk);
        return agg;
      }()),
      codec_(aggregator_.public_key().n, cfg.scale_bits, cfg.max_magnitude) {
  // Algorithm-literal single-server mode distributes the private key to
  // every client.
  if (cfg_.topology == TopologyMode::kSingleServer) {
    client_private_key_ = *aggregator_.private_key();
  }
  client_cluster_.assign(clients_.size(), 0);
  alpha_.assign(clients_.size(), 1.0);
  cluster_models_ = {initial_};
  last_masks_.assign(clients_.size(), EncryptionMask(initial_.ParamCount()));
}

std::vector<std::size_t> Federation::members(int cluster_id) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < clients_.size(); ++i) {
    if (client_cluster_[i] == cluster_id) out.push_back(i);
  }
  return out;
}

void Federation::FormClusters() {
  const std::size_t n = clients_.size();
  std::vector<Bytes> uploads(n);
  ParallelFor(n, cfg_.threads, [&](std::size_t i) {
    TrainOptions warm = cfg_.train;
    warm.epochs = cfg_.sensitivity_epochs;
    warm.seed = Mix(cfg_.seed, kTagWarmup, i);
    const LocalResult r = TrainLocal(initial_, clients_[i].train, warm);
    SensitivityVector s = TaylorSensitivity(r.model.params, r.gradient);
    if (s.Total() > 0.0) s = NormalizeSensitivity(s);
    if (cfg_.dp_epsilon) {
      s = DpPerturb(s, DPParams::Calibrated(*cfg_.dp_epsilon, cfg_.dp_clip, cfg_.dp_delta),
                    Mix(cfg_.seed, kTagDp, i));
    }
    SensitivityUpload msg;
    msg.client_id = clients_[i].profile.client_id;
    msg.gamma = std::move(s.gamma);
    uploads[i] = msg.ToEnvelope().Encode();
  });

  // Server side.
  clustering_inputs_.assign(n, {});
  for (std::size_t i = 0; i < n; ++i) {
    clustering_inputs_[i] =
        SensitivityUpload::FromEnvelope(Envelope::Decode(uploads[i])).gamma;
  }
  assignment_ = ClusterAssignment{};
  if (cfg_.cluster_clients && n >= 2) {
    assignment_ = AffinityPropagation(SimilarityMatrix::FromPoints(clustering_inputs_),
                                      cfg_.affinity);
  }
  if (assignment_.exemplars.empty()) {
    assignment_.labels.assign(n, 0);
    assignment_.exemplars = {0};
  }
  client_cluster_ = assignment_.labels;
  const int k = static_cast<int>(assignment_.cluster_count());
  std::map<std::pair<int, int>, double> granted;
  for (int c = 0; c < k; ++c) {
    const auto idx = members(c);
    std::vector<ClientProfile> profiles;
    for (std::size_t i : idx) profiles.push_back(clients_[i].profile);
    const auto alphas = EncryptionBudgets(profiles);
    for (std::size_t j = 0; j < idx.size(); ++j) {
      BudgetGrant g{clients_[idx[j]].profile.client_id, c, alphas[j]};
      const BudgetGrant back =
          BudgetGrant::FromEnvelope(Envelope::Decode(g.ToEnvelope().Encode()));
      alpha_[idx[j]] = back.alpha;
    }
  }
  cluster_models_.assign(k, initial_);
  last_cluster_unions_.assign(k, 0);
}

std::vector<ClientUpdate> Federation::TrainClients(std::span<const std::size_t> idx,
                                                   int iteration) {
  std::vector<ClientUpdate> out(idx.size());
  ParallelFor(idx.size(), cfg_.threads, [&](std::size_t j) {
    const std::size_t i = idx[j];
    TrainOptions opts = cfg_.train;
    opts.seed = Mix(cfg_.seed, kTagTrain, static_cast<std::uint64_t>(iteration), i);
    LocalResult r =
        TrainLocal(cluster_models_[client_cluster_[i]], clients_[i].train, opts);
    ClientUpdate& u = out[j];
    u.client_id = clients_[i].profile.client_id;
    u.gamma = TaylorSensitivity(r.model.params, r.gradient);
    u.params = std::move(r.model.params.values);
  });
  return out;
}

MaskSolution Federation::SolveFor(std::size_t client, const ClientUpdate& u) const {
  const double total = u.gamma.Total();
  MaskSolution s;
  if (!(total > 0.0)) {
    s.mask = EncryptionMask(u.params.size());
    s.status = SolveStatus::kInfeasibleSecurity;
    s.cap = BudgetCap(alpha_[client], u.params.size());
  } else {
    s = SolveMask(u.gamma.gamma, alpha_[client], cfg_.security, u.params, cfg_.mi,
                  cfg_.solve);
  }
  if (!s.feasible()) s.mask = TopMask(u.gamma.gamma, s.cap);
  return s;
}

std::vector<RoundRecord> Federation::RunIteration(int iteration) {
  const std::size_t n = clients_.size();
  const std::size_t np = initial_.ParamCount();
  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), 0);
  const std::vector<ClientUpdate> updates = TrainClients(all, iteration);

  std::vector<MaskSolution> solutions(n);
  const bool solve = cfg_.policy == MaskPolicy::kSenseCrypt ||
                     cfg_.policy == MaskPolicy::kUniformMask;
  if (solve) {
    ParallelFor(n, cfg_.threads,
                [&](std::size_t i) { solutions[i] = SolveFor(i, updates[i]); });
    std::vector<EncryptionMask> ms;
    for (const auto& s : solutions) ms.push_back(s.mask);
    last_global_union_ = MaskUnion(ms).Popcount();
    for (std::size_t c = 0; c < cluster_models_.size(); ++c) {
      std::vector<EncryptionMask> cm;
      for (std::size_t i : members(static_cast<int>(c))) cm.push_back(solutions[i].mask);
      last_cluster_unions_[c] = cm.empty() ? 0 : MaskUnion(cm).Popcount();
    }
  }

  std::vector<EncryptionMask> masks(n, EncryptionMask(np));
  switch (cfg_.policy) {
    case MaskPolicy::kSenseCrypt:
      for (std::size_t i = 0; i < n; ++i) masks[i] = solutions[i].mask;
      break;
    case MaskPolicy::kUniformMask: {
      // Shared mask: the highest aggregated-sensitivity slots, sized to the
      // union of the sensecrypt masks.
      std::vector<double> pooled(np, 0.0);
      for (const auto& u : updates) {
        const double t = u.gamma.Total();
        if (!(t > 0.0)) continue;
        for (std::size_t k = 0; k < np; ++k) pooled[k] += u.gamma.gamma[k] / t;
      }
      const EncryptionMask shared = TopMask(pooled, last_global_union_);
      std::fill(masks.begin(), masks.end(), shared);
      break;
    }
    case MaskPolicy::kFullHe:
      for (auto& m : masks) std::fill(m.bits.begin(), m.bits.end(), 1);
      break;
    case MaskPolicy::kPlaintext:
      break;
  }
  last_masks_ = masks;

  std::vector<RoundRecord> records;
  for (std::size_t c = 0; c < cluster_models_.size(); ++c) {
    const auto idx = members(static_cast<int>(c));
    if (idx.empty()) continue;
    std::vector<ClientUpdate> u;
    std::vector<EncryptionMask> m;
    std::vector<MaskSolution> s;
    for (std::size_t i : idx) {
      u.push_back(updates[i]);
      m.push_back(masks[i]);
      s.push_back(solve ? solutions[i] : MaskSolution{});
    }
    RoundRecord r = SecureAggregate(static_cast<int>(c), iteration, idx, u, m,
                                    solve ? std::span<const MaskSolution>(s)
                                          : std::span<const MaskSolution>());
    records.push_back(std::move(r));
  }
  return records;
}

RoundRecord Federation::RunRound(int cluster_id, int iteration) {
  const auto idx = members(cluster_id);
  if (idx.empty()) throw std::invalid_argument("empty cluster");
  const auto updates = TrainClients(idx, iteration);
  std::vector<MaskSolution> solutions(idx.size());
  std::vector<EncryptionMask> masks(idx.size());
  for (std::size_t j = 0; j < idx.size(); ++j) {
    solutions[j] = SolveFor(idx[j], updates[j]);
    masks[j] = solutions[j].mask;
    last_masks_[idx[j]] = masks[j];
  }
  return SecureAggregate(cluster_id, iteration, idx, updates, masks, solutions);
}

RoundRecord Federation::SecureAggregate(int cluster_id, int iteration,
                                        std::span<const std::size_t> idx,
                                        std::span<const ClientUpdate> updates,
                                        std::span<const EncryptionMask> masks,
                                        std::span<const MaskSolution> solutions) {
  const std::size_t np = initial_.ParamCount();
  double total = 0.0;
  for (std::size_t i : idx) total += static_cast<double>(clients_[i].train.size());
  const PaillierPublicKey& pk = aggregator_.public_key();

  std::vector<Bytes> uploads(idx.size());
  ParallelFor(idx.size(), cfg_.threads, [&](std::size_t j) {
    const std::size_t i = idx[j];
    const double weight =
        cfg_.server_weighting ? 1.0
                              : static_cast<double>(clients_[i].train.size()) / total;
    MaskedModelUpload msg;
    msg.client_id = clients_[i].profile.client_id;
    msg.cluster_id = cluster_id;
    msg.iteration = iteration;
    msg.data_size = clients_[i].train.size();
    PaillierRng rng(Mix(cfg_.seed, kTagEncrypt, static_cast<std::uint64_t>(iteration), i));
    msg.model = SelectiveEncrypt(updates[j].params, masks[j], pk, codec_, weight, rng,
                                 !cfg_.server_weighting);
    uploads[j] = msg.ToEnvelope().Encode();
  });

  const Bytes broadcast_bytes =
      aggregator_.AggregateUploads(uploads, cfg_.server_weighting, cfg_.weight_bits);
  const AggregateBroadcast broadcast =
      AggregateBroadcast::FromEnvelope(Envelope::Decode(broadcast_bytes));
  const EncryptionMask union_mask = MaskUnion(masks);
  if (!(union_mask == broadcast.model.mask)) {
    throw std::logic_error("aggregate mask differs from the union of client masks");
  }

  std::vector<double> params;
  if (broadcast.model.ciphertext_count() == 0) {
    params = broadcast.model.plain;
  } else if (dkms_) {
    DecryptRequest req;
    req.cluster_id = cluster_id;
    req.iteration = iteration;
    req.union_mask = union_mask;
    req.model = broadcast.model;
    const Bytes req_bytes = req.ToEnvelope().Encode();
    aggregator_.RecordOutgoing(req_bytes);
    params = DecryptResponse::FromEnvelope(Envelope::Decode(dkms_->Handle(req_bytes)))
                 .params;
  } else {
    // Every client holds the same key and decrypts to the same vector.
    params = DecryptAggregate(broadcast.model, union_mask, *client_private_key_, codec_);
  }
  cluster_models_[cluster_id] = initial_.WithValues(std::move(params));
  const MLPModel& model = cluster_models_[cluster_id];

  RoundRecord rec;
  rec.iteration = iteration;
  rec.cluster_id = cluster_id;
  rec.param_count = np;
  rec.union_popcount = union_mask.Popcount();
  const std::size_t down =
      dkms_ ? cfg_.sizes.VectorBytes(0, np) : cfg_.sizes.VectorBytes(rec.union_popcount, np);
  for (std::size_t j = 0; j < idx.size(); ++j) {
    const std::size_t i = idx[j];
    ClientRoundStats st;
    st.client_id = clients_[i].profile.client_id;
    st.alpha = alpha_[i];
    st.cap = BudgetCap(alpha_[i], np);
    st.popcount = masks[j].Popcount();
    if (!solutions.empty()) {
      st.status = solutions[j].status;
      st.fallback = !solutions[j].feasible();
    }
    const double gt = updates[j].gamma.Total();
    st.coverage = gt > 0.0 ? Coverage(updates[j].gamma.gamma, masks[j]) : 0.0;
    st.mutual_information = MaskMutualInformation(updates[j].params, masks[j], cfg_.mi);
    st.upload_bytes = cfg_.sizes.VectorBytes(st.popcount, np);
    st.download_bytes = down;
    st.accuracy = clients_[i].test.size() > 0 ? Accuracy(model, clients_[i].test) : 0.0;
    rec.mean_accuracy += st.accuracy;
    rec.clients.push_back(st);
  }
  rec.mean_accuracy /= static_cast<double>(idx.size());
  std::sort(rec.clients.begin(), rec.clients.end(),
            [](const auto& a, const auto& b) { return a.client_id < b.client_id; });
  return rec;
}

std::vector<RoundRecord> RunTraining(Federation& fed, int iterations) {
  if (iterations < 0) throw std::invalid_argument("iterations must be >= 0");
  fed.FormClusters();
  std::vector<RoundRecord> out;
  for (int e = 1; e <= iterations; ++e) {
    auto recs = fed.RunIteration(e);
    out.insert(out.end(), std::make_move_iterator(recs.begin()),
               std::make_move_iterator(recs.end()));
  }
  return out;
}

}  // namespace sensecrypt
