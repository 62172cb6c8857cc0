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

#ifndef SENSECRYPT_FL_RUNTIME_H_
#define SENSECRYPT_FL_RUNTIME_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sensecrypt/budget.h"
#include "sensecrypt/clustering.h"
#include "sensecrypt/fixed_point.h"
#include "sensecrypt/mask_opt.h"
#include "sensecrypt/messages.h"
#include "sensecrypt/model_kit.h"
#include "sensecrypt/paillier.h"
#include "sensecrypt/sensitivity.h"

namespace sensecrypt {

// Masked slots hold Enc(encode(weight * w_k)), the rest weight * w_k.
// `weight_applied` is false only for uploads destined for server-side
// weighting, which pass weight 1.
MixedVector SelectiveEncrypt(std::span<const double> w, const EncryptionMask& mask,
                             const PaillierPublicKey& pk,
                             const FixedPointCodec& codec, double weight,
                             PaillierRng& rng, bool weight_applied = true);

// Bitwise OR. Throws on length mismatch or an empty list.
EncryptionMask MaskUnion(std::span<const EncryptionMask> masks);

// Slot-wise FedAvg sum of pre-weighted vectors. A slot is a ciphertext in the
// result iff any input holds a ciphertext there.
MixedVector Aggregate(std::span<const MixedVector> vs, const PaillierPublicKey& pk,
                      const FixedPointCodec& codec);

// Server-side weighting: inputs carry unweighted values; ciphertext slots are
// scaled by round(weight * 2^weight_bits) through MulPlain, which raises the
// result's fixed-point exponent by weight_bits.
MixedVector AggregateServerWeighted(std::span<const MixedVector> vs,
                                    std::span<const double> weights,
                                    const PaillierPublicKey& pk,
                                    const FixedPointCodec& codec,
                                    int weight_bits = 20);

// Requires union_mask == v.mask and a private key matching v.key_id.
std::vector<double> DecryptAggregate(const MixedVector& v,
                                     const EncryptionMask& union_mask,
                                     const PaillierPrivateKey& sk,
                                     const FixedPointCodec& codec);

enum class TopologyMode { kSingleServer, kDualServer };
TopologyMode ParseTopology(const std::string& s);
std::string ToString(TopologyMode m);

enum class MaskPolicy {
  kSenseCrypt,   // per-client optimized masks
  kUniformMask,  // one shared high-sensitivity mask for every client
  kFullHe,       // every slot encrypted
  kPlaintext,    // no encryption
};
MaskPolicy ParseMaskPolicy(const std::string& s);
std::string ToString(MaskPolicy p);

struct SizeConstants {
  std::size_t ciphertext_bytes = 768;
  std::size_t plaintext_bytes = 8;

  std::size_t VectorBytes(std::size_t encrypted, std::size_t total) const {
    return encrypted * ciphertext_bytes + (total - encrypted) * plaintext_bytes;
  }
};

// Holds the only private key in dual_server mode.
class Dkms {
 public:
  Dkms(std::uint32_t key_bits, std::uint64_t seed, int scale_bits,
       double max_magnitude);

  const PaillierPublicKey& public_key() const { return sk_.public_key; }
  // Decrypts a serialized DecryptRequest and returns a DecryptResponse.
  Bytes Handle(std::span<const std::uint8_t> request);
  const PaillierPrivateKey& private_key_for_inspection() const { return sk_; }
  std::size_t decryptions() const { return decryptions_; }

 private:
  PaillierPrivateKey sk_;
  FixedPointCodec codec_;
  std::size_t decryptions_ = 0;
};

class Aggregator {
 public:
  Aggregator(PaillierPublicKey pk, int scale_bits, double max_magnitude);

  // Key authority in single_server mode.
  void AdoptPrivateKey(PaillierPrivateKey sk) { sk_ = std::move(sk); }
  bool holds_private_key() const { return sk_.has_value(); }
  const PaillierPrivateKey* private_key() const {
    return sk_ ? &*sk_ : nullptr;
  }

  // Aggregates serialized MaskedModelUploads in ascending client id order and
  // returns a serialized AggregateBroadcast.
  Bytes AggregateUploads(std::span<const Bytes> uploads, bool server_weighting,
                         int weight_bits);
  // Records an outgoing message (e.g. a DecryptRequest) in the transcript.
  void RecordOutgoing(const Bytes& message) { transcript_.push_back(message); }

  const PaillierPublicKey& public_key() const { return pk_; }
  const std::vector<Bytes>& transcript() const { return transcript_; }
  void ClearTranscript() { transcript_.clear(); }

  // Every byte buffer reachable from this object's state.
  void VisitState(const std::function<void(std::span<const std::uint8_t>)>& f) const;

 private:
  PaillierPublicKey pk_;
  std::optional<PaillierPrivateKey> sk_;
  FixedPointCodec codec_;
  std::vector<Bytes> transcript_;
};

struct AggregatorInspection {
  bool holds_private_key = false;
  std::size_t buffers_scanned = 0;
  std::size_t private_key_blobs = 0;   // serialized private keys found
  std::size_t secret_value_hits = 0;   // lambda, mu, p or q byte strings found

  bool clean() const {
    return !holds_private_key && private_key_blobs == 0 && secret_value_hits == 0;
  }
};

// Scans all aggregator-reachable buffers for the reference key's secrets.
AggregatorInspection InspectAggregator(const Aggregator& agg,
                                       const PaillierPrivateKey& reference);

struct ClientRoundStats {
  int client_id = 0;
  double alpha = 1.0;
  std::size_t cap = 0;
  std::size_t popcount = 0;
  SolveStatus status = SolveStatus::kOptimal;
  bool fallback = false;  // infeasible solve replaced by the top-cap mask
  double coverage = 0.0;
  double mutual_information = 0.0;
  std::size_t upload_bytes = 0;
  std::size_t download_bytes = 0;
  double accuracy = 0.0;
};

struct RoundRecord {
  int iteration = 0;
  int cluster_id = 0;
  std::vector<ClientRoundStats> clients;  // ascending client id
  std::size_t param_count = 0;
  std::size_t union_popcount = 0;
  double mean_accuracy = 0.0;
};

struct FederationConfig {
  TopologyMode topology = TopologyMode::kDualServer;
  MaskPolicy policy = MaskPolicy::kSenseCrypt;
  std::uint32_t key_bits = 256;
  int scale_bits = kDefaultScaleBits;
  double max_magnitude = kDefaultMaxMagnitude;
  SecurityParams security;
  MIEstimatorConfig mi;
  SolveOptions solve;
  TrainOptions train;              // per-iteration local training
  int sensitivity_epochs = 1;      // local epochs before clustering
  bool cluster_clients = true;     // false puts every client in one cluster
  std::optional<double> dp_epsilon;
  double dp_delta = kDefaultDpDelta;
  double dp_clip = 1.0;
  AffinityOptions affinity;
  bool server_weighting = false;
  int weight_bits = 20;
  std::size_t hidden = kDefaultHidden;
  SizeConstants sizes;
  std::uint64_t seed = 0;
  std::size_t threads = 1;
};

struct ClientSetup {
  ClientProfile profile;
  Dataset train;
  Dataset test;
};

// Local training output of one client for one iteration.
struct ClientUpdate {
  int client_id = 0;
  std::vector<double> params;
  SensitivityVector gamma;
};

// In-process deployment of the protocol. Roles talk only through serialized
// messages; the driver routes them.
class Federation {
 public:
  Federation(const FederationConfig& cfg, std::vector<ClientSetup> clients);

  // Local training, sensitivity upload, clustering and budget grants.
  void FormClusters();

  // One full iteration over every cluster.
  std::vector<RoundRecord> RunIteration(int iteration);
  // Local training through decryption for one cluster; masks come from the
  // sensecrypt solver regardless of the configured policy.
  RoundRecord RunRound(int cluster_id, int iteration);

  std::size_t client_count() const { return clients_.size(); }
  std::size_t cluster_count() const { return cluster_models_.size(); }
  std::size_t param_count() const { return initial_.ParamCount(); }
  const ClusterAssignment& clusters() const { return assignment_; }
  int cluster_of(std::size_t client) const { return client_cluster_[client]; }
  std::vector<std::size_t> members(int cluster_id) const;
  double alpha(std::size_t client) const { return alpha_[client]; }
  const MLPModel& cluster_model(int cluster_id) const {
    return cluster_models_[cluster_id];
  }
  const MLPModel& initial_model() const { return initial_; }
  const Aggregator& aggregator() const { return aggregator_; }
  const Dkms* dkms() const { return dkms_ ? &*dkms_ : nullptr; }
  const FederationConfig& config() const { return cfg_; }
  const std::vector<ClientSetup>& clients() const { return clients_; }
  // Sensitivity vectors as uploaded for clustering (after optional DP).
  const std::vector<std::vector<double>>& clustering_inputs() const {
    return clustering_inputs_;
  }
  // Per-client masks of the last iteration, by client index.
  const std::vector<EncryptionMask>& last_masks() const { return last_masks_; }
  // Union over every client's sensecrypt mask in the last iteration,
  // regardless of policy.
  std::size_t last_global_sensecrypt_union() const { return last_global_union_; }
  // Per-cluster sensecrypt union sizes in the last iteration.
  const std::vector<std::size_t>& last_cluster_sensecrypt_unions() const {
    return last_cluster_unions_;
  }

 private:
  std::vector<ClientUpdate> TrainClients(std::span<const std::size_t> idx,
                                         int iteration);
  MaskSolution SolveFor(std::size_t client, const ClientUpdate& u) const;
  RoundRecord SecureAggregate(int cluster_id, int iteration,
                              std::span<const std::size_t> idx,
                              std::span<const ClientUpdate> updates,
                              std::span<const EncryptionMask> masks,
                              std::span<const MaskSolution> solutions);

  FederationConfig cfg_;
  std::vector<ClientSetup> clients_;
  MLPModel initial_;
  std::optional<Dkms> dkms_;
  Aggregator aggregator_;
  std::optional<PaillierPrivateKey> client_private_key_;  // single_server only
  FixedPointCodec codec_;
  ClusterAssignment assignment_;
  std::vector<int> client_cluster_;
  std::vector<double> alpha_;
  std::vector<MLPModel> cluster_models_;
  std::vector<std::vector<double>> clustering_inputs_;
  std::vector<EncryptionMask> last_masks_;
  std::size_t last_global_union_ = 0;
  std::vector<std::size_t> last_cluster_unions_;
};

// Runs FormClusters then `iterations` rounds; records in iteration order,
// clusters ascending within an iteration.
std::vector<RoundRecord> RunTraining(Federation& fed, int iterations);

// Applies f(i) for i in [0, n) on up to `threads` workers.
void ParallelFor(std::size_t n, std::size_t threads,
                 const std::function<void(std::size_t)>& f);
// SENSECRYPT_THREADS if set and positive, else `fallback`.
std::size_t ThreadsFromEnv(std::size_t fallback);

}  // namespace sensecrypt

#endif  // SENSECRYPT_FL_RUNTIME_H_
