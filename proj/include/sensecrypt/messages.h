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

#ifndef SENSECRYPT_MESSAGES_H_
#define SENSECRYPT_MESSAGES_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "sensecrypt/byte_io.h"
#include "sensecrypt/mask_opt.h"
#include "sensecrypt/paillier.h"

namespace sensecrypt {

// Per-slot plaintext-or-ciphertext model vector. Slot k is a ciphertext iff
// mask[k] is set.
struct MixedVector {
  std::vector<double> plain;        // meaningful where mask[k] == 0
  std::vector<Ciphertext> cipher;   // meaningful where mask[k] == 1
  EncryptionMask mask;
  std::uint64_t key_id = 0;
  int scale_bits = 0;
  bool weight_applied = false;
  int terms = 1;  // number of client contributions summed into this vector

  std::size_t size() const { return mask.size(); }
  bool is_encrypted(std::size_t k) const { return mask[k]; }
  std::size_t ciphertext_count() const { return mask.Popcount(); }
  // Throws std::invalid_argument on length or key inconsistencies.
  void Validate() const;

  Bytes Serialize() const;
  static MixedVector Deserialize(ByteReader& r);
};

// u32 header length, JSON header (carries "type"), u64 payload length,
// binary payload.
struct Envelope {
  std::string type;
  nlohmann::json header = nlohmann::json::object();
  Bytes payload;

  Bytes Encode() const;
  static Envelope Decode(std::span<const std::uint8_t> b);
};

struct SensitivityUpload {
  int client_id = 0;
  std::vector<double> gamma;

  Envelope ToEnvelope() const;
  static SensitivityUpload FromEnvelope(const Envelope& e);
};

struct BudgetGrant {
  int client_id = 0;
  int cluster_id = 0;
  double alpha = 1.0;

  Envelope ToEnvelope() const;
  static BudgetGrant FromEnvelope(const Envelope& e);
};

struct MaskedModelUpload {
  int client_id = 0;
  int cluster_id = 0;
  int iteration = 0;
  std::size_t data_size = 0;
  MixedVector model;

  Envelope ToEnvelope() const;
  static MaskedModelUpload FromEnvelope(const Envelope& e);
};

struct AggregateBroadcast {
  int cluster_id = 0;
  int iteration = 0;
  MixedVector model;

  Envelope ToEnvelope() const;
  static AggregateBroadcast FromEnvelope(const Envelope& e);
};

struct DecryptRequest {
  int cluster_id = 0;
  int iteration = 0;
  EncryptionMask union_mask;
  MixedVector model;

  Envelope ToEnvelope() const;
  static DecryptRequest FromEnvelope(const Envelope& e);
};

struct DecryptResponse {
  int cluster_id = 0;
  int iteration = 0;
  std::vector<double> params;

  Envelope ToEnvelope() const;
  static DecryptResponse FromEnvelope(const Envelope& e);
};

}  // namespace sensecrypt

#endif  // SENSECRYPT_MESSAGES_H_
