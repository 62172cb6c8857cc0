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

#include "sensecrypt/messages.h"

#include <stdexcept>

namespace sensecrypt {
namespace {

void ExpectType(const Envelope& e, const char* type) {
  if (e.type != type) {
    throw DecodeError("expected " + std::string(type) + " message, got " + e.type);
  }
}

template <typename T>
T Field(const nlohmann::json& h, const char* name) {
  if (!h.contains(name)) throw DecodeError(std::string("missing field ") + name);
  try {
    return h.at(name).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw DecodeError(std::string("bad field ") + name);
  }
}

void PutMask(ByteWriter& w, const EncryptionMask& m) {
  const Bytes b = m.Serialize();
  w.PutU32(static_cast<std::uint32_t>(b.size()));
  w.PutBytes(b);
}

EncryptionMask GetMask(ByteReader& r) {
  const std::uint32_t len = r.GetU32();
  return EncryptionMask::Deserialize(r.GetBytes(len));
}

MixedVector PayloadVector(const Envelope& e) {
  ByteReader r(e.payload);
  MixedVector v = MixedVector::Deserialize(r);
  if (!r.AtEnd()) throw DecodeError("trailing payload bytes");
  return v;
}

}  // namespace

void MixedVector::Validate() const {
  const std::size_t n = mask.size();
  if (plain.size() != n || cipher.size() != n) {
    throw std::invalid_argument("mixed vector slot arrays disagree with mask");
  }
  for (std::size_t k = 0; k < n; ++k) {
    if (mask[k] && cipher[k].key_id != key_id) {
      throw KeyMismatchError("ciphertext slots carry different key ids");
    }
  }
  if (terms < 1) throw std::invalid_argument("terms must be >= 1");
}

Bytes MixedVector::Serialize() const {
  Validate();
  ByteWriter w;
  PutMask(w, mask);
  w.PutU64(key_id);
  w.PutU32(static_cast<std::uint32_t>(scale_bits));
  w.PutU8(weight_applied ? 1 : 0);
  w.PutU32(static_cast<std::uint32_t>(terms));
  for (std::size_t k = 0; k < mask.size(); ++k) {
    if (mask[k]) {
      w.PutBigInt(cipher[k].value);
    } else {
      w.PutF64(plain[k]);
    }
  }
  return w.Take();
}

MixedVector MixedVector::Deserialize(ByteReader& r) {
  MixedVector v;
  v.mask = GetMask(r);
  v.key_id = r.GetU64();
  v.scale_bits = static_cast<int>(r.GetU32());
  v.weight_applied = r.GetU8() != 0;
  v.terms = static_cast<int>(r.GetU32());
  const std::size_t n = v.mask.size();
  v.plain.assign(n, 0.0);
  v.cipher.assign(n, Ciphertext{});
  for (std::size_t k = 0; k < n; ++k) {
    if (v.mask[k]) {
      v.cipher[k] = Ciphertext{r.GetBigInt(), v.key_id};
    } else {
      v.plain[k] = r.GetF64();
    }
  }
  return v;
}

Bytes Envelope::Encode() const {
  nlohmann::json h = header;
  h["type"] = type;
  const std::string text = h.dump();
  ByteWriter w;
  w.PutU32(static_cast<std::uint32_t>(text.size()));
  w.PutBytes(std::span<const std::uint8_t>(
      reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
  w.PutU64(payload.size());
  w.PutBytes(payload);
  return w.Take();
}

Envelope Envelope::Decode(std::span<const std::uint8_t> b) {
  ByteReader r(b);
  const std::uint32_t hlen = r.GetU32();
  const auto hbytes = r.GetBytes(hlen);
  Envelope e;
  try {
    e.header = nlohmann::json::parse(hbytes.begin(), hbytes.end());
  } catch (const nlohmann::json::exception& ex) {
    throw DecodeError(std::string("bad envelope header: ") + ex.what());
  }
  e.type = Field<std::string>(e.header, "type");
  e.header.erase("type");
  const std::uint64_t plen = r.GetU64();
  const auto p = r.GetBytes(plen);
  e.payload.assign(p.begin(), p.end());
  if (!r.AtEnd()) throw DecodeError("trailing envelope bytes");
  return e;
}

Envelope SensitivityUpload::ToEnvelope() const {
  Envelope e;
  e.type = "SensitivityUpload";
  e.header = {{"client_id", client_id}};
  e.payload = EncodeRealVector(gamma);
  return e;
}

SensitivityUpload SensitivityUpload::FromEnvelope(const Envelope& e) {
  ExpectType(e, "SensitivityUpload");
  SensitivityUpload m;
  m.client_id = Field<int>(e.header, "client_id");
  m.gamma = DecodeRealVector(e.payload);
  return m;
}

Envelope BudgetGrant::ToEnvelope() const {
  Envelope e;
  e.type = "BudgetGrant";
  e.header = {{"client_id", client_id}, {"cluster_id", cluster_id}};
  ByteWriter w;
  w.PutF64(alpha);
  e.payload = w.Take();
  return e;
}

BudgetGrant BudgetGrant::FromEnvelope(const Envelope& e) {
  ExpectType(e, "BudgetGrant");
  BudgetGrant m;
  m.client_id = Field<int>(e.header, "client_id");
  m.cluster_id = Field<int>(e.header, "cluster_id");
  ByteReader r(e.payload);
  m.alpha = r.GetF64();
  return m;
}

Envelope MaskedModelUpload::ToEnvelope() const {
  Envelope e;
  e.type = "MaskedModelUpload";
  e.header = {{"client_id", client_id},
              {"cluster_id", cluster_id},
              {"iteration", iteration},
              {"data_size", data_size}};
  e.payload = model.Serialize();
  return e;
}

MaskedModelUpload MaskedModelUpload::FromEnvelope(const Envelope& e) {
  ExpectType(e, "MaskedModelUpload");
  MaskedModelUpload m;
  m.client_id = Field<int>(e.header, "client_id");
  m.cluster_id = Field<int>(e.header, "cluster_id");
  m.iteration = Field<int>(e.header, "iteration");
  m.data_size = Field<std::size_t>(e.header, "data_size");
  m.model = PayloadVector(e);
  return m;
}

Envelope AggregateBroadcast::ToEnvelope() const {
  Envelope e;
  e.type = "AggregateBroadcast";
  e.header = {{"cluster_id", cluster_id}, {"iteration", iteration}};
  e.payload = model.Serialize();
  return e;
}

AggregateBroadcast AggregateBroadcast::FromEnvelope(const Envelope& e) {
  ExpectType(e, "AggregateBroadcast");
  AggregateBroadcast m;
  m.cluster_id = Field<int>(e.header, "cluster_id");
  m.iteration = Field<int>(e.header, "iteration");
  m.model = PayloadVector(e);
  return m;
}

Envelope DecryptRequest::ToEnvelope() const {
  Envelope e;
  e.type = "DecryptRequest";
  e.header = {{"cluster_id", cluster_id}, {"iteration", iteration}};
  ByteWriter w;
  PutMask(w, union_mask);
  w.PutBytes(model.Serialize());
  e.payload = w.Take();
  return e;
}

DecryptRequest DecryptRequest::FromEnvelope(const Envelope& e) {
  ExpectType(e, "DecryptRequest");
  DecryptRequest m;
  m.cluster_id = Field<int>(e.header, "cluster_id");
  m.iteration = Field<int>(e.header, "iteration");
  ByteReader r(e.payload);
  m.union_mask = GetMask(r);
  m.model = MixedVector::Deserialize(r);
  if (!r.AtEnd()) throw DecodeError("trailing payload bytes");
  return m;
}

Envelope DecryptResponse::ToEnvelope() const {
  Envelope e;
  e.type = "DecryptResponse";
  e.header = {{"cluster_id", cluster_id}, {"iteration", iteration}};
  e.payload = EncodeRealVector(params);
  return e;
}

DecryptResponse DecryptResponse::FromEnvelope(const Envelope& e) {
  ExpectType(e, "DecryptResponse");
  DecryptResponse m;
  m.cluster_id = Field<int>(e.header, "cluster_id");
  m.iteration = Field<int>(e.header, "iteration");
  m.params = DecodeRealVector(e.payload);
  return m;
}

}  // namespace sensecrypt
