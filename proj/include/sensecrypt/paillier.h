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

#ifndef SENSECRYPT_PAILLIER_H_
#define SENSECRYPT_PAILLIER_H_

#include <cstdint>
#include <stdexcept>
#include <utility>

#include <gmpxx.h>

#include "sensecrypt/byte_io.h"

namespace sensecrypt {

// Thrown when ciphertexts or keys from different key pairs are combined.
class KeyMismatchError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct PaillierPublicKey {
  mpz_class n;
  mpz_class g;  // always n + 1
  mpz_class n_squared;
  std::uint32_t bit_length = 0;
  std::uint64_t key_id = 0;

  Bytes Serialize() const;
  static PaillierPublicKey Deserialize(std::span<const std::uint8_t> b);
};

struct PaillierPrivateKey {
  mpz_class lambda;  // lcm(p - 1, q - 1)
  mpz_class mu;      // lambda^{-1} mod n under g = n + 1
  mpz_class p;
  mpz_class q;
  PaillierPublicKey public_key;

  std::uint64_t key_id() const { return public_key.key_id; }

  Bytes Serialize() const;
  static PaillierPrivateKey Deserialize(std::span<const std::uint8_t> b);
};

struct Ciphertext {
  mpz_class value;  // in [0, n^2)
  std::uint64_t key_id = 0;

  friend bool operator==(const Ciphertext& a, const Ciphertext& b) {
    return a.key_id == b.key_id && a.value == b.value;
  }
};

Bytes SerializeCiphertext(const Ciphertext& c);
Ciphertext DeserializeCiphertext(ByteReader& r);

// Seeded randomness source for key generation and encryption masks. Each
// worker owns one; instances are not shared across threads.
class PaillierRng {
 public:
  explicit PaillierRng(std::uint64_t seed);
  PaillierRng(const PaillierRng&) = delete;
  PaillierRng& operator=(const PaillierRng&) = delete;

  // Uniform in [0, bound).
  mpz_class Below(const mpz_class& bound);
  // Uniform with exactly `bits` bits (top bit set).
  mpz_class Bits(unsigned bits);

 private:
  gmp_randclass state_;
};

inline constexpr std::uint32_t kMinKeyBits = 64;
inline constexpr std::uint32_t kProductionKeyBits = 2048;

// Deterministic for a fixed seed. n has exactly `bit_length` bits.
std::pair<PaillierPublicKey, PaillierPrivateKey> GenerateKeyPair(
    std::uint32_t bit_length, std::uint64_t seed);

Ciphertext Encrypt(const PaillierPublicKey& pk, const mpz_class& m,
                   PaillierRng& rng);
Ciphertext Encrypt(const PaillierPublicKey& pk, const mpz_class& m,
                   std::uint64_t seed);

mpz_class Decrypt(const PaillierPrivateKey& sk, const Ciphertext& c);

// Homomorphic operations. Results decrypt to the modular sum/product.
Ciphertext AddCipher(const PaillierPublicKey& pk, const Ciphertext& a,
                     const Ciphertext& b);
Ciphertext AddPlain(const PaillierPublicKey& pk, const Ciphertext& a,
                    const mpz_class& m);
Ciphertext MulPlain(const PaillierPublicKey& pk, const Ciphertext& a,
                    const mpz_class& k);

std::uint64_t KeyIdForModulus(const mpz_class& n);

}  // namespace sensecrypt

#endif  // SENSECRYPT_PAILLIER_H_
