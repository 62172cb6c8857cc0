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

#include "sensecrypt/paillier.h"

#include <string>

namespace sensecrypt {
namespace {

constexpr std::uint32_t kPublicKeyMagic = 0x53435050;   // "SCPP"
constexpr std::uint32_t kPrivateKeyMagic = 0x53435053;  // "SCPS"

void CheckPlaintext(const PaillierPublicKey& pk, const mpz_class& m,
                    const char* what) {
  if (sgn(m) < 0 || m >= pk.n) {
    throw std::out_of_range(std::string(what) + " outside [0, n)");
  }
}

void CheckKey(const PaillierPublicKey& pk, const Ciphertext& c) {
  if (c.key_id != pk.key_id) {
    throw KeyMismatchError("ciphertext key_id does not match public key");
  }
}

// (1 + n)^m mod n^2 == 1 + m n mod n^2.
mpz_class GeneratorPower(const PaillierPublicKey& pk, const mpz_class& m) {
  mpz_class t = m * pk.n + 1;
  mpz_mod(t.get_mpz_t(), t.get_mpz_t(), pk.n_squared.get_mpz_t());
  return t;
}

mpz_class RandomPrime(PaillierRng& rng, unsigned bits) {
  for (;;) {
    mpz_class x = rng.Bits(bits);
    // Second-highest bit set so that two such primes multiply to exactly
    // bits_p + bits_q bits.
    mpz_setbit(x.get_mpz_t(), bits - 2);
    mpz_class p;
    mpz_nextprime(p.get_mpz_t(), x.get_mpz_t());
    if (mpz_sizeinbase(p.get_mpz_t(), 2) == bits) return p;
  }
}

PaillierPublicKey MakePublicKey(const mpz_class& n, std::uint32_t bits) {
  PaillierPublicKey pk;
  pk.n = n;
  pk.g = n + 1;
  pk.n_squared = n * n;
  pk.bit_length = bits;
  pk.key_id = KeyIdForModulus(n);
  return pk;
}

}  // namespace

PaillierRng::PaillierRng(std::uint64_t seed) : state_(gmp_randinit_mt) {
  mpz_class s;
  mpz_import(s.get_mpz_t(), 1, 1, sizeof(seed), 0, 0, &seed);
  state_.seed(s);
}

mpz_class PaillierRng::Below(const mpz_class& bound) {
  return state_.get_z_range(bound);
}

mpz_class PaillierRng::Bits(unsigned bits) {
  mpz_class x = state_.get_z_bits(bits);
  mpz_setbit(x.get_mpz_t(), bits - 1);
  return x;
}

std::uint64_t KeyIdForModulus(const mpz_class& n) {
  std::uint64_t h = 1469598103934665603ULL;
  for (std::uint8_t b : BigIntToBytes(n)) {
    h ^= b;
    h *= 1099511628211ULL;
  }
  return h;
}

std::pair<PaillierPublicKey, PaillierPrivateKey> GenerateKeyPair(
    std::uint32_t bit_length, std::uint64_t seed) {
  if (bit_length < kMinKeyBits) {
    throw std::invalid_argument("key size must be at least 64 bits");
  }
  PaillierRng rng(seed);
  const unsigned p_bits = (bit_length + 1) / 2;
  const unsigned q_bits = bit_length / 2;
  for (;;) {
    mpz_class p = RandomPrime(rng, p_bits);
    mpz_class q = RandomPrime(rng, q_bits);
    if (p == q) continue;
    mpz_class n = p * q;
    if (mpz_sizeinbase(n.get_mpz_t(), 2) != bit_length) continue;
    mpz_class phi = (p - 1) * (q - 1);
    mpz_class g;
    mpz_gcd(g.get_mpz_t(), n.get_mpz_t(), phi.get_mpz_t());
    if (g != 1) continue;

    PaillierPrivateKey sk;
    sk.p = p;
    sk.q = q;
    mpz_lcm(sk.lambda.get_mpz_t(), mpz_class(p - 1).get_mpz_t(),
            mpz_class(q - 1).get_mpz_t());
    if (mpz_invert(sk.mu.get_mpz_t(), sk.lambda.get_mpz_t(), n.get_mpz_t()) ==
        0) {
      continue;
    }
    sk.public_key = MakePublicKey(n, bit_length);
    return {sk.public_key, sk};
  }
}

Ciphertext Encrypt(const PaillierPublicKey& pk, const mpz_class& m,
                   PaillierRng& rng) {
  CheckPlaintext(pk, m, "plaintext");
  mpz_class r;
  mpz_class g;
  do {
    r = rng.Below(pk.n);
    mpz_gcd(g.get_mpz_t(), r.get_mpz_t(), pk.n.get_mpz_t());
  } while (sgn(r) == 0 || g != 1);
  mpz_class rn;
  mpz_powm(rn.get_mpz_t(), r.get_mpz_t(), pk.n.get_mpz_t(),
           pk.n_squared.get_mpz_t());
  mpz_class c = GeneratorPower(pk, m) * rn;
  mpz_mod(c.get_mpz_t(), c.get_mpz_t(), pk.n_squared.get_mpz_t());
  return {std::move(c), pk.key_id};
}

Ciphertext Encrypt(const PaillierPublicKey& pk, const mpz_class& m,
                   std::uint64_t seed) {
  PaillierRng rng(seed);
  return Encrypt(pk, m, rng);
}

mpz_class Decrypt(const PaillierPrivateKey& sk, const Ciphertext& c) {
  const PaillierPublicKey& pk = sk.public_key;
  CheckKey(pk, c);
  if (sgn(c.value) < 0 || c.value >= pk.n_squared) {
    throw std::out_of_range("ciphertext outside [0, n^2)");
  }
  mpz_class u;
  mpz_powm(u.get_mpz_t(), c.value.get_mpz_t(), sk.lambda.get_mpz_t(),
           pk.n_squared.get_mpz_t());
  mpz_class l = (u - 1) / pk.n;
  mpz_class m = l * sk.mu;
  mpz_mod(m.get_mpz_t(), m.get_mpz_t(), pk.n.get_mpz_t());
  return m;
}

Ciphertext AddCipher(const PaillierPublicKey& pk, const Ciphertext& a,
                     const Ciphertext& b) {
  CheckKey(pk, a);
  CheckKey(pk, b);
  mpz_class c = a.value * b.value;
  mpz_mod(c.get_mpz_t(), c.get_mpz_t(), pk.n_squared.get_mpz_t());
  return {std::move(c), pk.key_id};
}

Ciphertext AddPlain(const PaillierPublicKey& pk, const Ciphertext& a,
                    const mpz_class& m) {
  CheckKey(pk, a);
  CheckPlaintext(pk, m, "plaintext addend");
  mpz_class c = a.value * GeneratorPower(pk, m);
  mpz_mod(c.get_mpz_t(), c.get_mpz_t(), pk.n_squared.get_mpz_t());
  return {std::move(c), pk.key_id};
}

Ciphertext MulPlain(const PaillierPublicKey& pk, const Ciphertext& a,
                    const mpz_class& k) {
  CheckKey(pk, a);
  CheckPlaintext(pk, k, "plaintext factor");
  mpz_class c;
  mpz_powm(c.get_mpz_t(), a.value.get_mpz_t(), k.get_mpz_t(),
           pk.n_squared.get_mpz_t());
  return {std::move(c), pk.key_id};
}

Bytes PaillierPublicKey::Serialize() const {
  ByteWriter w;
  w.PutU32(kPublicKeyMagic);
  w.PutU32(bit_length);
  w.PutU64(key_id);
  w.PutBigInt(n);
  return w.Take();
}

PaillierPublicKey PaillierPublicKey::Deserialize(
    std::span<const std::uint8_t> b) {
  ByteReader r(b);
  if (r.GetU32() != kPublicKeyMagic) throw DecodeError("not a public key");
  std::uint32_t bits = r.GetU32();
  std::uint64_t id = r.GetU64();
  PaillierPublicKey pk = MakePublicKey(r.GetBigInt(), bits);
  if (pk.key_id != id) throw DecodeError("public key id does not match n");
  return pk;
}

Bytes PaillierPrivateKey::Serialize() const {
  ByteWriter w;
  w.PutU32(kPrivateKeyMagic);
  w.PutU32(public_key.bit_length);
  w.PutU64(public_key.key_id);
  w.PutBigInt(p);
  w.PutBigInt(q);
  w.PutBigInt(lambda);
  w.PutBigInt(mu);
  return w.Take();
}

PaillierPrivateKey PaillierPrivateKey::Deserialize(
    std::span<const std::uint8_t> b) {
  ByteReader r(b);
  if (r.GetU32() != kPrivateKeyMagic) throw DecodeError("not a private key");
  std::uint32_t bits = r.GetU32();
  std::uint64_t id = r.GetU64();
  PaillierPrivateKey sk;
  sk.p = r.GetBigInt();
  sk.q = r.GetBigInt();
  sk.lambda = r.GetBigInt();
  sk.mu = r.GetBigInt();
  sk.public_key = MakePublicKey(sk.p * sk.q, bits);
  if (sk.public_key.key_id != id) {
    throw DecodeError("private key id does not match factors");
  }
  return sk;
}

Bytes SerializeCiphertext(const Ciphertext& c) {
  ByteWriter w;
  w.PutU64(c.key_id);
  w.PutBigInt(c.value);
  return w.Take();
}

Ciphertext DeserializeCiphertext(ByteReader& r) {
  Ciphertext c;
  c.key_id = r.GetU64();
  c.value = r.GetBigInt();
  return c;
}

}  // namespace sensecrypt
