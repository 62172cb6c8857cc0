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

#include <random>

#include <gtest/gtest.h>

namespace sensecrypt {
namespace {

// Decryption through the CRT over p and q, independent of lambda and mu.
mpz_class CrtDecrypt(const PaillierPrivateKey& sk, const mpz_class& c) {
  auto half = [&](const mpz_class& p) {
    const mpz_class p2 = p * p;
    const mpz_class e = p - 1;
    mpz_class u, gp;
    mpz_powm(u.get_mpz_t(), c.get_mpz_t(), e.get_mpz_t(), p2.get_mpz_t());
    mpz_powm(gp.get_mpz_t(), sk.public_key.g.get_mpz_t(), e.get_mpz_t(), p2.get_mpz_t());
    const mpz_class lu = (u - 1) / p;
    const mpz_class lg = (gp - 1) / p;
    mpz_class h;
    mpz_invert(h.get_mpz_t(), lg.get_mpz_t(), p.get_mpz_t());
    mpz_class m = lu * h;
    mpz_mod(m.get_mpz_t(), m.get_mpz_t(), p.get_mpz_t());
    return m;
  };
  const mpz_class mp = half(sk.p);
  const mpz_class mq = half(sk.q);
  mpz_class qinv;
  mpz_invert(qinv.get_mpz_t(), sk.q.get_mpz_t(), sk.p.get_mpz_t());
  mpz_class t = (mp - mq) * qinv;
  mpz_mod(t.get_mpz_t(), t.get_mpz_t(), sk.p.get_mpz_t());
  return mq + t * sk.q;
}

class PaillierTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    auto kp = GenerateKeyPair(256, 42);
    pk_ = new PaillierPublicKey(kp.first);
    sk_ = new PaillierPrivateKey(kp.second);
  }
  static void TearDownTestSuite() {
    delete pk_;
    delete sk_;
  }
  static PaillierPublicKey* pk_;
  static PaillierPrivateKey* sk_;
};
PaillierPublicKey* PaillierTest::pk_ = nullptr;
PaillierPrivateKey* PaillierTest::sk_ = nullptr;

TEST_F(PaillierTest, KeyStructure) {
  EXPECT_EQ(mpz_sizeinbase(pk_->n.get_mpz_t(), 2), 256u);
  EXPECT_EQ(pk_->g, pk_->n + 1);
  EXPECT_EQ(pk_->n_squared, pk_->n * pk_->n);
  EXPECT_EQ(sk_->p * sk_->q, pk_->n);
  EXPECT_NE(mpz_probab_prime_p(sk_->p.get_mpz_t(), 30), 0);
  EXPECT_NE(mpz_probab_prime_p(sk_->q.get_mpz_t(), 30), 0);
  mpz_class lcm;
  mpz_lcm(lcm.get_mpz_t(), mpz_class(sk_->p - 1).get_mpz_t(),
          mpz_class(sk_->q - 1).get_mpz_t());
  EXPECT_EQ(sk_->lambda, lcm);
  mpz_class check = sk_->lambda * sk_->mu;
  mpz_mod(check.get_mpz_t(), check.get_mpz_t(), pk_->n.get_mpz_t());
  EXPECT_EQ(check, 1);
  EXPECT_EQ(pk_->key_id, KeyIdForModulus(pk_->n));
}

TEST_F(PaillierTest, KeyGenerationIsDeterministic) {
  const auto a = GenerateKeyPair(128, 9);
  const auto b = GenerateKeyPair(128, 9);
  const auto c = GenerateKeyPair(128, 10);
  EXPECT_EQ(a.first.n, b.first.n);
  EXPECT_NE(a.first.n, c.first.n);
}

TEST_F(PaillierTest, RejectsTinyKeys) {
  EXPECT_THROW(GenerateKeyPair(32, 1), std::invalid_argument);
}

TEST_F(PaillierTest, EncryptionMatchesClosedForm) {
  // With g = n + 1, Enc(m; r) = (1 + m n) r^n mod n^2.
  PaillierRng rng(5);
  PaillierRng replay(5);
  const mpz_class m("12345678901234567890");
  const Ciphertext c = Encrypt(*pk_, m, rng);
  mpz_class r, gcd;
  do {
    r = replay.Below(pk_->n);
    mpz_gcd(gcd.get_mpz_t(), r.get_mpz_t(), pk_->n.get_mpz_t());
  } while (sgn(r) == 0 || gcd != 1);
  mpz_class rn;
  mpz_powm(rn.get_mpz_t(), r.get_mpz_t(), pk_->n.get_mpz_t(), pk_->n_squared.get_mpz_t());
  mpz_class expect = (1 + m * pk_->n) * rn;
  mpz_mod(expect.get_mpz_t(), expect.get_mpz_t(), pk_->n_squared.get_mpz_t());
  EXPECT_EQ(c.value, expect);
}

TEST_F(PaillierTest, RoundTripAgainstCrtOracle) {
  PaillierRng rng(2);
  gmp_randclass draw(gmp_randinit_default);
  draw.seed(3);
  for (int t = 0; t < 50; ++t) {
    const mpz_class m = draw.get_z_range(pk_->n);
    const Ciphertext c = Encrypt(*pk_, m, rng);
    EXPECT_EQ(Decrypt(*sk_, c), m);
    EXPECT_EQ(CrtDecrypt(*sk_, c.value), m);
  }
  EXPECT_EQ(Decrypt(*sk_, Encrypt(*pk_, 0, rng)), 0);
  EXPECT_EQ(Decrypt(*sk_, Encrypt(*pk_, pk_->n - 1, rng)), pk_->n - 1);
}

TEST_F(PaillierTest, EncryptionIsRandomized) {
  PaillierRng rng(7);
  const Ciphertext a = Encrypt(*pk_, 11, rng);
  const Ciphertext b = Encrypt(*pk_, 11, rng);
  EXPECT_NE(a.value, b.value);
  EXPECT_EQ(Decrypt(*sk_, a), Decrypt(*sk_, b));
}

TEST_F(PaillierTest, HomomorphicOperations) {
  gmp_randclass draw(gmp_randinit_default);
  draw.seed(11);
  PaillierRng rng(12);
  for (int t = 0; t < 30; ++t) {
    const mpz_class a = draw.get_z_range(pk_->n);
    const mpz_class b = draw.get_z_range(pk_->n);
    const mpz_class k = draw.get_z_range(pk_->n);
    const Ciphertext ca = Encrypt(*pk_, a, rng);
    const Ciphertext cb = Encrypt(*pk_, b, rng);
    mpz_class sum = a + b;
    mpz_mod(sum.get_mpz_t(), sum.get_mpz_t(), pk_->n.get_mpz_t());
    mpz_class prod = a * k;
    mpz_mod(prod.get_mpz_t(), prod.get_mpz_t(), pk_->n.get_mpz_t());
    EXPECT_EQ(CrtDecrypt(*sk_, AddCipher(*pk_, ca, cb).value), sum);
    EXPECT_EQ(CrtDecrypt(*sk_, AddPlain(*pk_, ca, b).value), sum);
    EXPECT_EQ(CrtDecrypt(*sk_, MulPlain(*pk_, ca, k).value), prod);
  }
}

TEST_F(PaillierTest, OutOfRangePlaintextRejected) {
  PaillierRng rng(1);
  EXPECT_THROW(Encrypt(*pk_, pk_->n, rng), std::out_of_range);
  EXPECT_THROW(Encrypt(*pk_, -1, rng), std::out_of_range);
}

TEST_F(PaillierTest, KeyMismatchRejected) {
  const auto other = GenerateKeyPair(256, 43);
  PaillierRng rng(1);
  const Ciphertext a = Encrypt(*pk_, 1, rng);
  const Ciphertext b = Encrypt(other.first, 1, rng);
  EXPECT_THROW(AddCipher(*pk_, a, b), KeyMismatchError);
  EXPECT_THROW(Decrypt(other.second, a), KeyMismatchError);
}

TEST_F(PaillierTest, SerializationRoundTrip) {
  const auto pk2 = PaillierPublicKey::Deserialize(pk_->Serialize());
  EXPECT_EQ(pk2.n, pk_->n);
  EXPECT_EQ(pk2.key_id, pk_->key_id);
  EXPECT_EQ(pk2.bit_length, pk_->bit_length);
  const auto sk2 = PaillierPrivateKey::Deserialize(sk_->Serialize());
  EXPECT_EQ(sk2.lambda, sk_->lambda);
  EXPECT_EQ(sk2.mu, sk_->mu);
  EXPECT_EQ(sk2.p, sk_->p);
  EXPECT_EQ(sk2.q, sk_->q);
  PaillierRng rng(3);
  const Ciphertext c = Encrypt(*pk_, 99, rng);
  const Bytes b = SerializeCiphertext(c);
  ByteReader r(b);
  EXPECT_EQ(DeserializeCiphertext(r), c);
}

TEST_F(PaillierTest, CorruptKeyBytesRejected) {
  Bytes b = pk_->Serialize();
  b.resize(b.size() / 2);
  EXPECT_ANY_THROW(PaillierPublicKey::Deserialize(b));
}

}  // namespace
}  // namespace sensecrypt
