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

#ifndef SENSECRYPT_FIXED_POINT_H_
#define SENSECRYPT_FIXED_POINT_H_

#include <stdexcept>

#include <gmpxx.h>

namespace sensecrypt {

class CodecOverflowError : public std::overflow_error {
 public:
  using std::overflow_error::overflow_error;
};

inline constexpr int kDefaultScaleBits = 40;
inline constexpr double kDefaultMaxMagnitude = 1 << 20;

// Maps reals to Paillier plaintexts as round(x * 2^scale_bits). Negative
// values wrap to n - |v|; on decode, residues above n/2 are read as negative.
class FixedPointCodec {
 public:
  FixedPointCodec(mpz_class modulus, int scale_bits = kDefaultScaleBits,
                  double max_magnitude = kDefaultMaxMagnitude);

  mpz_class Encode(double x) const;
  double Decode(const mpz_class& m) const;
  // Decodes a sum of `terms` encoded values, rejecting results whose
  // magnitude exceeds terms * max_magnitude (evidence of wraparound).
  double DecodeSum(const mpz_class& m, int terms) const;

  // Same modulus and bound with a different scale; used when plaintext
  // factors carry their own fixed-point exponent.
  FixedPointCodec WithScale(int scale_bits) const;

  int scale_bits() const { return scale_bits_; }
  double max_magnitude() const { return max_magnitude_; }
  const mpz_class& modulus() const { return modulus_; }
  double resolution() const;

 private:
  mpz_class modulus_;
  mpz_class half_;
  int scale_bits_;
  double max_magnitude_;
};

}  // namespace sensecrypt

#endif  // SENSECRYPT_FIXED_POINT_H_
