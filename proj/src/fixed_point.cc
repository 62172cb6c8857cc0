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

#include "sensecrypt/fixed_point.h"

#include <cmath>
#include <string>

namespace sensecrypt {

FixedPointCodec::FixedPointCodec(mpz_class modulus, int scale_bits,
                                 double max_magnitude)
    : modulus_(std::move(modulus)),
      half_(modulus_ / 2),
      scale_bits_(scale_bits),
      max_magnitude_(max_magnitude) {
  if (scale_bits < 0 || scale_bits > 900) {
    throw std::invalid_argument("scale_bits out of range");
  }
  if (!(max_magnitude > 0) || !std::isfinite(max_magnitude)) {
    throw std::invalid_argument("max_magnitude must be positive and finite");
  }
  mpz_class limit;
  mpz_set_d(limit.get_mpz_t(), std::ceil(max_magnitude));
  mpz_mul_2exp(limit.get_mpz_t(), limit.get_mpz_t(), scale_bits);
  if (limit >= half_) {
    throw std::invalid_argument(
        "modulus too small for max_magnitude at this scale");
  }
}

double FixedPointCodec::resolution() const {
  return std::ldexp(1.0, -scale_bits_);
}

mpz_class FixedPointCodec::Encode(double x) const {
  if (!std::isfinite(x) || std::fabs(x) > max_magnitude_) {
    throw CodecOverflowError("value " + std::to_string(x) +
                             " exceeds codec magnitude bound");
  }
  // Split to keep the scaled value exact even when 2^scale_bits exceeds the
  // double exponent range of a plain ldexp.
  double frac = 0.0;
  int e = 0;
  frac = std::frexp(x, &e);
  mpz_class m;
  // frac * 2^53 is an exact integer.
  mpz_set_d(m.get_mpz_t(), std::ldexp(frac, 53));
  const int shift = e - 53 + scale_bits_;
  if (shift >= 0) {
    mpz_mul_2exp(m.get_mpz_t(), m.get_mpz_t(), shift);
  } else {
    // Round half away from zero.
    mpz_class a = abs(m);
    mpz_class half;
    mpz_setbit(half.get_mpz_t(), -shift - 1);
    a += half;
    mpz_fdiv_q_2exp(a.get_mpz_t(), a.get_mpz_t(), -shift);
    m = sgn(m) < 0 ? mpz_class(-a) : a;
  }
  if (sgn(m) < 0) m += modulus_;
  return m;
}

double FixedPointCodec::Decode(const mpz_class& m) const {
  if (sgn(m) < 0 || m >= modulus_) {
    throw std::out_of_range("encoded value outside [0, n)");
  }
  mpz_class v = m > half_ ? mpz_class(m - modulus_) : m;
  long exp = 0;
  double mant = mpz_get_d_2exp(&exp, v.get_mpz_t());
  return std::ldexp(mant, static_cast<int>(exp) - scale_bits_);
}

double FixedPointCodec::DecodeSum(const mpz_class& m, int terms) const {
  double v = Decode(m);
  if (std::fabs(v) > max_magnitude_ * terms) {
    throw CodecOverflowError("decoded aggregate exceeds headroom");
  }
  return v;
}

FixedPointCodec FixedPointCodec::WithScale(int scale_bits) const {
  return FixedPointCodec(modulus_, scale_bits, max_magnitude_);
}

}  // namespace sensecrypt
