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

#ifndef SENSECRYPT_BYTE_IO_H_
#define SENSECRYPT_BYTE_IO_H_

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <gmpxx.h>

namespace sensecrypt {

using Bytes = std::vector<std::uint8_t>;

// Raised when a serialized buffer is truncated or malformed.
class DecodeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Appends fixed-width and length-prefixed fields. Integers are big-endian;
// doubles are written as their IEEE-754 bit pattern in big-endian order.
class ByteWriter {
 public:
  void PutU8(std::uint8_t v) { out_.push_back(v); }
  void PutU32(std::uint32_t v);
  void PutU64(std::uint64_t v);
  void PutF64(double v);
  void PutBytes(std::span<const std::uint8_t> b);
  // 4-byte length prefix followed by the big-endian magnitude.
  void PutBigInt(const mpz_class& v);
  void PutString(const std::string& s);

  const Bytes& bytes() const { return out_; }
  Bytes Take() { return std::move(out_); }

 private:
  Bytes out_;
};

class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> in) : in_(in) {}

  std::uint8_t GetU8();
  std::uint32_t GetU32();
  std::uint64_t GetU64();
  double GetF64();
  std::span<const std::uint8_t> GetBytes(std::size_t n);
  mpz_class GetBigInt();
  std::string GetString();

  bool AtEnd() const { return pos_ == in_.size(); }
  std::size_t remaining() const { return in_.size() - pos_; }

 private:
  void Need(std::size_t n) const;

  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

// Big-endian magnitude of a nonnegative integer (empty for zero).
Bytes BigIntToBytes(const mpz_class& v);
mpz_class BigIntFromBytes(std::span<const std::uint8_t> b);

// Flat real-vector format shared by parameters, gradients and sensitivities:
// u64 element count followed by that many 8-byte reals.
Bytes EncodeRealVector(std::span<const double> v);
std::vector<double> DecodeRealVector(std::span<const std::uint8_t> b);

Bytes ReadFileBytes(const std::string& path);
void WriteFileBytes(const std::string& path, std::span<const std::uint8_t> b);

}  // namespace sensecrypt

#endif  // SENSECRYPT_BYTE_IO_H_
