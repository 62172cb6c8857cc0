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

#include "sensecrypt/byte_io.h"

#include <bit>
#include <fstream>
#include <iterator>

namespace sensecrypt {

void ByteWriter::PutU32(std::uint32_t v) {
  for (int shift = 24; shift >= 0; shift -= 8) {
    out_.push_back(static_cast<std::uint8_t>(v >> shift));
  }
}

void ByteWriter::PutU64(std::uint64_t v) {
  for (int shift = 56; shift >= 0; shift -= 8) {
    out_.push_back(static_cast<std::uint8_t>(v >> shift));
  }
}

void ByteWriter::PutF64(double v) { PutU64(std::bit_cast<std::uint64_t>(v)); }

void ByteWriter::PutBytes(std::span<const std::uint8_t> b) {
  out_.insert(out_.end(), b.begin(), b.end());
}

void ByteWriter::PutBigInt(const mpz_class& v) {
  Bytes mag = BigIntToBytes(v);
  PutU32(static_cast<std::uint32_t>(mag.size()));
  PutBytes(mag);
}

void ByteWriter::PutString(const std::string& s) {
  PutU32(static_cast<std::uint32_t>(s.size()));
  out_.insert(out_.end(), s.begin(), s.end());
}

void ByteReader::Need(std::size_t n) const {
  if (in_.size() - pos_ < n) {
    throw DecodeError("truncated buffer: need " + std::to_string(n) +
                      " bytes, have " + std::to_string(in_.size() - pos_));
  }
}

std::uint8_t ByteReader::GetU8() {
  Need(1);
  return in_[pos_++];
}

std::uint32_t ByteReader::GetU32() {
  Need(4);
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v = (v << 8) | in_[pos_++];
  return v;
}

std::uint64_t ByteReader::GetU64() {
  Need(8);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v = (v << 8) | in_[pos_++];
  return v;
}

double ByteReader::GetF64() { return std::bit_cast<double>(GetU64()); }

std::span<const std::uint8_t> ByteReader::GetBytes(std::size_t n) {
  Need(n);
  auto s = in_.subspan(pos_, n);
  pos_ += n;
  return s;
}

mpz_class ByteReader::GetBigInt() {
  std::uint32_t len = GetU32();
  return BigIntFromBytes(GetBytes(len));
}

std::string ByteReader::GetString() {
  std::uint32_t len = GetU32();
  auto b = GetBytes(len);
  return std::string(b.begin(), b.end());
}

Bytes BigIntToBytes(const mpz_class& v) {
  if (sgn(v) < 0) throw std::invalid_argument("negative integer not encodable");
  if (sgn(v) == 0) return {};
  std::size_t count = (mpz_sizeinbase(v.get_mpz_t(), 2) + 7) / 8;
  Bytes out(count);
  std::size_t written = 0;
  mpz_export(out.data(), &written, 1, 1, 1, 0, v.get_mpz_t());
  out.resize(written);
  return out;
}

mpz_class BigIntFromBytes(std::span<const std::uint8_t> b) {
  mpz_class v;
  if (!b.empty()) mpz_import(v.get_mpz_t(), b.size(), 1, 1, 1, 0, b.data());
  return v;
}

Bytes EncodeRealVector(std::span<const double> v) {
  ByteWriter w;
  w.PutU64(v.size());
  for (double x : v) w.PutF64(x);
  return w.Take();
}

std::vector<double> DecodeRealVector(std::span<const std::uint8_t> b) {
  ByteReader r(b);
  std::uint64_t n = r.GetU64();
  if (r.remaining() != n * 8) {
    throw DecodeError("real vector length prefix does not match payload");
  }
  std::vector<double> out(n);
  for (auto& x : out) x = r.GetF64();
  return out;
}

Bytes ReadFileBytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  return Bytes(std::istreambuf_iterator<char>(in), {});
}

void WriteFileBytes(const std::string& path, std::span<const std::uint8_t> b) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out.write(reinterpret_cast<const char*>(b.data()),
            static_cast<std::streamsize>(b.size()));
}

}  // namespace sensecrypt
