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

// Measures per-operation Paillier and local-training costs. The figures feed
// the linear coefficients of the simulator's timing model.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>

#include "CLI11.hpp"
#include "sensecrypt/fixed_point.h"
#include "sensecrypt/model_kit.h"
#include "sensecrypt/paillier.h"

namespace {

using Clock = std::chrono::steady_clock;

double Seconds(Clock::time_point a, Clock::time_point b) {
  return std::chrono::duration<double>(b - a).count();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Paillier and training cost benchmark"};
  unsigned bits = sensecrypt::kProductionKeyBits;
  int ops = 20;
  std::uint64_t seed = 1;
  app.add_option("--bits", bits, "modulus bit length");
  app.add_option("--ops", ops, "operations per measurement")->check(CLI::PositiveNumber);
  app.add_option("--seed", seed, "seed");
  CLI11_PARSE(app, argc, argv);

  const auto [pk, sk] = sensecrypt::GenerateKeyPair(bits, seed);
  const sensecrypt::FixedPointCodec codec(pk.n);
  sensecrypt::PaillierRng rng(seed + 1);
  std::vector<sensecrypt::Ciphertext> cts;

  auto t0 = Clock::now();
  for (int i = 0; i < ops; ++i) cts.push_back(sensecrypt::Encrypt(pk, codec.Encode(0.001 * i), rng));
  auto t1 = Clock::now();
  double acc = 0.0;
  for (const auto& c : cts) acc += codec.Decode(sensecrypt::Decrypt(sk, c));
  auto t2 = Clock::now();
  sensecrypt::Ciphertext sum = cts[0];
  for (int i = 1; i < ops; ++i) sum = sensecrypt::AddCipher(pk, sum, cts[i]);
  auto t3 = Clock::now();

  const auto data = sensecrypt::SynthBlobs(10, 100, 16, 1.0, seed);
  const auto model = sensecrypt::MLPModel::Create(16, sensecrypt::kDefaultHidden, 10, seed);
  sensecrypt::TrainOptions opts;
  opts.epochs = 5;
  auto t4 = Clock::now();
  const auto result = sensecrypt::TrainLocal(model, data, opts);
  auto t5 = Clock::now();

  std::printf("bits=%u ops=%d\n", bits, ops);
  std::printf("encrypt_seconds_per_param=%.6e\n", Seconds(t0, t1) / ops);
  std::printf("decrypt_seconds_per_param=%.6e\n", Seconds(t1, t2) / ops);
  std::printf("add_cipher_seconds=%.6e\n", Seconds(t2, t3) / (ops - 1 > 0 ? ops - 1 : 1));
  std::printf("train_seconds_per_sample=%.6e\n",
              Seconds(t4, t5) / (static_cast<double>(data.size()) * opts.epochs));
  std::printf("checksum=%.6f loss=%.6f\n", acc, result.epoch_losses.back());
  return 0;
}
