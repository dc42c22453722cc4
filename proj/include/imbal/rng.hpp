/*
 * Copyright 2026 The imbal Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef IMBAL_RNG_HPP_
#define IMBAL_RNG_HPP_

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace imbal {

// 64-bit mixing function (SplitMix64 finalizer).
uint64_t Mix64(uint64_t x);

// Combines two 64-bit values into one well-distributed value.
uint64_t HashCombine(uint64_t a, uint64_t b);

// Seeded pseudorandom stream.
//
// The engine is std::mt19937_64, whose output sequence is fixed by the C++
// standard. All derived draws (uniform reals, bounded integers, normals,
// shuffles) are implemented here instead of via <random> distributions, whose
// algorithms are implementation-defined. Equal seeds therefore give equal
// streams on every platform and standard library.
//
// Children: Child(i) returns an independent stream seeded with
// HashCombine(seed, i). The parent stream is not advanced.
class Rng {
 public:
  explicit Rng(uint64_t seed = 0) : seed_(seed), engine_(seed) {}

  uint64_t seed() const { return seed_; }

  uint64_t NextU64() { return engine_(); }

  // Uniform in [0, 1) with 53 bits of resolution.
  double Uniform01();

  // Uniform in [lo, hi).
  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform01(); }

  // Unbiased uniform integer in [0, n). n must be > 0.
  uint64_t Below(uint64_t n);

  // Uniform integer in [lo, hi] inclusive.
  int64_t IntInclusive(int64_t lo, int64_t hi);

  bool Bernoulli(double p) { return Uniform01() < p; }

  // Standard normal via Box-Muller; one value per call.
  double Normal();

  template <typename T>
  void Shuffle(std::vector<T>& values) {
    for (size_t i = values.size(); i > 1; --i) {
      size_t j = static_cast<size_t>(Below(i));
      std::swap(values[i - 1], values[j]);
    }
  }

  // k distinct indices from [0, n), in draw order (partial Fisher-Yates).
  std::vector<size_t> SampleWithoutReplacement(size_t n, size_t k);

  Rng Child(uint64_t index) const { return Rng(HashCombine(seed_, index)); }

 private:
  uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace imbal

#endif  // IMBAL_RNG_HPP_
