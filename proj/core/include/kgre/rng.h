// Copyright 2026 The kgre Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef KGRE_RNG_H_
#define KGRE_RNG_H_

#include <cstdint>
#include <random>
#include <vector>

namespace kgre {

// Mixes a 64-bit value (splitmix64 finalizer).
uint64_t Mix64(uint64_t x);

// Derives a stable sub-seed from a seed and a list of keys.
uint64_t DeriveSeed(uint64_t seed, std::initializer_list<uint64_t> keys);

// Seeded generator with portable distributions. std::mt19937_64 output is
// fixed by the standard; the distributions below are written out so fixtures
// and samples are byte-identical across standard libraries.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  uint64_t Next() { return engine_(); }

  // Uniform integer in [0, n). n must be > 0.
  uint64_t Below(uint64_t n);

  // Uniform double in [0, 1).
  double Uniform();
  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform(); }

  // Standard normal via Box-Muller.
  double Normal();

  bool Bernoulli(double p) { return Uniform() < p; }

  // Fisher-Yates shuffle.
  template <typename T>
  void Shuffle(std::vector<T>& items) {
    for (size_t i = items.size(); i > 1; --i) {
      size_t j = Below(i);
      std::swap(items[i - 1], items[j]);
    }
  }

  // k distinct indices from [0, n), in the order drawn.
  std::vector<uint32_t> SampleWithoutReplacement(uint32_t n, uint32_t k);

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace kgre

#endif  // KGRE_RNG_H_
