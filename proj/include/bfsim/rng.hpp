// Copyright 2026 The bfsim Authors
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

#ifndef BFSIM_RNG_HPP_
#define BFSIM_RNG_HPP_

#include <cstdint>
#include <random>

namespace bfsim {

// Deterministic 64-bit generator. Distributions are implemented here rather
// than via <random> adaptors so that streams are identical across standard
// libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Independent stream for replica `index` derived from a master seed.
  static Rng ForStream(std::uint64_t master_seed, std::uint64_t index) {
    return Rng(DeriveSeed(master_seed, index));
  }

  static std::uint64_t DeriveSeed(std::uint64_t master_seed,
                                  std::uint64_t index) {
    const std::uint64_t z = master_seed ^ (0x9e3779b97f4a7c15ULL * (index + 1));
    return Mix(Mix(z) + index);
  }

  std::uint64_t Next() { return engine_(); }

  // Uniform integer in [0, bound), bound > 0 (Lemire's multiply-shift).
  std::uint64_t Below(std::uint64_t bound) {
    unsigned __int128 m = static_cast<unsigned __int128>(Next()) * bound;
    auto low = static_cast<std::uint64_t>(m);
    if (low < bound) {
      const std::uint64_t threshold = (0 - bound) % bound;
      while (low < threshold) {
        m = static_cast<unsigned __int128>(Next()) * bound;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  // Uniform double in [0, 1).
  double Uniform() { return static_cast<double>(Next() >> 11) * 0x1.0p-53; }

 private:
  static std::uint64_t Mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::mt19937_64 engine_;
};

}  // namespace bfsim

#endif  // BFSIM_RNG_HPP_
