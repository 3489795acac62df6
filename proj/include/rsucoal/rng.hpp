// Copyright 2026 The rsucoal Authors.
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

#ifndef RSUCOAL_RNG_HPP
#define RSUCOAL_RNG_HPP

#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

namespace rsucoal {

// mt19937_64 engine with hand-rolled draw helpers. The standard
// distributions are implementation-defined, which would make results
// depend on the standard library; these helpers keep every stream
// bit-reproducible for a given seed on any platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform double in [0, 1), 53-bit resolution.
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform integer in [lo, hi], both inclusive.
  int next_int(int lo, int hi) {
    if (lo > hi) throw std::invalid_argument("rng: empty integer range");
    const std::uint64_t range = static_cast<std::uint64_t>(hi) - static_cast<std::uint64_t>(lo) + 1;
    return lo + static_cast<int>(next_below(range));
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t k = v.size(); k > 1; --k) {
      const std::size_t j = static_cast<std::size_t>(next_below(k));
      std::swap(v[k - 1], v[j]);
    }
  }

 private:
  // Unbiased draw in [0, range) by rejection on the top of the 64-bit space.
  std::uint64_t next_below(std::uint64_t range) {
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % range + 1) % range;
    std::uint64_t x;
    do {
      x = next_u64();
    } while (x > limit);
    return x % range;
  }

  std::mt19937_64 engine_;
};

// SplitMix64 finalizer, used to mix seeds for derived streams.
inline std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t root, std::uint64_t index) {
  return mix_seed(root ^ mix_seed(index + 1));
}

}  // namespace rsucoal

#endif  // RSUCOAL_RNG_HPP
