// Copyright 2026 The tapreid Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Seed derivation and portable sampling helpers.
//
// std::mt19937_64 has a standardized output sequence, but the standard
// distributions (uniform_int_distribution, normal_distribution, shuffle) do
// not. Everything that must be reproducible across platforms goes through the
// helpers below instead.

#ifndef TAPREID_CORE_RANDOM_H_
#define TAPREID_CORE_RANDOM_H_

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <utility>

namespace tapreid {

// SplitMix64 finalizer (Steele, Lea, Flood 2014). Bijective on 64 bits.
constexpr std::uint64_t Avalanche64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Derives an independent stream seed from a master seed and a key such as a
// card id or a cell index: Avalanche64(seed ^ Avalanche64(key)).
constexpr std::uint64_t MixSeed(std::uint64_t seed, std::uint64_t key) {
  return Avalanche64(seed ^ Avalanche64(key));
}

using Rng = std::mt19937_64;

// Uniform integer in [0, bound) by rejection; bound must be > 0.
inline std::uint64_t UniformBelow(Rng& rng, std::uint64_t bound) {
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % bound;
}

// Uniform double in [0, 1) with 53 random bits.
inline double UniformUnit(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform double in (0, 1).
inline double UniformOpenUnit(Rng& rng) {
  double u;
  do {
    u = UniformUnit(rng);
  } while (u == 0.0);
  return u;
}

inline bool Bernoulli(Rng& rng, double p) { return UniformUnit(rng) < p; }

// Standard normal via Box-Muller (one draw, second value discarded).
inline double StandardNormal(Rng& rng) {
  double u1 = UniformOpenUnit(rng);
  double u2 = UniformUnit(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

// Fisher-Yates.
template <typename T>
void Shuffle(std::span<T> items, Rng& rng) {
  for (size_t i = items.size(); i > 1; --i) {
    size_t j = static_cast<size_t>(UniformBelow(rng, i));
    std::swap(items[i - 1], items[j]);
  }
}

}  // namespace tapreid

#endif  // TAPREID_CORE_RANDOM_H_
