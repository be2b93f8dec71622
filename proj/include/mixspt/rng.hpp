// Copyright 2026 mixspt Contributors
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

#pragma once

#include <cstdint>
#include <random>

namespace mixspt {

inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Seeded source with deterministic child streams. Draws are built from raw 64-bit
// outputs so results do not depend on the standard library's distributions.
class Rng {
 public:
  explicit Rng(uint64_t seed = 0) : seed_(seed), eng_(splitmix64(seed)) {}

  uint64_t seed() const { return seed_; }
  Rng split(uint64_t stream) const {
    return Rng(splitmix64(seed_ ^ splitmix64(stream + 0x632be59bd9b4e019ULL)));
  }

  uint64_t next() { return eng_(); }
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  bool coin() { return next() >> 63; }
  bool bernoulli(double p) { return uniform() < p; }
  int pm1() { return coin() ? -1 : 1; }
  // Unbiased integer in [0, n).
  uint64_t below(uint64_t n) {
    uint64_t limit = ~uint64_t{0} - (~uint64_t{0} % n);
    uint64_t v;
    do v = next(); while (v >= limit);
    return v % n;
  }

 private:
  uint64_t seed_;
  std::mt19937_64 eng_;
};

}  // namespace mixspt
