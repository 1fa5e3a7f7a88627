// Copyright 2026 The skfl Authors
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

#ifndef SKFL_COMMON_HPP
#define SKFL_COMMON_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace skfl {

struct InvalidSpec : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DimensionMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct InvalidParam : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct IndexOutOfRange : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct GuardViolated : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NonFinite : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct EmptyClientList : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct SingularSystem : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NoLipschitzBound : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct HypothesisViolated : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct RankDeficient : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// splitmix64 finalizer (Steele/Lea/Flood). Used both as the seed-mixing
/// primitive and to bootstrap the main generator state.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

/// Per-round operator seed. All clients evaluate this locally, so a
/// predetermined sequence of independent operators is shared without any
/// extra communication.
inline std::uint64_t derive_round_seed(std::uint64_t master_seed,
                                       std::uint64_t round) {
  return mix64(master_seed ^ (0x9e3779b97f4a7c15ull * (round + 1)));
}

/// xoshiro256** with splitmix64 state expansion. Hand-rolled so that the
/// stream (including the Gaussian and uniform mappings below) is identical
/// on every platform; std:: distributions are implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t s = seed;
    for (auto& word : state_) {
      s += 0x9e3779b97f4a7c15ull;
      word = mix64(s);
    }
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  /// Uniform double in [0, 1), 53 random bits.
  double next_unit() { return double(next_u64() >> 11) * 0x1.0p-53; }

  /// Standard normal via Box-Muller; one cached value of state.
  double next_gaussian() {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    double u1 = 0.0;
    while (u1 == 0.0) u1 = next_unit();
    const double u2 = next_unit();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * M_PI * u2;
    cached_ = r * std::sin(theta);
    have_cached_ = true;
    return r * std::cos(theta);
  }

  /// Uniform integer in [0, n), unbiased (rejection sampling).
  std::uint64_t next_below(std::uint64_t n) {
    const std::uint64_t threshold = (0 - n) % n;
    for (;;) {
      const std::uint64_t r = next_u64();
      if (r >= threshold) return r % n;
    }
  }

  /// Rademacher sign.
  int next_sign() { return (next_u64() & 1ull) ? 1 : -1; }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }
  std::array<std::uint64_t, 4> state_{};
  bool have_cached_ = false;
  double cached_ = 0.0;
};

}  // namespace skfl

#endif  // SKFL_COMMON_HPP
