/*
   Copyright 2026 The ilattice Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

#include <cstdint>
#include <initializer_list>
#include <limits>
#include <random>

namespace ilat {

/// SplitMix64 finalizer. Used to derive stream keys, never as a generator
/// on its own.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Random stream whose state is a pure function of (seed, keys...).
///
/// Every consumer that needs worker-count independent output derives its
/// stream from the logical coordinates of the work item (path index, slice,
/// grid point) rather than from a shared generator. Internally this is
/// xoshiro256** seeded by hashing the key tuple.
class Stream {
 public:
  using result_type = std::uint64_t;

  Stream(std::uint64_t seed, std::initializer_list<std::uint64_t> keys) {
    std::uint64_t h = mix64(seed ^ 0x6a09e667f3bcc909ULL);
    std::uint64_t salt = 1;
    for (auto k : keys) {
      h = mix64(h ^ mix64(k + 0x9e3779b97f4a7c15ULL * salt));
      ++salt;
    }
    for (auto& w : s_) {
      h = mix64(h);
      w = h;
    }
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  /// Standard normal draw.
  double normal() { return normal_(*this); }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t s_[4]{};
  std::normal_distribution<double> normal_{0.0, 1.0};
};

// Stream tags keep unrelated consumers of the same seed apart.
namespace stream_tag {
inline constexpr std::uint64_t paths = 1;
inline constexpr std::uint64_t descendants = 2;
inline constexpr std::uint64_t fit = 3;
inline constexpr std::uint64_t split = 4;
inline constexpr std::uint64_t lower_bound = 5;
inline constexpr std::uint64_t upper_outer = 6;
inline constexpr std::uint64_t upper_inner = 7;
inline constexpr std::uint64_t european_mc = 8;
inline constexpr std::uint64_t lsmc = 9;
inline constexpr std::uint64_t scramble = 10;
inline constexpr std::uint64_t rate_check = 11;
}  // namespace stream_tag

}  // namespace ilat
