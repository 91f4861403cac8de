// Copyright 2026 The batched-bandit Authors.
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

// Counter-based randomness: Philox4x64-10 keyed by a seed, a double-precision
// normal quantile (Wichura's AS241) for Gaussian draws, and stable 64-bit
// hashing for seed derivation.

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string_view>

namespace batched {

/// Philox4x64 with 10 rounds (Salmon et al., "Parallel random numbers: as
/// easy as 1, 2, 3"). Stateless: the output is a pure function of
/// (counter, key).
class Philox4x64 {
 public:
  using Counter = std::array<std::uint64_t, 4>;
  using Key = std::array<std::uint64_t, 2>;

  static constexpr int kRounds = 10;

  static Counter apply(Counter ctr, Key key) noexcept {
    for (int round = 0; round < kRounds; ++round) {
      if (round > 0) {
        key[0] += kWeyl0;
        key[1] += kWeyl1;
      }
      ctr = single_round(ctr, key);
    }
    return ctr;
  }

 private:
  static constexpr std::uint64_t kMul0 = 0xD2E7470EE14C6C93ULL;
  static constexpr std::uint64_t kMul1 = 0xCA5A826395121157ULL;
  static constexpr std::uint64_t kWeyl0 = 0x9E3779B97F4A7C15ULL;
  static constexpr std::uint64_t kWeyl1 = 0xBB67AE8584CAA73BULL;

  static Counter single_round(const Counter& ctr, const Key& key) noexcept {
    const unsigned __int128 p0 = static_cast<unsigned __int128>(kMul0) * ctr[0];
    const unsigned __int128 p1 = static_cast<unsigned __int128>(kMul1) * ctr[2];
    const auto hi0 = static_cast<std::uint64_t>(p0 >> 64);
    const auto lo0 = static_cast<std::uint64_t>(p0);
    const auto hi1 = static_cast<std::uint64_t>(p1 >> 64);
    const auto lo1 = static_cast<std::uint64_t>(p1);
    return {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
  }
};

/// Maps 64 random bits to the open interval (0, 1) using the top 53 bits.
inline double bits_to_open_unit(std::uint64_t bits) noexcept {
  return (static_cast<double>(bits >> 12) + 0.5) * 0x1.0p-52;
}

/// Standard normal quantile, AS241 (PPND16), accurate to about 1e-16.
inline double normal_quantile(double p) noexcept {
  if (!(p > 0.0)) return p == 0.0 ? -std::numeric_limits<double>::infinity()
                                  : std::numeric_limits<double>::quiet_NaN();
  if (!(p < 1.0)) return p == 1.0 ? std::numeric_limits<double>::infinity()
                                  : std::numeric_limits<double>::quiet_NaN();
  const double q = p - 0.5;
  if (std::abs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    const double num =
        (((((((2.5090809287301226727e+3 * r + 3.3430575583588128105e+4) * r +
              6.7265770927008700853e+4) * r + 4.5921953931549871457e+4) * r +
            1.3731693765509461125e+4) * r + 1.9715909503065514427e+3) * r +
          1.3314166789178437745e+2) * r + 3.3871328727963666080e+0) * q;
    const double den =
        ((((((5.2264952788528545610e+3 * r + 2.8729085735721942674e+4) * r +
              3.9307895800092710610e+4) * r + 2.1213794301586595867e+4) * r +
            5.3941960214247511077e+3) * r + 6.8718700749205790830e+2) * r +
          4.2313330701600911252e+1) * r + 1.0;
    return num / den;
  }
  double r = q < 0.0 ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double num;
  double den;
  if (r <= 5.0) {
    r -= 1.6;
    num = (((((((7.7454501427834140764e-4 * r + 2.2723844989269184583e-2) * r +
                2.4178072517745061177e-1) * r + 1.2704582524523683826e+0) * r +
              3.6478483247632045605e+0) * r + 5.7694972214606914055e+0) * r +
            4.6303378461565452959e+0) * r + 1.4234371107496835774e+0);
    den = (((((((1.0507500716444168432e-9 * r + 5.4759380849953449460e-4) * r +
                1.5198666563616457197e-2) * r + 1.4810397642748007459e-1) * r +
              6.8976733498510000455e-1) * r + 1.6763848301838038494e+0) * r +
            2.0531916266377588219e+0) * r + 1.0);
  } else {
    r -= 5.0;
    num = (((((((2.0103343992922881327e-7 * r + 2.7115555687434875782e-5) * r +
                1.2426609473880784386e-3) * r + 2.6532189526576123093e-2) * r +
              2.9656057182850489123e-1) * r + 1.7848265399172913358e+0) * r +
            5.4637849111641143699e+0) * r + 6.6579046435011037772e+0);
    den = (((((((2.0442631033899397856e-15 * r + 1.4215117583164458887e-7) * r +
                1.8463183175100546818e-5) * r + 7.8686913114561325910e-4) * r +
              1.4875361290850614853e-2) * r + 1.3692988092273580531e-1) * r +
            5.9983220655588793769e-1) * r + 1.0);
  }
  const double x = num / den;
  return q < 0.0 ? -x : x;
}

// ---------------------------------------------------------------------------
// Seed derivation
// ---------------------------------------------------------------------------

/// SplitMix64 finalizer; a bijective 64-bit mixer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t hash_combine(std::uint64_t seed, std::uint64_t value) noexcept {
  return mix64(seed ^ mix64(value));
}

/// FNV-1a over the bytes of `text`.
constexpr std::uint64_t hash_string(std::string_view text) noexcept {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (char c : text) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001B3ULL;
  }
  return h;
}

/// Seed of replication `rep` under `base_seed`.
constexpr std::uint64_t derive_seed(std::uint64_t base_seed, std::uint64_t rep) noexcept {
  return hash_combine(base_seed, rep);
}

}  // namespace batched
