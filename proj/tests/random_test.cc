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

#include "batched_bandit/random.hpp"

#include <cmath>
#include <set>

#include <gtest/gtest.h>

namespace batched {
namespace {

// Known-answer vectors, cross-checked against numpy's Philox bit generator.
TEST(PhiloxTest, KnownAnswers) {
  EXPECT_EQ(Philox4x64::apply({0, 0, 0, 0}, {0, 0}),
            (Philox4x64::Counter{0x16554d9eca36314cULL, 0xdb20fe9d672d0fdcULL,
                                 0xd7e772cee186176bULL, 0x7e68b68aec7ba23bULL}));
  EXPECT_EQ(Philox4x64::apply({7, 3, 0, 0}, {0x0123456789abcdefULL, 0x9e3779b97f4a7c15ULL}),
            (Philox4x64::Counter{0x9a1705264285eb18ULL, 0x65806338ac3b8f26ULL,
                                 0x3794124d6ab5cd1eULL, 0x1c28dc43bb4c89a0ULL}));
  EXPECT_EQ(Philox4x64::apply({12345, 2, 99, 1}, {0xdeadbeefcafef00dULL, 0}),
            (Philox4x64::Counter{0xa9c7eff1a4b94ec5ULL, 0xc2d83b163bfcfb70ULL,
                                 0x35bfdf8dc3e5010eULL, 0x628c5a53c4b4549cULL}));
}

TEST(OpenUnitTest, NeverHitsEndpoints) {
  EXPECT_GT(bits_to_open_unit(0), 0.0);
  EXPECT_LT(bits_to_open_unit(~0ULL), 1.0);
  EXPECT_EQ(bits_to_open_unit(1ULL << 63), 0.5 + 0x1.0p-53);
}

TEST(NormalQuantileTest, MatchesHighPrecisionValues) {
  struct Case {
    double p, x;
  };
  // Reference values from 50-digit arithmetic at the exact double p.
  const Case cases[] = {{1e-12, -7.0344838253011319326},  {0.001, -3.0902323061678135354},
                        {0.025, -1.9599639845400542118},  {0.3, -0.52440051270804081597},
                        {0.5, 0.0},                       {0.75, 0.6744897501960817432},
                        {0.975, 1.9599639845400538556},   {0.999999, 4.7534243088170877657}};
  for (const auto& c : cases) {
    EXPECT_NEAR(normal_quantile(c.p), c.x, 1e-14 * std::max(1.0, std::abs(c.x))) << "p=" << c.p;
  }
}

TEST(NormalQuantileTest, EdgesAndSymmetry) {
  EXPECT_EQ(normal_quantile(0.0), -INFINITY);
  EXPECT_EQ(normal_quantile(1.0), INFINITY);
  EXPECT_TRUE(std::isnan(normal_quantile(-0.1)));
  EXPECT_TRUE(std::isnan(normal_quantile(1.5)));
  EXPECT_TRUE(std::isnan(normal_quantile(NAN)));
  for (double p = 0.001; p < 0.5; p += 0.0137) {
    EXPECT_NEAR(normal_quantile(p), -normal_quantile(1.0 - p), 1e-12);
  }
}

TEST(NormalQuantileTest, Monotone) {
  double prev = -INFINITY;
  for (int i = 1; i < 100000; ++i) {
    const double x = normal_quantile(i / 100000.0);
    ASSERT_GT(x, prev);
    prev = x;
  }
}

TEST(SeedTest, DerivationIsStableAndSpreads) {
  static_assert(derive_seed(1, 2) == hash_combine(1, 2));
  EXPECT_EQ(hash_string(""), 0xCBF29CE484222325ULL);
  EXPECT_EQ(hash_string("a"), 0xAF63DC4C8601EC8CULL);  // FNV-1a test vector
  std::set<std::uint64_t> seen;
  for (std::uint64_t base = 0; base < 50; ++base) {
    for (std::uint64_t rep = 0; rep < 200; ++rep) seen.insert(derive_seed(base, rep));
  }
  EXPECT_EQ(seen.size(), 50u * 200u);
}

}  // namespace
}  // namespace batched
