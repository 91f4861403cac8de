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

#include "batched_bandit/grids.hpp"

#include <cstddef>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>
#include <gtest/gtest.h>

namespace batched {
namespace {

using Times = std::vector<std::size_t>;
using boost::multiprecision::cpp_int;

// Exact oracle: the largest integer t with t^den <= T^num, i.e.
// floor(T^{num/den}), by binary search on arbitrary-precision integers.
std::size_t ExactFloorPow(std::size_t T, unsigned num, unsigned den) {
  const cpp_int target = boost::multiprecision::pow(cpp_int(T), num);
  std::size_t lo = 0, hi = T;
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo + 1) / 2;
    if (boost::multiprecision::pow(cpp_int(mid), den) <= target) {
      lo = mid;
    } else {
      hi = mid - 1;
    }
  }
  return lo;
}

// Raw minimax endpoint j (1-based) for M batches: exponent
// (2 - 2^{1-j}) / (2 - 2^{1-M}) = (2^M - 2^{M-j}) / (2^M - 1).
std::size_t OracleMinimax(std::size_t T, unsigned j, unsigned M) {
  return ExactFloorPow(T, (1u << M) - (1u << (M - j)), (1u << M) - 1);
}

Times OracleGrid(GridFamily family, std::size_t T, unsigned M, std::size_t K) {
  Times raw;
  for (unsigned j = 1; j < M; ++j) {
    raw.push_back(family == GridFamily::minimax ? OracleMinimax(T, j, M) : ExactFloorPow(T, j, M));
  }
  raw.push_back(T);
  Times out;
  for (std::size_t t : raw) {
    t = std::max(t, K);
    if (out.empty() || t > out.back()) out.push_back(t);
  }
  return out;
}

TEST(MinimaxGridTest, Examples) {
  EXPECT_EQ(make_minimax_grid(100, 1, 2).times, Times({100}));
  EXPECT_EQ(make_minimax_grid(100, 2, 2).times, Times({21, 100}));
  // floor(50000^{6/7}) is 10658 (10658^7 <= 50000^6 < 10659^7).
  EXPECT_EQ(make_minimax_grid(50000, 3, 3).times, Times({484, 10658, 50000}));
  EXPECT_EQ(OracleMinimax(50000, 2, 3), 10658u);
  EXPECT_EQ(make_minimax_grid(50000, 4, 3).times, Times({320, 5743, 24305, 50000}));
}

TEST(MinimaxGridTest, RecordsFamilyAndRequestedBatches) {
  const Grid g = make_minimax_grid(50000, 3, 3);
  EXPECT_EQ(g.family, GridFamily::minimax);
  EXPECT_EQ(g.requested_batches, 3u);
  EXPECT_EQ(g.num_batches(), 3u);
}

TEST(GeometricGridTest, Examples) {
  EXPECT_EQ(make_geometric_grid(100, 2, 2).times, Times({10, 100}));
  EXPECT_EQ(make_geometric_grid(1000, 3, 2).times, Times({10, 100, 1000}));
  EXPECT_EQ(make_geometric_grid(100, 1, 2).times, Times({100}));
  EXPECT_EQ(make_geometric_grid(50000, 4, 3).times, Times({14, 223, 3343, 50000}));
}

TEST(ArithmeticGridTest, Examples) {
  EXPECT_EQ(make_arithmetic_grid(100, 4, 2).times, Times({25, 50, 75, 100}));
  EXPECT_EQ(make_arithmetic_grid(10, 3, 2).times, Times({3, 6, 10}));
  EXPECT_EQ(make_arithmetic_grid(100, 1, 2).times, Times({100}));
}

TEST(GridConstructionTest, InfeasibleArguments) {
  EXPECT_THROW(make_minimax_grid(10, 11, 2), InfeasibleGridError);
  EXPECT_THROW(make_geometric_grid(2, 1, 3), InfeasibleGridError);
  EXPECT_THROW(make_arithmetic_grid(0, 1, 2), InfeasibleGridError);
  EXPECT_THROW(make_minimax_grid(10, 0, 2), InfeasibleGridError);
}

TEST(GridConstructionTest, FirstEndpointRaisedToKAndDuplicatesMerged) {
  // Raw geometric endpoints for T = 100, M = 4: 3, 10, 31, 100.
  const Grid g = make_geometric_grid(100, 4, 12);
  EXPECT_EQ(g.times, Times({12, 31, 100}));
  EXPECT_EQ(g.requested_batches, 4u);
  EXPECT_EQ(g.num_batches(), 3u);
}

TEST(GridConstructionTest, MEqualsTCollapsesToValidGrid) {
  for (std::size_t T : {5u, 17u, 64u}) {
    for (std::size_t K : {2u, 3u}) {
      for (auto f : {GridFamily::minimax, GridFamily::geometric, GridFamily::arithmetic}) {
        const Grid g = make_grid(f, T, T, K);
        EXPECT_LE(g.num_batches(), T);
        EXPECT_NO_THROW(validate_grid(g.times, T, K));
      }
    }
  }
}

TEST(OnlineGridTest, IsEveryStep) {
  const Grid g = make_online_grid(4);
  EXPECT_EQ(g.times, Times({1, 2, 3, 4}));
  EXPECT_EQ(g.family, GridFamily::online);
}

TEST(ValidateGridTest, Examples) {
  EXPECT_NO_THROW(validate_grid({21, 100}, 100, 2));
  try {
    validate_grid({21, 21, 100}, 100, 2);
    FAIL() << "duplicate endpoint accepted";
  } catch (const InvalidGridError& e) {
    EXPECT_EQ(e.index(), 1u);
  }
  try {
    validate_grid({1, 100}, 100, 3);
    FAIL() << "t_1 < K accepted";
  } catch (const InvalidGridError& e) {
    EXPECT_EQ(e.index(), 0u);
  }
  try {
    validate_grid({10, 90}, 100, 2);
    FAIL() << "wrong terminal accepted";
  } catch (const InvalidGridError& e) {
    EXPECT_EQ(e.index(), 1u);
  }
  EXPECT_THROW(validate_grid({}, 100, 2), InvalidGridError);
  EXPECT_EQ(validate_grid({21, 100}, 100, 2).family, GridFamily::explicit_times);
}

// Every (T, M, K) of a sweep against the exact integer oracle.
TEST(GridOracleTest, ClosedFormsMatchExactFloors) {
  for (std::size_t T : {10u, 100u, 999u, 1000u, 3000u, 4096u, 10000u, 30000u, 50000u, 100000u}) {
    for (unsigned M = 1; M <= 6; ++M) {
      for (std::size_t K : {2u, 3u, 10u}) {
        if (T < K) continue;
        EXPECT_EQ(make_minimax_grid(T, M, K).times, OracleGrid(GridFamily::minimax, T, M, K))
            << "minimax T=" << T << " M=" << M << " K=" << K;
        EXPECT_EQ(make_geometric_grid(T, M, K).times, OracleGrid(GridFamily::geometric, T, M, K))
            << "geometric T=" << T << " M=" << M << " K=" << K;
      }
    }
  }
}

TEST(GridPropertyTest, ConstructorsPassValidationAndGrowthChecks) {
  for (std::size_t T : {1000u, 3000u, 10000u, 30000u, 50000u, 100000u}) {
    for (std::size_t M = 1; M <= 6; ++M) {
      for (std::size_t K = 2; K <= 10; ++K) {
        for (auto f : {GridFamily::minimax, GridFamily::geometric, GridFamily::arithmetic}) {
          const Grid g = make_grid(f, T, M, K);
          EXPECT_NO_THROW(validate_grid(g.times, T, K));
          EXPECT_FALSE(grid_growth_violation(g).has_value())
              << to_string(f) << " T=" << T << " M=" << M << " K=" << K;
        }
      }
    }
  }
}

TEST(GridPropertyTest, GrowthCheckFlagsFastGrowth) {
  Grid g = make_minimax_grid(50000, 3, 3);
  g.times[1] = 40000;  // far beyond 2a sqrt(484)
  EXPECT_TRUE(grid_growth_violation(g).has_value());
  Grid h = make_geometric_grid(1000, 3, 2);
  h.times[1] = 500;  // ratio 50 > 2b = 20
  EXPECT_TRUE(grid_growth_violation(h).has_value());
}

}  // namespace
}  // namespace batched
