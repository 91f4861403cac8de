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

// Static batch grids.
//
// The minimax grid follows u_1 = a, u_m = a * sqrt(u_{m-1}) and the geometric
// grid u'_1 = b, u'_m = b * u'_{m-1}, with a = T^{1/(2 - 2^{1-M})} and
// b = T^{1/M} chosen so that u_M = u'_M = T exactly. Both recursions then have
// closed forms
//
//   t_j  = floor(T^{(2 - 2^{1-j}) / (2 - 2^{1-M})}),
//   t'_j = floor(T^{j / M}),
//
// and the arithmetic grid is t_j = floor(j T / M). Every constructor then
// raises endpoints below K up to K (the first batch must visit every arm) and
// merges duplicate endpoints, so the effective number of batches may shrink.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "batched_bandit/core.hpp"

namespace batched {

namespace detail {

// floor(x), snapping first to a nearby integer so that values like
// 10^3 evaluated as 999.99999999999989 are not rounded down.
inline std::size_t snapped_floor(double x) {
  const double nearest = std::round(x);
  if (std::abs(x - nearest) <= 1e-9 * std::max(1.0, std::abs(x))) return static_cast<std::size_t>(nearest);
  return static_cast<std::size_t>(std::floor(x));
}

inline void check_grid_arguments(std::size_t T, std::size_t M, std::size_t K) {
  if (T == 0) throw InfeasibleGridError("horizon T must be positive");
  if (M == 0) throw InfeasibleGridError("number of batches M must be positive");
  if (M > T) {
    throw InfeasibleGridError("M = " + std::to_string(M) + " exceeds T = " + std::to_string(T));
  }
  if (K == 0) throw InfeasibleGridError("number of arms K must be positive");
  if (T < K) {
    throw InfeasibleGridError("T = " + std::to_string(T) + " is smaller than K = " +
                              std::to_string(K) + "; the first batch cannot visit every arm");
  }
}

// Forces t_M = T, raises every endpoint to at least K and merges duplicates.
inline Grid finish_grid(std::vector<std::size_t> raw, std::size_t T, std::size_t K,
                        GridFamily family, std::size_t requested) {
  raw.back() = T;
  Grid grid;
  grid.family = family;
  grid.requested_batches = requested;
  grid.times.reserve(raw.size());
  for (std::size_t t : raw) {
    t = std::clamp(t, K, T);
    if (!grid.times.empty() && t <= grid.times.back()) continue;
    grid.times.push_back(t);
  }
  if (grid.times.empty() || grid.times.back() != T) {
    throw InfeasibleGridError("could not build a valid grid for T = " + std::to_string(T));
  }
  return grid;
}

}  // namespace detail

/// The constant a = T^{1/(2 - 2^{1-M})} of the minimax grid.
inline double minimax_grid_scale(std::size_t T, std::size_t M) {
  const double exponent = 1.0 / (2.0 - std::ldexp(1.0, 1 - static_cast<int>(M)));
  return std::pow(static_cast<double>(T), exponent);
}

/// The constant b = T^{1/M} of the geometric grid.
inline double geometric_grid_scale(std::size_t T, std::size_t M) {
  return std::pow(static_cast<double>(T), 1.0 / static_cast<double>(M));
}

inline Grid make_minimax_grid(std::size_t T, std::size_t M, std::size_t K) {
  detail::check_grid_arguments(T, M, K);
  const double denom = 2.0 - std::ldexp(1.0, 1 - static_cast<int>(M));
  std::vector<std::size_t> raw(M);
  for (std::size_t j = 1; j < M; ++j) {
    const double exponent = (2.0 - std::ldexp(1.0, 1 - static_cast<int>(j))) / denom;
    raw[j - 1] = detail::snapped_floor(std::pow(static_cast<double>(T), exponent));
  }
  return detail::finish_grid(std::move(raw), T, K, GridFamily::minimax, M);
}

inline Grid make_geometric_grid(std::size_t T, std::size_t M, std::size_t K) {
  detail::check_grid_arguments(T, M, K);
  std::vector<std::size_t> raw(M);
  for (std::size_t j = 1; j < M; ++j) {
    const double exponent = static_cast<double>(j) / static_cast<double>(M);
    raw[j - 1] = detail::snapped_floor(std::pow(static_cast<double>(T), exponent));
  }
  return detail::finish_grid(std::move(raw), T, K, GridFamily::geometric, M);
}

inline Grid make_arithmetic_grid(std::size_t T, std::size_t M, std::size_t K) {
  detail::check_grid_arguments(T, M, K);
  std::vector<std::size_t> raw(M);
  for (std::size_t j = 1; j <= M; ++j) raw[j - 1] = j * T / M;
  return detail::finish_grid(std::move(raw), T, K, GridFamily::arithmetic, M);
}

/// The fully adaptive grid {1, 2, ..., T}. Exempt from the t_1 >= K rule.
inline Grid make_online_grid(std::size_t T) {
  if (T == 0) throw InfeasibleGridError("horizon T must be positive");
  Grid grid;
  grid.family = GridFamily::online;
  grid.requested_batches = T;
  grid.times.resize(T);
  for (std::size_t t = 0; t < T; ++t) grid.times[t] = t + 1;
  return grid;
}

inline Grid make_grid(GridFamily family, std::size_t T, std::size_t M, std::size_t K) {
  switch (family) {
    case GridFamily::minimax: return make_minimax_grid(T, M, K);
    case GridFamily::geometric: return make_geometric_grid(T, M, K);
    case GridFamily::arithmetic: return make_arithmetic_grid(T, M, K);
    case GridFamily::online: return make_online_grid(T);
    case GridFamily::explicit_times: break;
  }
  throw ConfigError("explicit grids must be supplied as endpoint lists");
}

inline Grid validate_grid(const std::vector<std::size_t>& times, std::size_t T, std::size_t K) {
  if (times.empty()) throw InvalidGridError("grid has no endpoints", 0);
  if (times.front() < K) {
    throw InvalidGridError("first endpoint " + std::to_string(times.front()) +
                               " is smaller than K = " + std::to_string(K),
                           0);
  }
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (times[i] <= times[i - 1]) {
      throw InvalidGridError("endpoints must be strictly increasing", i);
    }
  }
  if (times.back() != T) {
    throw InvalidGridError("last endpoint " + std::to_string(times.back()) +
                               " differs from T = " + std::to_string(T),
                           times.size() - 1);
  }
  Grid grid;
  grid.times = times;
  grid.family = GridFamily::explicit_times;
  grid.requested_batches = times.size();
  return grid;
}

/// Checks the growth conditions the regret analysis relies on:
/// minimax t_j <= a sqrt(t_{j-1}) + a and t_j <= 2 a sqrt(t_{j-1});
/// geometric t_j / t_{j-1} <= 2 b. Returns a description of the first
/// violation, or nothing. Other families always pass.
inline std::optional<std::string> grid_growth_violation(const Grid& grid) {
  const auto& t = grid.times;
  const std::size_t T = grid.horizon();
  const std::size_t M = grid.requested_batches;
  if (grid.family == GridFamily::minimax) {
    const double a = minimax_grid_scale(T, M);
    for (std::size_t j = 1; j < t.size(); ++j) {
      const double root = std::sqrt(static_cast<double>(t[j - 1]));
      const double tj = static_cast<double>(t[j]);
      if (tj > a * root + a + 1e-9 * tj || tj > 2.0 * a * root + 1e-9 * tj) {
        return "minimax endpoint " + std::to_string(j + 1) + " = " + std::to_string(t[j]) +
               " grows faster than 2a*sqrt(t_prev)";
      }
    }
  } else if (grid.family == GridFamily::geometric) {
    const double b = geometric_grid_scale(T, M);
    for (std::size_t j = 1; j < t.size(); ++j) {
      if (static_cast<double>(t[j]) > 2.0 * b * static_cast<double>(t[j - 1])) {
        return "geometric endpoint " + std::to_string(j + 1) + " = " + std::to_string(t[j]) +
               " exceeds 2b times its predecessor";
      }
    }
  }
  return std::nullopt;
}

}  // namespace batched
