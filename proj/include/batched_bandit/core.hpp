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

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace batched {

inline constexpr std::string_view kVersion = "0.1.0";

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define BATCHED_DEFINE_ERROR(Name)      \
  class Name : public Error {           \
   public:                              \
    using Error::Error;                 \
  }

BATCHED_DEFINE_ERROR(InvalidTraceError);
BATCHED_DEFINE_ERROR(DegenerateInstanceError);
BATCHED_DEFINE_ERROR(ConstraintError);
BATCHED_DEFINE_ERROR(InfeasibleGridError);
BATCHED_DEFINE_ERROR(InternalInvariantError);
BATCHED_DEFINE_ERROR(UnsupportedConfigError);
BATCHED_DEFINE_ERROR(DomainError);
BATCHED_DEFINE_ERROR(PolicyContractError);
BATCHED_DEFINE_ERROR(ConfigError);
BATCHED_DEFINE_ERROR(IoError);

#undef BATCHED_DEFINE_ERROR

/// Raised by grid validation; `index` is the 0-based position of the first
/// offending endpoint.
class InvalidGridError : public Error {
 public:
  InvalidGridError(const std::string& what, std::size_t index)
      : Error(what + " (at index " + std::to_string(index) + ")"), index_(index) {}
  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

// ---------------------------------------------------------------------------
// BanditInstance
// ---------------------------------------------------------------------------

/// Arm means of a Gaussian bandit with unit variance. Arms are 0-based
/// internally; user-facing output labels them 1..K.
class BanditInstance {
 public:
  explicit BanditInstance(std::vector<double> means) : means_(std::move(means)) {
    if (means_.size() < 2) {
      throw DegenerateInstanceError("bandit instance needs at least 2 arms, got " +
                                    std::to_string(means_.size()));
    }
    for (double m : means_) {
      if (!std::isfinite(m)) throw DomainError("arm means must be finite");
    }
    // Lowest index wins ties for the optimal label.
    optimal_arm_ = static_cast<std::size_t>(
        std::max_element(means_.begin(), means_.end()) - means_.begin());
    optimal_mean_ = means_[optimal_arm_];
    gaps_.reserve(means_.size());
    for (double m : means_) gaps_.push_back(optimal_mean_ - m);
  }

  std::size_t num_arms() const noexcept { return means_.size(); }
  std::span<const double> means() const noexcept { return means_; }
  double mean(std::size_t arm) const { return means_.at(arm); }
  double optimal_mean() const noexcept { return optimal_mean_; }
  std::size_t optimal_arm() const noexcept { return optimal_arm_; }
  std::span<const double> gaps() const noexcept { return gaps_; }
  double gap(std::size_t arm) const { return gaps_.at(arm); }
  double max_gap() const { return *std::max_element(gaps_.begin(), gaps_.end()); }

  friend bool operator==(const BanditInstance& a, const BanditInstance& b) {
    return a.means_ == b.means_;
  }

 private:
  std::vector<double> means_;
  std::vector<double> gaps_;
  std::size_t optimal_arm_ = 0;
  double optimal_mean_ = 0.0;
};

/// Checks K >= 2 and, when `enforce_gap_cap` is set, max_i gap_i <= sqrt(K).
inline void validate_instance(std::span<const double> means, bool enforce_gap_cap) {
  if (means.size() < 2) {
    throw DegenerateInstanceError("bandit instance needs at least 2 arms, got " +
                                  std::to_string(means.size()));
  }
  if (!enforce_gap_cap) return;
  const double best = *std::max_element(means.begin(), means.end());
  const double cap = std::sqrt(static_cast<double>(means.size()));
  for (std::size_t i = 0; i < means.size(); ++i) {
    if (best - means[i] > cap) {
      throw ConstraintError("gap of arm " + std::to_string(i + 1) + " exceeds sqrt(K)");
    }
  }
}

inline void validate_instance(const BanditInstance& instance, bool enforce_gap_cap) {
  validate_instance(instance.means(), enforce_gap_cap);
}

// ---------------------------------------------------------------------------
// Grid
// ---------------------------------------------------------------------------

// `online` is the fully adaptive grid {1, ..., T} used by reference policies
// that see every reward before the next pull.
enum class GridFamily { minimax, geometric, arithmetic, explicit_times, online };

inline std::string_view to_string(GridFamily family) {
  switch (family) {
    case GridFamily::minimax: return "minimax";
    case GridFamily::geometric: return "geometric";
    case GridFamily::arithmetic: return "arithmetic";
    case GridFamily::explicit_times: return "explicit";
    case GridFamily::online: return "online";
  }
  return "unknown";
}

inline std::optional<GridFamily> parse_grid_family(std::string_view name) {
  for (auto f : {GridFamily::minimax, GridFamily::geometric, GridFamily::arithmetic,
                 GridFamily::explicit_times, GridFamily::online}) {
    if (to_string(f) == name) return f;
  }
  return std::nullopt;
}

/// Batch endpoints t_1 < ... < t_M = T. Batch m (0-based) covers the time
/// steps (t_{m-1}, t_m] with t_{-1} = 0.
struct Grid {
  std::vector<std::size_t> times;
  GridFamily family = GridFamily::explicit_times;
  // Number of batches asked for before duplicate endpoints were merged.
  std::size_t requested_batches = 0;

  std::size_t horizon() const { return times.empty() ? 0 : times.back(); }
  std::size_t num_batches() const noexcept { return times.size(); }
  std::size_t batch_start(std::size_t m) const { return m == 0 ? 0 : times.at(m - 1); }
  std::size_t batch_end(std::size_t m) const { return times.at(m); }
  std::size_t batch_length(std::size_t m) const { return batch_end(m) - batch_start(m); }

  friend bool operator==(const Grid&, const Grid&) = default;
};

// ---------------------------------------------------------------------------
// PolicyState
// ---------------------------------------------------------------------------

struct PolicyState {
  std::vector<std::size_t> active;          // sorted, never empty
  std::vector<std::size_t> counted_pulls;   // pulls entering the averages
  std::vector<double> reward_sums;          // sums of counted rewards
  std::vector<std::size_t> total_pulls;     // every pull, counted or not
  std::optional<std::size_t> committed_arm;

  PolicyState() = default;
  explicit PolicyState(std::size_t num_arms)
      : counted_pulls(num_arms, 0), reward_sums(num_arms, 0.0), total_pulls(num_arms, 0) {
    active.reserve(num_arms);
    for (std::size_t i = 0; i < num_arms; ++i) active.push_back(i);
  }

  std::size_t num_arms() const noexcept { return counted_pulls.size(); }

  bool is_active(std::size_t arm) const {
    return std::binary_search(active.begin(), active.end(), arm);
  }

  /// Empirical mean of the counted rewards; undefined without counted pulls.
  double average(std::size_t arm) const {
    if (counted_pulls.at(arm) == 0) {
      throw InternalInvariantError("average requested for arm " + std::to_string(arm + 1) +
                                   " with no counted pulls");
    }
    return reward_sums[arm] / static_cast<double>(counted_pulls[arm]);
  }
};

// ---------------------------------------------------------------------------
// RunTrace and regret
// ---------------------------------------------------------------------------

struct Elimination {
  std::size_t arm;    // 0-based
  std::size_t batch;  // 0-based batch at whose end the arm was removed
  friend bool operator==(const Elimination&, const Elimination&) = default;
};

struct RunTrace {
  std::vector<std::uint32_t> arm_pulled;  // pi_1..pi_T, 0-based arms
  std::vector<std::size_t> batch_ends;    // grid endpoints the run used
  std::vector<Elimination> eliminations;
  std::optional<std::size_t> committed_arm;
  double realized_regret = 0.0;
  std::string instance_id;
  std::uint64_t seed = 0;

  std::size_t horizon() const noexcept { return arm_pulled.size(); }

  /// 0-based batch containing the 1-based time step t.
  std::size_t batch_of(std::size_t t) const {
    if (t == 0 || batch_ends.empty() || t > batch_ends.back()) {
      throw InvalidTraceError("time step " + std::to_string(t) + " outside the trace");
    }
    return static_cast<std::size_t>(
        std::lower_bound(batch_ends.begin(), batch_ends.end(), t) - batch_ends.begin());
  }

  friend bool operator==(const RunTrace&, const RunTrace&) = default;
};

/// Pseudo-regret sum_t (mu* - mu^{(pi_t)}) accumulated as sum_i n_i * gap_i.
inline double regret_from_counts(std::span<const std::size_t> pulls_per_arm,
                                 const BanditInstance& instance) {
  double total = 0.0;
  for (std::size_t i = 0; i < pulls_per_arm.size(); ++i) {
    total += static_cast<double>(pulls_per_arm[i]) * instance.gap(i);
  }
  return total;
}

inline double compute_regret(std::span<const std::uint32_t> arm_pulled,
                             const BanditInstance& instance) {
  std::vector<std::size_t> counts(instance.num_arms(), 0);
  for (std::size_t t = 0; t < arm_pulled.size(); ++t) {
    const auto arm = arm_pulled[t];
    if (arm >= instance.num_arms()) {
      throw InvalidTraceError("arm index " + std::to_string(arm + 1) + " at t=" +
                              std::to_string(t + 1) + " is outside [K]");
    }
    ++counts[arm];
  }
  return regret_from_counts(counts, instance);
}

inline double compute_regret(const RunTrace& trace, const BanditInstance& instance) {
  if (!trace.batch_ends.empty() && trace.batch_ends.back() != trace.arm_pulled.size()) {
    throw InvalidTraceError("trace has " + std::to_string(trace.arm_pulled.size()) +
                            " pulls but horizon " + std::to_string(trace.batch_ends.back()));
  }
  return compute_regret(trace.arm_pulled, instance);
}

}  // namespace batched
