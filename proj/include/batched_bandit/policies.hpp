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

// Batch-constrained sampling policies.
//
// A policy sees the world one batch at a time: `plan_batch` fills the whole
// batch before any of its rewards exist, and `observe_batch` receives them
// afterwards. Pulls are planned as blocks (arm, counted, uncounted); uncounted
// pulls are the rounding leftovers of an uneven split and never enter the
// empirical means, which keeps every active arm on the same counted total.

#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "batched_bandit/core.hpp"

namespace batched {

struct PullBlock {
  std::size_t arm = 0;
  std::size_t counted = 0;
  std::size_t uncounted = 0;

  std::size_t size() const noexcept { return counted + uncounted; }
  friend bool operator==(const PullBlock&, const PullBlock&) = default;
};

using BatchPlan = std::vector<PullBlock>;

/// Rewards of one block, counted pulls first.
struct BlockObservation {
  std::size_t arm = 0;
  std::span<const double> counted;
  std::span<const double> uncounted;
};

/// Position of a batch inside the grid. `start` is t_{m-1}, the number of
/// pulls made before the batch.
struct BatchContext {
  std::size_t batch = 0;
  std::size_t num_batches = 1;
  std::size_t start = 0;
  std::size_t length = 0;

  bool is_last() const noexcept { return batch + 1 == num_batches; }
};

template <class P>
concept BatchPolicy = std::copy_constructible<P> &&
    requires(P& policy, const P& cpolicy, const BatchContext& ctx, BatchPlan& plan,
             std::span<const BlockObservation> observations) {
  policy.plan_batch(ctx, plan);
  policy.observe_batch(ctx, observations);
  { cpolicy.state() } -> std::same_as<const PolicyState&>;
  { cpolicy.needs_feedback(ctx) } -> std::convertible_to<bool>;
  { P::kName } -> std::convertible_to<std::string_view>;
};

/// Maps tau (per-arm counted pulls) to an elimination or commitment threshold.
using ThresholdFn = std::function<double(std::size_t)>;

namespace detail {

inline std::size_t plan_size(const BatchPlan& plan) {
  std::size_t n = 0;
  for (const auto& block : plan) n += block.size();
  return n;
}

// q = floor(L / |arms|) counted pulls each; the L mod |arms| lowest-indexed
// arms get one extra pull, counted or not as requested.
inline void split_evenly(std::span<const std::size_t> arms, std::size_t length,
                         bool count_remainder, BatchPlan& plan) {
  const std::size_t q = length / arms.size();
  const std::size_t r = length % arms.size();
  for (std::size_t i = 0; i < arms.size(); ++i) {
    PullBlock block{arms[i], q, 0};
    if (i < r) (count_remainder ? block.counted : block.uncounted) += 1;
    if (block.size() > 0) plan.push_back(block);
  }
}

inline void record_plan(const BatchPlan& plan, PolicyState& state) {
  for (const auto& block : plan) state.total_pulls[block.arm] += block.size();
}

inline void accumulate(std::span<const BlockObservation> observations, PolicyState& state) {
  for (const auto& obs : observations) {
    double sum = 0.0;
    for (double y : obs.counted) sum += y;
    state.reward_sums[obs.arm] += sum;
    state.counted_pulls[obs.arm] += obs.counted.size();
  }
}

// Argmax of the empirical mean over `arms`, ties to the lowest index. Arms
// without counted pulls are skipped; with no data at all the lowest arm wins.
inline std::size_t empirical_argmax(const PolicyState& state, std::span<const std::size_t> arms) {
  std::optional<std::size_t> best;
  double best_mean = 0.0;
  for (std::size_t arm : arms) {
    if (state.counted_pulls[arm] == 0) continue;
    const double mean = state.average(arm);
    if (!best || mean > best_mean) {
      best = arm;
      best_mean = mean;
    }
  }
  return best.value_or(arms.front());
}

inline std::size_t common_counted_pulls(const PolicyState& state) {
  const std::size_t tau = state.counted_pulls[state.active.front()];
  for (std::size_t arm : state.active) {
    if (state.counted_pulls[arm] != tau) {
      throw InternalInvariantError("active arms have unequal counted pulls (arm " +
                                   std::to_string(arm + 1) + ": " +
                                   std::to_string(state.counted_pulls[arm]) + " vs " +
                                   std::to_string(tau) + ")");
    }
  }
  return tau;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// BaSE: batched successive elimination
// ---------------------------------------------------------------------------

struct BaseConfig {
  double gamma = 1.0;
  std::size_t num_arms = 2;
  std::size_t horizon = 1;
  // Replaces sqrt(gamma log(TK) / tau) when set.
  ThresholdFn threshold_override;

  void validate() const {
    if (!(gamma > 0.0) || !std::isfinite(gamma)) throw ConfigError("gamma must be positive");
    if (num_arms < 2) throw ConfigError("BaSE needs at least 2 arms");
    if (horizon == 0) throw ConfigError("horizon must be positive");
  }

  double threshold(std::size_t tau) const {
    if (threshold_override) return threshold_override(tau);
    const double tk = static_cast<double>(horizon) * static_cast<double>(num_arms);
    return std::sqrt(gamma * std::log(tk) / static_cast<double>(tau));
  }
};

/// Arm BaSE commits to in the final batch: the empirical argmax over the
/// active set, ties to the lowest index. Without data (M = 1) this is the
/// lowest active arm.
inline std::size_t base_commit_arm(const PolicyState& state) {
  return detail::empirical_argmax(state, state.active);
}

inline BatchPlan base_plan_batch(const BatchContext& ctx, const PolicyState& state) {
  if (state.active.empty()) throw InternalInvariantError("active set is empty");
  BatchPlan plan;
  if (ctx.is_last() || state.committed_arm) {
    const std::size_t arm = state.committed_arm.value_or(base_commit_arm(state));
    if (ctx.length > 0) plan.push_back({arm, ctx.length, 0});
    return plan;
  }
  detail::split_evenly(state.active, ctx.length, /*count_remainder=*/false, plan);
  return plan;
}

/// Removes every active arm whose empirical mean trails the best active mean
/// by at least the threshold. All removals are judged against the same
/// maximum. Returns the removed arms.
inline std::vector<std::size_t> base_eliminate(PolicyState& state, const BaseConfig& cfg) {
  if (state.active.empty()) throw InternalInvariantError("active set is empty");
  const std::size_t tau = detail::common_counted_pulls(state);
  if (tau == 0) throw InternalInvariantError("elimination needs at least one counted pull per arm");
  double best = -INFINITY;
  for (std::size_t arm : state.active) best = std::max(best, state.average(arm));
  const double threshold = cfg.threshold(tau);
  std::vector<std::size_t> removed;
  std::vector<std::size_t> kept;
  kept.reserve(state.active.size());
  for (std::size_t arm : state.active) {
    if (best - state.average(arm) >= threshold) {
      removed.push_back(arm);
    } else {
      kept.push_back(arm);
    }
  }
  if (kept.empty()) throw InternalInvariantError("elimination emptied the active set");
  state.active = std::move(kept);
  return removed;
}

class BasePolicy {
 public:
  static constexpr std::string_view kName = "base";

  explicit BasePolicy(BaseConfig cfg) : cfg_(std::move(cfg)), state_(cfg_.num_arms) {
    cfg_.validate();
  }

  void plan_batch(const BatchContext& ctx, BatchPlan& plan) {
    plan = base_plan_batch(ctx, state_);
    if (ctx.is_last() && !state_.committed_arm) state_.committed_arm = base_commit_arm(state_);
    detail::record_plan(plan, state_);
  }

  void observe_batch(const BatchContext& ctx, std::span<const BlockObservation> observations) {
    detail::accumulate(observations, state_);
    if (!ctx.is_last() && !state_.committed_arm) base_eliminate(state_, cfg_);
  }

  // Rewards after commitment are never looked at.
  bool needs_feedback(const BatchContext&) const { return !state_.committed_arm; }

  const PolicyState& state() const { return state_; }
  const BaseConfig& config() const { return cfg_; }

 private:
  BaseConfig cfg_;
  PolicyState state_;
};

// ---------------------------------------------------------------------------
// UCB1
// ---------------------------------------------------------------------------

namespace detail {

inline std::size_t ucb1_argmax(std::size_t t, std::span<const double> means,
                               std::span<const std::size_t> counts) {
  const double log_t = std::log(static_cast<double>(t));
  std::size_t best = 0;
  double best_index = -INFINITY;
  for (std::size_t i = 0; i < means.size(); ++i) {
    const double index = means[i] + std::sqrt(2.0 * log_t / static_cast<double>(counts[i]));
    if (index > best_index) {
      best = i;
      best_index = index;
    }
  }
  return best;
}

}  // namespace detail

/// UCB1 arm choice at 1-based time t: arm t for t <= K, otherwise
/// argmax_i mean_i + sqrt(2 ln t / n_i) with ties to the lowest index.
inline std::size_t ucb1_step(std::size_t t, std::span<const std::size_t> counts,
                             std::span<const double> sums) {
  const std::size_t K = counts.size();
  if (t == 0) throw DomainError("ucb1_step expects t >= 1");
  if (t <= K) return t - 1;
  for (std::size_t i = 0; i < K; ++i) {
    if (counts[i] == 0) return i;
  }
  std::vector<double> means(K);
  for (std::size_t i = 0; i < K; ++i) means[i] = sums[i] / static_cast<double>(counts[i]);
  return detail::ucb1_argmax(t, means, counts);
}

// On the online grid every batch is a single step and this is plain UCB1.
// Inside a longer batch the means stay frozen at their batch-start values
// while the exploration bonus uses the pulls already planned in the batch,
// so the batch is spread instead of piled onto a single arm.
class Ucb1Policy {
 public:
  static constexpr std::string_view kName = "ucb1";

  explicit Ucb1Policy(std::size_t num_arms) : state_(num_arms), means_(num_arms), planned_(num_arms) {
    if (num_arms < 2) throw ConfigError("UCB1 needs at least 2 arms");
  }

  void plan_batch(const BatchContext& ctx, BatchPlan& plan) {
    const std::size_t K = state_.num_arms();
    plan.clear();
    const bool every_arm_seen = std::none_of(state_.counted_pulls.begin(), state_.counted_pulls.end(),
                                             [](std::size_t n) { return n == 0; });
    if (ctx.length == 1 && every_arm_seen) {
      // Fast path for the online grid.
      for (std::size_t i = 0; i < K; ++i) means_[i] = state_.average(i);
      const std::size_t arm = detail::ucb1_argmax(ctx.start + 1, means_, state_.counted_pulls);
      plan.push_back({arm, 1, 0});
      detail::record_plan(plan, state_);
      return;
    }
    bool all_observed = true;
    for (std::size_t i = 0; i < K; ++i) {
      planned_[i] = state_.counted_pulls[i];
      if (state_.counted_pulls[i] == 0) {
        all_observed = false;
      } else {
        means_[i] = state_.average(i);
      }
    }
    std::vector<std::size_t> per_arm(K, 0);
    for (std::size_t s = 0; s < ctx.length; ++s) {
      std::size_t arm;
      if (!all_observed) {
        // Initial round-robin: least-visited arm first.
        arm = static_cast<std::size_t>(std::min_element(planned_.begin(), planned_.end()) -
                                       planned_.begin());
      } else {
        arm = detail::ucb1_argmax(ctx.start + s + 1, means_, planned_);
      }
      ++planned_[arm];
      ++per_arm[arm];
    }
    for (std::size_t i = 0; i < K; ++i) {
      if (per_arm[i] > 0) plan.push_back({i, per_arm[i], 0});
    }
    detail::record_plan(plan, state_);
  }

  void observe_batch(const BatchContext&, std::span<const BlockObservation> observations) {
    detail::accumulate(observations, state_);
  }

  bool needs_feedback(const BatchContext&) const { return true; }
  const PolicyState& state() const { return state_; }

 private:
  PolicyState state_;
  std::vector<double> means_;
  std::vector<std::size_t> planned_;
};

// ---------------------------------------------------------------------------
// ETC: two-armed explore-then-commit
// ---------------------------------------------------------------------------

/// sqrt(4 log(T / tau) / tau), clamped at zero.
inline double etc_threshold(std::size_t horizon, std::size_t tau) {
  const double t = static_cast<double>(tau);
  return std::sqrt(std::max(0.0, 4.0 * std::log(static_cast<double>(horizon) / t) / t));
}

struct EtcConfig {
  std::size_t num_arms = 2;
  std::size_t horizon = 1;
  // Replaces etc_threshold(T, tau) when set.
  ThresholdFn threshold_override;

  void validate() const {
    if (num_arms != 2) {
      throw UnsupportedConfigError("ETC supports exactly 2 arms, got " + std::to_string(num_arms));
    }
    if (horizon == 0) throw ConfigError("horizon must be positive");
  }

  double threshold(std::size_t tau) const {
    return threshold_override ? threshold_override(tau) : etc_threshold(horizon, tau);
  }
};

/// Before commitment both arms share the batch evenly (an odd pull goes
/// uncounted to arm 1); afterwards every pull goes to the committed arm. With
/// a single batch there is nothing to explore and arm 1 is used throughout.
inline BatchPlan etc_plan(const BatchContext& ctx, const PolicyState& state) {
  BatchPlan plan;
  if (state.num_arms() != 2) throw UnsupportedConfigError("ETC supports exactly 2 arms");
  if (state.committed_arm || ctx.is_last()) {
    const std::size_t arm = state.committed_arm.value_or(0);
    if (ctx.length > 0) plan.push_back({arm, ctx.length, 0});
    return plan;
  }
  detail::split_evenly(state.active, ctx.length, /*count_remainder=*/false, plan);
  return plan;
}

/// Commitment test at the end of an exploration batch. Returns the arm
/// committed to, if any. At the end of batch M-1 commitment is forced.
inline std::optional<std::size_t> etc_decide(const BatchContext& ctx, PolicyState& state,
                                             const EtcConfig& cfg) {
  if (state.committed_arm || ctx.is_last()) return state.committed_arm;
  const std::size_t tau = detail::common_counted_pulls(state);
  if (tau == 0) return std::nullopt;
  const double diff = state.average(0) - state.average(1);
  const bool forced = ctx.batch + 2 == ctx.num_batches;
  if (forced || std::abs(diff) >= cfg.threshold(tau)) {
    state.committed_arm = detail::empirical_argmax(state, state.active);
  }
  return state.committed_arm;
}

class EtcPolicy {
 public:
  static constexpr std::string_view kName = "etc";

  explicit EtcPolicy(EtcConfig cfg) : cfg_(std::move(cfg)), state_(cfg_.num_arms) {
    cfg_.validate();
  }

  void plan_batch(const BatchContext& ctx, BatchPlan& plan) {
    plan = etc_plan(ctx, state_);
    if (ctx.is_last() && !state_.committed_arm) state_.committed_arm = 0;
    detail::record_plan(plan, state_);
  }

  void observe_batch(const BatchContext& ctx, std::span<const BlockObservation> observations) {
    detail::accumulate(observations, state_);
    etc_decide(ctx, state_, cfg_);
  }

  bool needs_feedback(const BatchContext&) const { return !state_.committed_arm; }
  const PolicyState& state() const { return state_; }

 private:
  EtcConfig cfg_;
  PolicyState state_;
};

// ---------------------------------------------------------------------------
// Uniform round-robin control
// ---------------------------------------------------------------------------

inline BatchPlan uniform_plan(const BatchContext& ctx, std::size_t num_arms) {
  std::vector<std::size_t> arms(num_arms);
  for (std::size_t i = 0; i < num_arms; ++i) arms[i] = i;
  BatchPlan plan;
  detail::split_evenly(arms, ctx.length, /*count_remainder=*/true, plan);
  return plan;
}

class UniformPolicy {
 public:
  static constexpr std::string_view kName = "uniform";

  explicit UniformPolicy(std::size_t num_arms) : state_(num_arms) {
    if (num_arms < 1) throw ConfigError("uniform policy needs at least one arm");
  }

  void plan_batch(const BatchContext& ctx, BatchPlan& plan) {
    plan = uniform_plan(ctx, state_.num_arms());
    detail::record_plan(plan, state_);
  }

  void observe_batch(const BatchContext&, std::span<const BlockObservation> observations) {
    detail::accumulate(observations, state_);
  }

  bool needs_feedback(const BatchContext&) const { return true; }
  const PolicyState& state() const { return state_; }

 private:
  PolicyState state_;
};

static_assert(BatchPolicy<BasePolicy>);
static_assert(BatchPolicy<Ucb1Policy>);
static_assert(BatchPolicy<EtcPolicy>);
static_assert(BatchPolicy<UniformPolicy>);

// ---------------------------------------------------------------------------
// Name-based construction
// ---------------------------------------------------------------------------

enum class PolicyKind { base, ucb1, etc, uniform };

inline std::string_view to_string(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::base: return BasePolicy::kName;
    case PolicyKind::ucb1: return Ucb1Policy::kName;
    case PolicyKind::etc: return EtcPolicy::kName;
    case PolicyKind::uniform: return UniformPolicy::kName;
  }
  return "unknown";
}

inline std::optional<PolicyKind> parse_policy_kind(std::string_view name) {
  for (auto k : {PolicyKind::base, PolicyKind::ucb1, PolicyKind::etc, PolicyKind::uniform}) {
    if (to_string(k) == name) return k;
  }
  return std::nullopt;
}

using AnyPolicy = std::variant<BasePolicy, Ucb1Policy, EtcPolicy, UniformPolicy>;

inline AnyPolicy make_policy(PolicyKind kind, std::size_t num_arms, std::size_t horizon,
                             double gamma) {
  switch (kind) {
    case PolicyKind::base: return BasePolicy(BaseConfig{gamma, num_arms, horizon, {}});
    case PolicyKind::ucb1: return Ucb1Policy(num_arms);
    case PolicyKind::etc: return EtcPolicy(EtcConfig{num_arms, horizon, {}});
    case PolicyKind::uniform: return UniformPolicy(num_arms);
  }
  throw ConfigError("unknown policy");
}

}  // namespace batched
