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
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <mutex>
#include <string>
#include <string_view>
#include <thread>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "batched_bandit/core.hpp"
#include "batched_bandit/policies.hpp"
#include "batched_bandit/random.hpp"

namespace batched {

/// Gaussian rewards N(mu_i, 1). The n-th pull (0-based) of arm i is a pure
/// function of (seed, i, n): Philox block (n / 4, i, 0, 0) under key
/// (seed, kStreamTag), word n % 4, pushed through the normal quantile.
class RewardStream {
 public:
  static constexpr std::string_view kSamplerId = "philox4x64-10/as241-inverse-cdf";
  static constexpr std::uint64_t kStreamTag = 0x62616e6469742d72ULL;  // "bandit-r"

  RewardStream(const BanditInstance& instance, std::uint64_t seed)
      : means_(instance.means().begin(), instance.means().end()),
        seed_(seed),
        cache_(instance.num_arms()) {}

  /// Unit-variance zero-mean noise of pull `n` of `arm`.
  double noise(std::size_t arm, std::uint64_t n) const {
    auto& slot = cache_[arm];
    const std::uint64_t block = n >> 2;
    if (!slot.valid || slot.block != block) {
      const auto out = Philox4x64::apply({block, static_cast<std::uint64_t>(arm), 0, 0},
                                         {seed_, kStreamTag});
      for (int w = 0; w < 4; ++w) slot.values[w] = normal_quantile(bits_to_open_unit(out[w]));
      slot.block = block;
      slot.valid = true;
    }
    return slot.values[n & 3];
  }

  double operator()(std::size_t arm, std::uint64_t n) const { return means_[arm] + noise(arm, n); }

  std::size_t num_arms() const noexcept { return means_.size(); }
  std::uint64_t seed() const noexcept { return seed_; }

 private:
  struct Block {
    std::uint64_t block = 0;
    bool valid = false;
    double values[4] = {};
  };

  std::vector<double> means_;
  std::uint64_t seed_;
  mutable std::vector<Block> cache_;
};

/// Observer that ignores every batch.
struct NoBatchObserver {
  void operator()(const BatchContext&, const PolicyState&, const BatchPlan&) const noexcept {}
};

namespace detail {

// Round-robin layout of a plan: one pull from each block per round.
inline void append_interleaved(const BatchPlan& plan, std::vector<std::uint32_t>& out) {
  if (plan.size() == 1) {
    out.insert(out.end(), plan.front().size(), static_cast<std::uint32_t>(plan.front().arm));
    return;
  }
  std::size_t longest = 0;
  for (const auto& block : plan) longest = std::max(longest, block.size());
  for (std::size_t round = 0; round < longest; ++round) {
    for (const auto& block : plan) {
      if (round < block.size()) out.push_back(static_cast<std::uint32_t>(block.arm));
    }
  }
}

}  // namespace detail

/// Runs one episode of `policy` (modified in place) against `source`, which
/// must provide `double operator()(arm, pull_index)`. Batches run in order:
/// plan, then sample the planned pulls, then hand the rewards over. The
/// observer sees the policy state after every batch.
template <BatchPolicy P, class Source, class Observer = NoBatchObserver>
RunTrace run_episode_with_source(P& policy, const Grid& grid, const BanditInstance& instance,
                                 Source& source, Observer&& observer = {}) {
  const std::size_t K = instance.num_arms();
  const std::size_t T = grid.horizon();
  if (grid.times.empty()) throw ConfigError("grid has no batches");
  if (policy.state().num_arms() != K) {
    throw PolicyContractError("policy configured for " + std::to_string(policy.state().num_arms()) +
                              " arms but the instance has " + std::to_string(K));
  }

  RunTrace trace;
  trace.arm_pulled.reserve(T);
  trace.batch_ends = grid.times;

  std::vector<std::uint64_t> next_pull(K, 0);
  std::vector<std::size_t> pulls_per_arm(K, 0);
  std::vector<double> rewards;
  std::vector<BlockObservation> observations;
  std::vector<std::size_t> active_before;
  BatchPlan plan;

  for (std::size_t m = 0; m < grid.num_batches(); ++m) {
    const BatchContext ctx{m, grid.num_batches(), grid.batch_start(m), grid.batch_length(m)};
    plan.clear();
    policy.plan_batch(ctx, plan);
    if (detail::plan_size(plan) != ctx.length) {
      throw PolicyContractError("plan for batch " + std::to_string(m + 1) + " has " +
                                std::to_string(detail::plan_size(plan)) + " pulls, batch length is " +
                                std::to_string(ctx.length));
    }
    for (const auto& block : plan) {
      if (block.arm >= K) throw PolicyContractError("plan names arm outside [K]");
      pulls_per_arm[block.arm] += block.size();
    }
    detail::append_interleaved(plan, trace.arm_pulled);

    if (policy.needs_feedback(ctx)) {
      rewards.resize(ctx.length);
      observations.clear();
      std::size_t offset = 0;
      for (const auto& block : plan) {
        std::uint64_t& n = next_pull[block.arm];
        for (std::size_t k = 0; k < block.size(); ++k) rewards[offset + k] = source(block.arm, n++);
        const std::span<const double> all(rewards.data() + offset, block.size());
        observations.push_back({block.arm, all.first(block.counted), all.subspan(block.counted)});
        offset += block.size();
      }
      active_before = policy.state().active;
      policy.observe_batch(ctx, observations);
      const auto& active_after = policy.state().active;
      if (active_after.empty()) throw InternalInvariantError("policy emptied its active set");
      if (active_after.size() != active_before.size()) {
        for (std::size_t arm : active_before) {
          if (!std::binary_search(active_after.begin(), active_after.end(), arm)) {
            trace.eliminations.push_back({arm, m});
          }
        }
      }
    } else {
      for (const auto& block : plan) next_pull[block.arm] += block.size();
    }
    observer(ctx, policy.state(), plan);
  }

  trace.committed_arm = policy.state().committed_arm;
  trace.realized_regret = regret_from_counts(pulls_per_arm, instance);
  return trace;
}

/// Runs a fresh copy of `policy` on Gaussian rewards seeded by `seed`.
template <BatchPolicy P, class Observer = NoBatchObserver>
RunTrace run_episode(P policy, const Grid& grid, const BanditInstance& instance, std::uint64_t seed,
                     Observer&& observer = {}) {
  RewardStream source(instance, seed);
  RunTrace trace =
      run_episode_with_source(policy, grid, instance, source, std::forward<Observer>(observer));
  trace.seed = seed;
  return trace;
}

template <class Observer = NoBatchObserver>
RunTrace run_episode(const AnyPolicy& policy, const Grid& grid, const BanditInstance& instance,
                     std::uint64_t seed, Observer&& observer = {}) {
  return std::visit(
      [&](const auto& p) { return run_episode(p, grid, instance, seed, observer); }, policy);
}

// ---------------------------------------------------------------------------
// Replications
// ---------------------------------------------------------------------------

inline std::size_t resolve_threads(std::size_t threads) {
  if (threads != 0) return threads;
  return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

/// Calls `body(rep)` for rep in [0, count) on `threads` workers. Each rep is
/// handled exactly once; the first exception is rethrown after all workers
/// have stopped.
template <class Body>
void parallel_for(std::size_t count, std::size_t threads, Body&& body) {
  threads = std::min(resolve_threads(threads), std::max<std::size_t>(count, 1));
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> workers;
    workers.reserve(threads);
    for (std::size_t w = 0; w < threads; ++w) {
      workers.emplace_back([&] {
        for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
          try {
            body(i);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
            next.store(count);
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

/// Runs `replications` independent episodes, replication r seeded with
/// derive_seed(base_seed, r), and returns summarize(trace) per replication
/// in replication order regardless of the thread count.
template <class Summarize>
auto run_replications(const AnyPolicy& policy, const Grid& grid, const BanditInstance& instance,
                      std::size_t replications, std::uint64_t base_seed, std::size_t threads,
                      Summarize&& summarize) {
  using Value = std::decay_t<std::invoke_result_t<Summarize&, const RunTrace&>>;
  std::vector<Value> values(replications);
  parallel_for(replications, threads, [&](std::size_t rep) {
    values[rep] = summarize(run_episode(policy, grid, instance, derive_seed(base_seed, rep)));
  });
  return values;
}

struct RegretEstimate {
  double mean = 0.0;
  double standard_error = 0.0;
  std::size_t replications = 0;
  std::vector<double> samples;
};

/// Sample mean and standard error, summed in index order. A single sample
/// has standard error 0.
inline RegretEstimate summarize_samples(std::vector<double> samples) {
  RegretEstimate est;
  est.replications = samples.size();
  if (samples.empty()) return est;
  // Constant samples: exact mean, zero error.
  if (std::all_of(samples.begin(), samples.end(), [&](double x) { return x == samples.front(); })) {
    est.mean = samples.front();
    est.samples = std::move(samples);
    return est;
  }
  double sum = 0.0;
  for (double x : samples) sum += x;
  est.mean = sum / static_cast<double>(samples.size());
  {
    double ss = 0.0;
    for (double x : samples) ss += (x - est.mean) * (x - est.mean);
    const double var = ss / static_cast<double>(samples.size() - 1);
    est.standard_error = std::sqrt(var / static_cast<double>(samples.size()));
  }
  est.samples = std::move(samples);
  return est;
}

/// Monte-Carlo estimate of the expected regret of `policy`.
inline RegretEstimate mean_regret(const AnyPolicy& policy, const Grid& grid,
                                  const BanditInstance& instance, std::size_t replications,
                                  std::uint64_t base_seed, std::size_t threads = 1) {
  if (replications < 2) throw ConfigError("mean_regret needs at least 2 replications");
  return summarize_samples(run_replications(policy, grid, instance, replications, base_seed,
                                            threads,
                                            [](const RunTrace& t) { return t.realized_regret; }));
}

}  // namespace batched
