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

// Lower bounds for batched bandits and exact numeric checks of the
// inequalities behind them.
//
// Static grids: for any policy on grid 0 = t_0 < t_1 < ... < t_M = T and
// smallest gap delta in (0, sqrt(K)],
//
//   sup E[R_T] >= delta * sum_j (t_j - t_{j-1}) / 4 * exp(-2 t_{j-1} delta^2 / (K - 1)),
//
// witnessed by the star family P_1..P_K. The proof chains three facts that
// are checked here on finite distributions:
//   TV(P, Q) <= sqrt(1 - exp(-KL(P||Q))) <= 1 - exp(-KL(P||Q)) / 2,
//   sum_i x_i - max_i x_i >= sum_{(i,j) in E} min(x_i, x_j) for any tree E,
//   (1/n) sum_i Q_i(psi != i) >= sum_{(i,j) in E} exp(-KL(Q_i||Q_j)) / (2n).

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "batched_bandit/core.hpp"
#include "batched_bandit/grids.hpp"
#include "batched_bandit/policies.hpp"
#include "batched_bandit/random.hpp"
#include "batched_bandit/simulator.hpp"

namespace batched {

inline constexpr double kInequalitySlack = 1e-12;

// ---------------------------------------------------------------------------
// Static-grid lower bound
// ---------------------------------------------------------------------------

inline double static_lb_value(const Grid& grid, double delta, std::size_t K) {
  if (K < 2) throw DomainError("lower bound needs K >= 2");
  if (!(delta > 0.0) || delta > std::sqrt(static_cast<double>(K))) {
    throw DomainError("gap must lie in (0, sqrt(K)]");
  }
  const double scale = 2.0 * delta * delta / static_cast<double>(K - 1);
  double sum = 0.0;
  std::size_t prev = 0;
  for (std::size_t t : grid.times) {
    sum += static_cast<double>(t - prev) / 4.0 * std::exp(-scale * static_cast<double>(prev));
    prev = t;
  }
  return delta * sum;
}

/// The gap probes delta_j = min(sqrt((K-1)/(t_{j-1}+1)), sqrt(K)), one per batch.
inline std::vector<double> static_lb_probe_gaps(const Grid& grid, std::size_t K) {
  std::vector<double> gaps;
  gaps.reserve(grid.num_batches());
  const double cap = std::sqrt(static_cast<double>(K));
  for (std::size_t j = 0; j < grid.num_batches(); ++j) {
    const double prev = static_cast<double>(grid.batch_start(j));
    gaps.push_back(std::min(std::sqrt(static_cast<double>(K - 1) / (prev + 1.0)), cap));
  }
  return gaps;
}

struct OptimizedLowerBound {
  double minimax = 0.0;           // max_j static_lb_value(grid, delta_j, K)
  double problem_dependent = 0.0; // max_j delta_j * static_lb_value(grid, delta_j, K)
  double minimax_gap = 0.0;
  double problem_dependent_gap = 0.0;
};

inline OptimizedLowerBound static_lb_optimized(const Grid& grid, std::size_t K) {
  OptimizedLowerBound out;
  for (double gap : static_lb_probe_gaps(grid, K)) {
    const double value = static_lb_value(grid, gap, K);
    if (value > out.minimax) {
      out.minimax = value;
      out.minimax_gap = gap;
    }
    if (gap * value > out.problem_dependent) {
      out.problem_dependent = gap * value;
      out.problem_dependent_gap = gap;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Hard instance families
// ---------------------------------------------------------------------------

enum class FamilyKind { static_star, adaptive };

struct HardInstanceFamily {
  FamilyKind kind = FamilyKind::static_star;
  std::size_t num_arms = 0;
  double delta = 0.0;  // static star only
  std::vector<BanditInstance> instances;
  std::vector<std::string> labels;

  // Adaptive family: checkpoints T_1..T_M and gaps delta_1..delta_M.
  std::vector<std::size_t> checkpoints;
  std::vector<double> gaps;
};

/// P_1 = (delta, 0, ..., 0); P_i for i >= 2 additionally puts 2 delta on arm
/// i. Under P_i arm i is the unique optimum and every other arm costs at
/// least delta per pull.
inline HardInstanceFamily make_static_star_family(std::size_t K, double delta) {
  if (K < 2) throw DomainError("star family needs K >= 2");
  if (!(delta > 0.0) || 2.0 * delta > std::sqrt(static_cast<double>(K))) {
    throw DomainError("star family needs 0 < 2*delta <= sqrt(K)");
  }
  HardInstanceFamily family;
  family.kind = FamilyKind::static_star;
  family.num_arms = K;
  family.delta = delta;
  for (std::size_t i = 0; i < K; ++i) {
    std::vector<double> means(K, 0.0);
    means[0] = delta;
    if (i > 0) means[i] = 2.0 * delta;
    family.instances.emplace_back(std::move(means));
    family.labels.push_back("P_" + std::to_string(i + 1));
  }
  return family;
}

/// T_j = floor(T^{(1 - 2^{-j}) / (1 - 2^{-M})}),
/// delta_j = sqrt(K) / (36 M) * T^{-(1 - 2^{1-j}) / (2 (1 - 2^{-M}))};
/// P_{j,k} (j < M, k < K) has mean delta_j + delta_M on arm k and delta_M on
/// arm K; P_M has delta_M on arm K only.
inline HardInstanceFamily make_adaptive_family(std::size_t K, std::size_t M, std::size_t T) {
  if (K < 2) throw DomainError("adaptive family needs K >= 2");
  if (M < 1) throw DomainError("adaptive family needs M >= 1");
  if (T < 1) throw DomainError("adaptive family needs T >= 1");
  HardInstanceFamily family;
  family.kind = FamilyKind::adaptive;
  family.num_arms = K;
  const double denom = 1.0 - std::ldexp(1.0, -static_cast<int>(M));
  const double Td = static_cast<double>(T);
  const double lead = std::sqrt(static_cast<double>(K)) / (36.0 * static_cast<double>(M));
  for (std::size_t j = 1; j <= M; ++j) {
    const double exp_t = (1.0 - std::ldexp(1.0, -static_cast<int>(j))) / denom;
    family.checkpoints.push_back(j == M ? T : detail::snapped_floor(std::pow(Td, exp_t)));
    const double exp_d = (1.0 - std::ldexp(1.0, 1 - static_cast<int>(j))) / (2.0 * denom);
    family.gaps.push_back(lead * std::pow(Td, -exp_d));
  }
  const double last_gap = family.gaps.back();
  for (std::size_t j = 1; j < M; ++j) {
    for (std::size_t k = 1; k < K; ++k) {
      std::vector<double> means(K, 0.0);
      means[k - 1] = family.gaps[j - 1] + last_gap;
      means[K - 1] = last_gap;
      family.instances.emplace_back(std::move(means));
      family.labels.push_back("P_{" + std::to_string(j) + "," + std::to_string(k) + "}");
    }
  }
  std::vector<double> means(K, 0.0);
  means[K - 1] = last_gap;
  family.instances.emplace_back(std::move(means));
  family.labels.push_back("P_M");
  return family;
}

// ---------------------------------------------------------------------------
// Divergences
// ---------------------------------------------------------------------------

inline void check_same_length(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) {
    throw DomainError("distributions have different lengths (" + std::to_string(p.size()) +
                      " vs " + std::to_string(q.size()) + ")");
  }
}

inline double tv_distance(std::span<const double> p, std::span<const double> q) {
  check_same_length(p, q);
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) sum += std::abs(p[i] - q[i]);
  return 0.5 * sum;
}

/// KL(P||Q) in nats; 0 log 0 = 0 and +inf when P charges a Q-null point.
inline double kl_divergence(std::span<const double> p, std::span<const double> q) {
  check_same_length(p, q);
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] == 0.0) continue;
    if (q[i] == 0.0) return std::numeric_limits<double>::infinity();
    sum += p[i] * std::log(p[i] / q[i]);
  }
  return std::max(0.0, sum);
}

// ---------------------------------------------------------------------------
// Witnesses
// ---------------------------------------------------------------------------

struct Witness {
  std::string lemma;
  std::string inputs_digest;
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = kInequalitySlack;
  bool pass = true;
  // Every term of a chained inequality, left to right.
  std::vector<double> chain;
};

namespace detail {

inline void digest_doubles(std::uint64_t& h, std::span<const double> values) {
  for (double v : values) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof bits);
    h = hash_combine(h, bits);
  }
  h = hash_combine(h, values.size());
}

inline std::string hex64(std::uint64_t h) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i, h >>= 4) out[static_cast<std::size_t>(i)] = kDigits[h & 0xF];
  return out;
}

}  // namespace detail

using Edge = std::pair<std::size_t, std::size_t>;

/// Throws DomainError unless `edges` is a spanning tree of {0, ..., n-1}.
inline void validate_tree(std::size_t n, std::span<const Edge> edges) {
  if (n == 0) throw DomainError("tree needs at least one vertex");
  if (edges.size() != n - 1) {
    throw DomainError("a tree on " + std::to_string(n) + " vertices has " + std::to_string(n - 1) +
                      " edges, got " + std::to_string(edges.size()));
  }
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t v) {
    while (parent[v] != v) v = parent[v] = parent[parent[v]];
    return v;
  };
  for (const auto& [a, b] : edges) {
    if (a >= n || b >= n) throw DomainError("edge endpoint outside the vertex set");
    const std::size_t ra = find(a);
    const std::size_t rb = find(b);
    if (ra == rb) throw DomainError("edge set contains a cycle");
    parent[ra] = rb;
  }
}

/// TV(P,Q) <= sqrt(1 - exp(-KL)) <= 1 - exp(-KL)/2.
inline Witness check_tv_kl(std::span<const double> p, std::span<const double> q) {
  Witness w;
  w.lemma = "tv-kl";
  std::uint64_t h = 0x7476;
  detail::digest_doubles(h, p);
  detail::digest_doubles(h, q);
  w.inputs_digest = detail::hex64(h);
  const double tv = tv_distance(p, q);
  const double kl = kl_divergence(p, q);
  const double e = std::exp(-kl);
  const double middle = std::sqrt(std::max(0.0, 1.0 - e));
  const double right = 1.0 - e / 2.0;
  w.chain = {tv, middle, right};
  w.lhs = tv;
  w.rhs = right;
  w.pass = tv <= middle + w.slack && middle <= right + w.slack;
  return w;
}

/// sum x - max x >= sum over tree edges of min(x_i, x_j).
inline Witness check_majorization(std::span<const double> x, std::span<const Edge> edges) {
  validate_tree(x.size(), edges);
  Witness w;
  w.lemma = "tree-majorization";
  std::uint64_t h = 0x6d616a;
  detail::digest_doubles(h, x);
  for (const auto& [a, b] : edges) h = hash_combine(hash_combine(h, a), b);
  w.inputs_digest = detail::hex64(h);
  double total = 0.0;
  for (double v : x) total += v;
  w.lhs = total - *std::max_element(x.begin(), x.end());
  double edge_sum = 0.0;
  for (const auto& [a, b] : edges) edge_sum += std::min(x[a], x[b]);
  w.rhs = edge_sum;
  w.chain = {w.lhs, w.rhs};
  // Relative slack: sums of n terms carry rounding proportional to their size.
  double scale = 1.0;
  for (double v : x) scale = std::max(scale, std::abs(v));
  w.pass = w.lhs >= w.rhs - w.slack * scale;
  return w;
}

/// n distributions over a shared finite sample space plus a tree on [n].
struct FiniteTestProblem {
  std::vector<std::vector<double>> distributions;
  std::vector<Edge> edges;

  static constexpr std::size_t kMaxOutcomes = 1'000'000;

  void validate() const {
    if (distributions.size() < 2) throw DomainError("testing problem needs at least 2 hypotheses");
    const std::size_t outcomes = distributions.front().size();
    if (outcomes == 0 || outcomes > kMaxOutcomes) {
      throw DomainError("sample space must have between 1 and 10^6 outcomes");
    }
    for (const auto& row : distributions) {
      if (row.size() != outcomes) throw DomainError("distributions have different supports");
      double sum = 0.0;
      for (double v : row) {
        if (!(v >= 0.0)) throw DomainError("probabilities must be nonnegative");
        sum += v;
      }
      if (std::abs(sum - 1.0) > 1e-12) throw DomainError("probability vector does not sum to 1");
    }
    validate_tree(distributions.size(), edges);
  }
};

/// Enumerates the Bayes test psi*(w) = argmax_i Q_i(w) (ties to the lowest
/// index), whose average error is minimal over all tests, and compares it
/// with sum_{(i,j)} exp(-KL(Q_i||Q_j)) / (2n).
inline Witness check_tree_testing_bound(const FiniteTestProblem& problem) {
  problem.validate();
  const auto& q = problem.distributions;
  const std::size_t n = q.size();
  const std::size_t outcomes = q.front().size();

  double rhs = 0.0;
  for (const auto& [i, j] : problem.edges) {
    const double kl = kl_divergence(q[i], q[j]);
    if (!std::isfinite(kl)) {
      throw DomainError("KL(Q_" + std::to_string(i + 1) + " || Q_" + std::to_string(j + 1) +
                        ") is infinite");
    }
    rhs += std::exp(-kl);
  }
  rhs /= 2.0 * static_cast<double>(n);

  std::vector<double> error(n, 0.0);
  for (std::size_t w = 0; w < outcomes; ++w) {
    std::size_t guess = 0;
    for (std::size_t i = 1; i < n; ++i) {
      if (q[i][w] > q[guess][w]) guess = i;
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (i != guess) error[i] += q[i][w];
    }
  }
  double lhs = 0.0;
  for (double e : error) lhs += e;
  lhs /= static_cast<double>(n);

  Witness wit;
  wit.lemma = "tree-testing";
  std::uint64_t h = 0x747374;
  for (const auto& row : q) detail::digest_doubles(h, row);
  for (const auto& [a, b] : problem.edges) h = hash_combine(hash_combine(h, a), b);
  wit.inputs_digest = detail::hex64(h);
  wit.lhs = lhs;
  wit.rhs = rhs;
  wit.chain = {lhs, rhs};
  wit.pass = lhs >= rhs - wit.slack;
  return wit;
}

// ---------------------------------------------------------------------------
// Randomized property suites
// ---------------------------------------------------------------------------

struct SuiteResult {
  std::string name;
  std::size_t trials = 0;
  std::size_t violations = 0;
  std::vector<Witness> failures;  // at most a few, for the report
  bool pass() const noexcept { return violations == 0; }
};

namespace detail {

inline void record(SuiteResult& result, Witness w) {
  ++result.trials;
  if (w.pass) return;
  ++result.violations;
  if (result.failures.size() < 5) result.failures.push_back(std::move(w));
}

// Point of the open simplex; with `allow_zeros` some coordinates are zeroed
// (at least one always survives).
inline std::vector<double> random_simplex(std::mt19937_64& rng, std::size_t dim, bool allow_zeros) {
  std::exponential_distribution<double> expo(1.0);
  std::bernoulli_distribution drop(0.25);
  std::vector<double> v(dim);
  double sum = 0.0;
  for (auto& x : v) {
    x = expo(rng) + 1e-300;
    if (allow_zeros && drop(rng)) x = 0.0;
    sum += x;
  }
  if (sum == 0.0) {
    v[std::uniform_int_distribution<std::size_t>(0, dim - 1)(rng)] = 1.0;
    return v;
  }
  for (auto& x : v) x /= sum;
  return v;
}

// Random labelled tree: vertex k attaches to a uniform earlier vertex, then
// labels are shuffled and each edge is randomly oriented.
inline std::vector<Edge> random_tree(std::mt19937_64& rng, std::size_t n) {
  std::vector<std::size_t> label(n);
  std::iota(label.begin(), label.end(), std::size_t{0});
  std::shuffle(label.begin(), label.end(), rng);
  std::vector<Edge> edges;
  for (std::size_t k = 1; k < n; ++k) {
    const std::size_t parent = std::uniform_int_distribution<std::size_t>(0, k - 1)(rng);
    Edge e{label[k], label[parent]};
    if (std::bernoulli_distribution(0.5)(rng)) std::swap(e.first, e.second);
    edges.push_back(e);
  }
  return edges;
}

}  // namespace detail

using TvKlChecker = std::function<Witness(std::span<const double>, std::span<const double>)>;
using MajorizationChecker = std::function<Witness(std::span<const double>, std::span<const Edge>)>;
using TreeTestingChecker = std::function<Witness(const FiniteTestProblem&)>;

/// Random pairs in dimensions 2..8; P may have zeros, Q is strictly positive.
inline SuiteResult run_tv_kl_trials(std::size_t trials, std::uint64_t seed,
                                    const TvKlChecker& checker = check_tv_kl) {
  std::mt19937_64 rng(seed);
  SuiteResult result{"tv-kl", 0, 0, {}};
  for (std::size_t t = 0; t < trials; ++t) {
    const std::size_t dim = std::uniform_int_distribution<std::size_t>(2, 8)(rng);
    auto p = detail::random_simplex(rng, dim, true);
    auto q = (t % 17 == 0) ? p : detail::random_simplex(rng, dim, false);
    if (std::any_of(q.begin(), q.end(), [](double v) { return v == 0.0; })) q = detail::random_simplex(rng, dim, false);
    detail::record(result, checker(p, q));
  }
  return result;
}

/// Random trees on 2..8 vertices with Gaussian, integer-tied or constant x.
inline SuiteResult run_majorization_trials(std::size_t trials, std::uint64_t seed,
                                           const MajorizationChecker& checker = check_majorization) {
  std::mt19937_64 rng(seed);
  SuiteResult result{"tree-majorization", 0, 0, {}};
  std::normal_distribution<double> gauss(0.0, 3.0);
  for (std::size_t t = 0; t < trials; ++t) {
    const std::size_t n = std::uniform_int_distribution<std::size_t>(2, 8)(rng);
    std::vector<double> x(n);
    const int mode = static_cast<int>(t % 3);
    const double c = gauss(rng);
    for (auto& v : x) v = mode == 0 ? gauss(rng) : mode == 1 ? std::round(gauss(rng)) : c;
    const auto edges = detail::random_tree(rng, n);
    detail::record(result, checker(x, edges));
  }
  return result;
}

/// Random problems with 2..8 hypotheses over 2..8 outcomes, strictly
/// positive so every KL is finite.
inline SuiteResult run_tree_testing_trials(std::size_t trials, std::uint64_t seed,
                                           const TreeTestingChecker& checker = check_tree_testing_bound) {
  std::mt19937_64 rng(seed);
  SuiteResult result{"tree-testing", 0, 0, {}};
  for (std::size_t t = 0; t < trials; ++t) {
    const std::size_t n = std::uniform_int_distribution<std::size_t>(2, 8)(rng);
    const std::size_t outcomes = std::uniform_int_distribution<std::size_t>(2, 8)(rng);
    FiniteTestProblem problem;
    for (std::size_t i = 0; i < n; ++i) {
      problem.distributions.push_back(detail::random_simplex(rng, outcomes, false));
    }
    problem.edges = detail::random_tree(rng, n);
    detail::record(result, checker(problem));
  }
  return result;
}

// ---------------------------------------------------------------------------
// Empirical regret floor
// ---------------------------------------------------------------------------

struct RegretFloorReport {
  std::string policy;
  std::vector<std::string> labels;
  std::vector<RegretEstimate> per_instance;  // samples dropped
  double max_mean = 0.0;
  double max_standard_error = 0.0;
  double bound = 0.0;
  bool pass = false;
};

/// Estimates the regret of `policy` under every member of a static-star
/// family and checks max_i mean_i >= static_lb_value - 3 * max stderr.
inline RegretFloorReport regret_floor_check(const AnyPolicy& policy, std::string policy_name,
                                            const HardInstanceFamily& family, const Grid& grid,
                                            std::size_t replications, std::uint64_t base_seed,
                                            std::size_t threads = 1) {
  if (family.kind != FamilyKind::static_star) {
    throw UnsupportedConfigError("regret floor check needs a static-star family");
  }
  RegretFloorReport report;
  report.policy = std::move(policy_name);
  report.labels = family.labels;
  report.bound = static_lb_value(grid, family.delta, family.num_arms);
  for (std::size_t i = 0; i < family.instances.size(); ++i) {
    auto est = mean_regret(policy, grid, family.instances[i], replications,
                           hash_combine(base_seed, i), threads);
    est.samples.clear();
    report.max_mean = std::max(report.max_mean, est.mean);
    report.max_standard_error = std::max(report.max_standard_error, est.standard_error);
    report.per_instance.push_back(std::move(est));
  }
  report.pass = report.max_mean >= report.bound - 3.0 * report.max_standard_error;
  return report;
}

}  // namespace batched
