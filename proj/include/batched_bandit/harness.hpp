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

// Monte-Carlo experiments: presets, sweeps, CSV and JSON output, and the
// bounds report.
//
// CSV schema (one row per configuration and replication):
//
//   experiment_id,policy,grid,K,M,T,gamma,rep,seed,regret
//
// rep is 1-based, seed is the unsigned 64-bit reward seed of that
// replication, reals are printed as shortest round-trip decimals. The UCB1
// reference runs on the online grid and reports M = T.

#pragma once

#include <charconv>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "batched_bandit/bounds.hpp"
#include "batched_bandit/core.hpp"
#include "batched_bandit/grids.hpp"
#include "batched_bandit/policies.hpp"
#include "batched_bandit/random.hpp"
#include "batched_bandit/simulator.hpp"

namespace batched {

inline constexpr std::string_view kCsvHeader = "experiment_id,policy,grid,K,M,T,gamma,rep,seed,regret";

/// Shortest decimal that parses back to exactly `x`.
inline std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  if (res.ec != std::errc()) throw InternalInvariantError("to_chars failed");
  return std::string(buf, res.ptr);
}

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

enum class SweepAxis { none, M, K, T };

inline std::string_view to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::none: return "none";
    case SweepAxis::M: return "M";
    case SweepAxis::K: return "K";
    case SweepAxis::T: return "T";
  }
  return "?";
}

struct SeriesSpec {
  PolicyKind policy = PolicyKind::base;
  GridFamily grid = GridFamily::minimax;  // ignored for ucb1, which runs online

  std::string label() const {
    if (policy == PolicyKind::ucb1) return "ucb1";
    return std::string(to_string(policy)) + "-" + std::string(to_string(grid));
  }
};

struct ExperimentConfig {
  std::string experiment_id = "custom";
  std::vector<SeriesSpec> series{{PolicyKind::base, GridFamily::minimax}};
  std::size_t K = 3;
  std::size_t M = 3;
  std::size_t T = 50000;
  double gamma = 1.0;
  double optimal_mean = 0.6;
  double suboptimal_mean = 0.5;
  // Overrides the (optimal, suboptimal) means; must have length K.
  std::vector<double> explicit_means;
  std::size_t replications = 200;
  std::uint64_t base_seed = 20190501;
  SweepAxis axis = SweepAxis::none;
  std::vector<std::size_t> sweep_values;
  std::size_t threads = 1;  // 0 = hardware concurrency

  /// Arm 1 optimal, every other arm at the suboptimal mean.
  BanditInstance instance_for(std::size_t K_point) const {
    if (!explicit_means.empty()) return BanditInstance(explicit_means);
    std::vector<double> means(K_point, suboptimal_mean);
    means.front() = optimal_mean;
    return BanditInstance(std::move(means));
  }

  void validate() const {
    if (replications < 1) throw ConfigError("replications must be at least 1");
    if (series.empty()) throw ConfigError("experiment has no series");
    if (!(gamma > 0.0)) throw ConfigError("gamma must be positive");
    if (axis == SweepAxis::none && !sweep_values.empty()) {
      throw ConfigError("sweep values given without a sweep axis");
    }
    if (axis != SweepAxis::none) {
      if (sweep_values.empty()) throw ConfigError("sweep axis has no values");
      for (std::size_t i = 0; i < sweep_values.size(); ++i) {
        if (sweep_values[i] == 0) throw ConfigError("sweep values must be positive");
        if (i > 0 && sweep_values[i] <= sweep_values[i - 1]) {
          throw ConfigError("sweep values must be strictly increasing");
        }
      }
    }
    if (!explicit_means.empty()) {
      if (axis == SweepAxis::K) throw ConfigError("explicit means cannot be combined with a K sweep");
      if (explicit_means.size() != K) throw ConfigError("explicit means must have length K");
    }
    const auto check_k = [&](std::size_t k) { validate_instance(instance_for(k), true); };
    if (axis == SweepAxis::K) {
      for (std::size_t k : sweep_values) check_k(k);
    } else {
      check_k(K);
    }
  }
};

inline ExperimentConfig preset_fig1a() {
  ExperimentConfig cfg;
  cfg.experiment_id = "fig1a";
  cfg.series = {{PolicyKind::base, GridFamily::minimax},
                {PolicyKind::base, GridFamily::geometric},
                {PolicyKind::base, GridFamily::arithmetic},
                {PolicyKind::ucb1, GridFamily::online}};
  cfg.axis = SweepAxis::M;
  cfg.sweep_values = {2, 3, 4, 5, 6};
  return cfg;
}

inline ExperimentConfig preset_fig1b() {
  ExperimentConfig cfg = preset_fig1a();
  cfg.experiment_id = "fig1b";
  cfg.axis = SweepAxis::K;
  cfg.sweep_values = {2, 3, 4, 5, 6, 7, 8, 9, 10};
  return cfg;
}

inline ExperimentConfig preset_fig1c() {
  ExperimentConfig cfg = preset_fig1a();
  cfg.experiment_id = "fig1c";
  cfg.axis = SweepAxis::T;
  cfg.sweep_values = {1000, 3000, 10000, 30000, 50000};
  return cfg;
}

inline ExperimentConfig preset_fig1d() {
  ExperimentConfig cfg = preset_fig1c();
  cfg.experiment_id = "fig1d";
  cfg.K = 2;
  cfg.series = {{PolicyKind::base, GridFamily::minimax}, {PolicyKind::etc, GridFamily::minimax}};
  return cfg;
}

inline std::optional<ExperimentConfig> preset_by_name(std::string_view name) {
  if (name == "fig1a") return preset_fig1a();
  if (name == "fig1b") return preset_fig1b();
  if (name == "fig1c") return preset_fig1c();
  if (name == "fig1d") return preset_fig1d();
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Running
// ---------------------------------------------------------------------------

struct ResultRow {
  std::string experiment_id;
  std::string policy;
  std::string grid;
  std::size_t K = 0;
  std::size_t M = 0;
  std::size_t T = 0;
  double gamma = 0.0;
  std::size_t rep = 0;  // 1-based
  std::uint64_t seed = 0;
  double regret = 0.0;
};

struct SummaryRow {
  std::string experiment_id;
  std::string policy;
  std::string grid;
  std::string sweep_point;  // "M=3", "reference", ...
  std::size_t K = 0;
  std::size_t M = 0;
  std::size_t T = 0;
  double gamma = 0.0;
  std::size_t effective_batches = 0;
  std::vector<std::size_t> grid_times;
  double mean = 0.0;
  double standard_error = 0.0;
  std::size_t replications = 0;
};

struct SkippedPoint {
  std::string policy;
  std::string grid;
  std::string sweep_point;
  std::string reason;
};

struct ExperimentResult {
  std::string experiment_id;
  std::uint64_t base_seed = 0;
  std::vector<ResultRow> rows;
  std::vector<SummaryRow> summaries;
  std::vector<SkippedPoint> skipped;

  /// First summary matching policy, grid and sweep point, or nullptr.
  const SummaryRow* find(std::string_view policy, std::string_view grid,
                         std::string_view sweep_point) const {
    for (const auto& s : summaries) {
      if (s.policy == policy && s.grid == grid && s.sweep_point == sweep_point) return &s;
    }
    return nullptr;
  }
};

/// Seed shared by every series at one sweep point, so policies are compared
/// on the same reward tables. Adding points never moves existing seeds.
inline std::uint64_t sweep_point_seed(std::uint64_t base_seed, std::string_view experiment_id,
                                      std::string_view sweep_point) {
  return hash_combine(hash_combine(base_seed, hash_string(experiment_id)), hash_string(sweep_point));
}

namespace detail {

struct Point {
  std::string label;
  std::size_t K, M, T;
};

inline std::vector<Point> sweep_points(const ExperimentConfig& cfg) {
  std::vector<Point> points;
  if (cfg.axis == SweepAxis::none) {
    points.push_back({"none", cfg.K, cfg.M, cfg.T});
    return points;
  }
  for (std::size_t v : cfg.sweep_values) {
    Point p{std::string(to_string(cfg.axis)) + "=" + std::to_string(v), cfg.K, cfg.M, cfg.T};
    if (cfg.axis == SweepAxis::M) p.M = v;
    if (cfg.axis == SweepAxis::K) p.K = v;
    if (cfg.axis == SweepAxis::T) p.T = v;
    points.push_back(std::move(p));
  }
  return points;
}

}  // namespace detail

/// Runs every series at every sweep point. UCB1 does not depend on M, so on
/// an M sweep it runs once at sweep point "reference". Infeasible grids are
/// recorded in `skipped`.
inline ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  ExperimentResult result;
  result.experiment_id = cfg.experiment_id;
  result.base_seed = cfg.base_seed;

  const auto points = detail::sweep_points(cfg);
  for (const auto& series : cfg.series) {
    const bool online = series.policy == PolicyKind::ucb1;
    const std::string policy_name(to_string(series.policy));
    const std::string grid_name(to_string(online ? GridFamily::online : series.grid));
    for (std::size_t p = 0; p < points.size(); ++p) {
      detail::Point point = points[p];
      if (online && cfg.axis == SweepAxis::M) {
        if (p > 0) break;
        point = {"reference", cfg.K, cfg.T, cfg.T};
      }

      Grid grid;
      std::optional<AnyPolicy> policy;
      try {
        grid = online ? make_online_grid(point.T) : make_grid(series.grid, point.T, point.M, point.K);
        policy.emplace(make_policy(series.policy, point.K, point.T, cfg.gamma));
      } catch (const InfeasibleGridError& e) {
        result.skipped.push_back({policy_name, grid_name, point.label, e.what()});
        continue;
      } catch (const UnsupportedConfigError& e) {
        result.skipped.push_back({policy_name, grid_name, point.label, e.what()});
        continue;
      }
      if (auto violation = grid_growth_violation(grid)) {
        throw InternalInvariantError("grid growth check failed at " + point.label + ": " + *violation);
      }
      const std::size_t reported_M = online ? point.T : point.M;

      const BanditInstance instance = cfg.instance_for(point.K);
      const std::uint64_t point_seed = sweep_point_seed(cfg.base_seed, cfg.experiment_id, point.label);
      auto regrets = run_replications(*policy, grid, instance, cfg.replications, point_seed,
                                      cfg.threads,
                                      [](const RunTrace& t) { return t.realized_regret; });
      for (std::size_t rep = 0; rep < regrets.size(); ++rep) {
        result.rows.push_back({cfg.experiment_id, policy_name, grid_name, point.K, reported_M,
                               point.T, cfg.gamma, rep + 1, derive_seed(point_seed, rep),
                               regrets[rep]});
      }
      const RegretEstimate est = summarize_samples(std::move(regrets));
      SummaryRow summary;
      summary.experiment_id = cfg.experiment_id;
      summary.policy = policy_name;
      summary.grid = grid_name;
      summary.sweep_point = point.label;
      summary.K = point.K;
      summary.M = reported_M;
      summary.T = point.T;
      summary.gamma = cfg.gamma;
      summary.effective_batches = grid.num_batches();
      if (!online) summary.grid_times = grid.times;
      summary.mean = est.mean;
      summary.standard_error = est.standard_error;
      summary.replications = est.replications;
      result.summaries.push_back(std::move(summary));
    }
  }
  return result;
}

// ---------------------------------------------------------------------------
// Output
// ---------------------------------------------------------------------------

inline void write_csv(std::ostream& out, const std::vector<ResultRow>& rows) {
  out << kCsvHeader << '\n';
  for (const auto& r : rows) {
    out << r.experiment_id << ',' << r.policy << ',' << r.grid << ',' << r.K << ',' << r.M << ','
        << r.T << ',' << format_double(r.gamma) << ',' << r.rep << ',' << r.seed << ','
        << format_double(r.regret) << '\n';
  }
}

inline nlohmann::ordered_json summary_json(const ExperimentResult& result) {
  using nlohmann::ordered_json;
  ordered_json doc;
  doc["metadata"] = {{"experiment_id", result.experiment_id},
                     {"version", std::string(kVersion)},
                     {"sampler", std::string(RewardStream::kSamplerId)},
                     {"base_seed", result.base_seed}};
  ordered_json summaries = ordered_json::array();
  for (const auto& s : result.summaries) {
    summaries.push_back({{"experiment_id", s.experiment_id},
                         {"policy", s.policy},
                         {"grid", s.grid},
                         {"sweep_point", s.sweep_point},
                         {"K", s.K},
                         {"M", s.M},
                         {"T", s.T},
                         {"gamma", s.gamma},
                         {"effective_batches", s.effective_batches},
                         {"grid_times", s.grid_times},
                         {"mean", s.mean},
                         {"stderr", s.standard_error},
                         {"R", s.replications}});
  }
  doc["summaries"] = std::move(summaries);
  ordered_json skipped = ordered_json::array();
  for (const auto& s : result.skipped) {
    skipped.push_back({{"policy", s.policy},
                       {"grid", s.grid},
                       {"sweep_point", s.sweep_point},
                       {"reason", s.reason}});
  }
  doc["skipped"] = std::move(skipped);
  return doc;
}

namespace detail {

inline std::ofstream open_for_writing(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path + " for writing");
  return out;
}

inline void finish_writing(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) throw IoError("failed writing " + path);
}

}  // namespace detail

inline void emit_csv(const std::vector<ResultRow>& rows, const std::string& path) {
  auto out = detail::open_for_writing(path);
  write_csv(out, rows);
  detail::finish_writing(out, path);
}

inline void emit_summary_json(const ExperimentResult& result, const std::string& path) {
  auto out = detail::open_for_writing(path);
  out << summary_json(result).dump(2) << '\n';
  detail::finish_writing(out, path);
}

/// "runs/fig1a.csv" -> "runs/fig1a.json"; other names get ".json" appended.
inline std::string summary_path_for(const std::string& csv_path) {
  constexpr std::string_view kExt = ".csv";
  if (csv_path.size() > kExt.size() &&
      csv_path.compare(csv_path.size() - kExt.size(), kExt.size(), kExt) == 0) {
    return csv_path.substr(0, csv_path.size() - kExt.size()) + ".json";
  }
  return csv_path + ".json";
}

// ---------------------------------------------------------------------------
// Bounds report
// ---------------------------------------------------------------------------

struct BoundsSuiteConfig {
  std::size_t trials = 10000;
  std::uint64_t seed = 20190501;
  std::size_t floor_replications = 2000;
  std::size_t threads = 1;
  double delta = 0.1;
  std::vector<std::size_t> floor_grid{10, 100};
  // Checkers under test; tests swap in broken ones.
  TvKlChecker tv_kl = check_tv_kl;
  MajorizationChecker majorization = check_majorization;
  TreeTestingChecker tree_testing = check_tree_testing_bound;
};

struct BoundsReport {
  std::vector<SuiteResult> suites;
  std::vector<RegretFloorReport> floors;
  bool pass() const {
    for (const auto& s : suites) {
      if (!s.pass()) return false;
    }
    for (const auto& f : floors) {
      if (!f.pass) return false;
    }
    return true;
  }
};

/// Three inequality suites, then the regret floor for base, ucb1 and
/// uniform on the K = 3 star family and for etc on the K = 2 one.
inline BoundsReport run_bounds_suite(const BoundsSuiteConfig& cfg) {
  if (cfg.trials == 0) throw ConfigError("bounds suite needs at least one trial");
  if (cfg.floor_replications < 2) throw ConfigError("regret floor needs at least 2 replications");
  BoundsReport report;
  report.suites.push_back(run_tv_kl_trials(cfg.trials, hash_combine(cfg.seed, 1), cfg.tv_kl));
  report.suites.push_back(
      run_majorization_trials(cfg.trials, hash_combine(cfg.seed, 2), cfg.majorization));
  report.suites.push_back(
      run_tree_testing_trials(cfg.trials, hash_combine(cfg.seed, 3), cfg.tree_testing));

  for (PolicyKind kind : {PolicyKind::base, PolicyKind::ucb1, PolicyKind::etc, PolicyKind::uniform}) {
    const std::size_t K = kind == PolicyKind::etc ? 2 : 3;
    const Grid grid = validate_grid(cfg.floor_grid, cfg.floor_grid.back(), K);
    const auto family = make_static_star_family(K, cfg.delta);
    const auto policy = make_policy(kind, K, grid.horizon(), 1.0);
    report.floors.push_back(regret_floor_check(policy, std::string(to_string(kind)), family, grid,
                                               cfg.floor_replications,
                                               hash_combine(cfg.seed, hash_string(to_string(kind))),
                                               cfg.threads));
  }
  return report;
}

inline nlohmann::ordered_json witness_json(const Witness& w) {
  return {{"lemma", w.lemma}, {"inputs_digest", w.inputs_digest}, {"lhs", w.lhs},
          {"rhs", w.rhs},     {"slack", w.slack},                 {"pass", w.pass},
          {"chain", w.chain}};
}

inline nlohmann::ordered_json bounds_report_json(const BoundsReport& report,
                                                 const BoundsSuiteConfig& cfg) {
  using nlohmann::ordered_json;
  ordered_json doc;
  doc["metadata"] = {{"version", std::string(kVersion)},
                     {"sampler", std::string(RewardStream::kSamplerId)},
                     {"seed", cfg.seed},
                     {"trials", cfg.trials},
                     {"floor_replications", cfg.floor_replications}};
  ordered_json suites = ordered_json::array();
  for (const auto& s : report.suites) {
    ordered_json failures = ordered_json::array();
    for (const auto& w : s.failures) failures.push_back(witness_json(w));
    suites.push_back({{"name", s.name},
                      {"trials", s.trials},
                      {"violations", s.violations},
                      {"pass", s.pass()},
                      {"failures", std::move(failures)}});
  }
  doc["suites"] = std::move(suites);
  ordered_json floors = ordered_json::array();
  for (const auto& f : report.floors) {
    ordered_json means = ordered_json::array();
    for (std::size_t i = 0; i < f.per_instance.size(); ++i) {
      means.push_back({{"instance", f.labels[i]},
                       {"mean", f.per_instance[i].mean},
                       {"stderr", f.per_instance[i].standard_error}});
    }
    floors.push_back({{"policy", f.policy},
                      {"bound", f.bound},
                      {"max_mean", f.max_mean},
                      {"max_stderr", f.max_standard_error},
                      {"pass", f.pass},
                      {"instances", std::move(means)}});
  }
  doc["regret_floor"] = std::move(floors);
  doc["pass"] = report.pass();
  return doc;
}

}  // namespace batched
