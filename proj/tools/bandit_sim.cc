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

// Command-line driver.
//
//   bandit_sim --policy base --grid minimax --K 3 --M 3 --T 50000 --out run.csv
//   bandit_sim --preset fig1a --out fig1a.csv     # also writes fig1a.json
//   bandit_sim --preset bounds --trials 10000     # exit 1 if any check fails

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "batched_bandit/batched_bandit.hpp"

namespace {

int run_bounds(const batched::BoundsSuiteConfig& cfg, const std::string& out) {
  const auto report = batched::run_bounds_suite(cfg);
  const std::string text = batched::bounds_report_json(report, cfg).dump(2) + "\n";
  if (out.empty()) {
    std::cout << text;
  } else {
    std::ofstream file(out, std::ios::binary | std::ios::trunc);
    if (!file) throw batched::IoError("cannot open " + out + " for writing");
    file << text;
  }
  for (const auto& s : report.suites) {
    std::cerr << s.name << ": " << s.violations << " violations in " << s.trials << " trials\n";
  }
  for (const auto& f : report.floors) {
    std::cerr << "regret floor " << f.policy << ": max mean " << f.max_mean << " vs bound "
              << f.bound << (f.pass ? " ok" : " FAILED") << "\n";
  }
  return report.pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Batched multi-armed bandit simulations"};

  std::string policy = "base";
  std::string grid = "minimax";
  std::size_t K = 3, M = 3, T = 50000;
  double gamma = 1.0;
  std::size_t reps = 200;
  std::uint64_t seed = 20190501;
  std::string preset;
  std::string out;
  std::size_t threads = 1;
  std::size_t trials = 10000;
  std::size_t floor_reps = 2000;

  app.add_option("--policy", policy, "base | ucb1 | etc | uniform")->capture_default_str();
  app.add_option("--grid", grid, "minimax | geometric | arithmetic")->capture_default_str();
  app.add_option("--K", K, "number of arms")->capture_default_str();
  app.add_option("--M", M, "number of batches")->capture_default_str();
  app.add_option("--T", T, "horizon")->capture_default_str();
  app.add_option("--gamma", gamma, "BaSE tuning parameter")->capture_default_str();
  app.add_option("--reps", reps, "replications per configuration")->capture_default_str();
  app.add_option("--seed", seed, "base seed")->capture_default_str();
  app.add_option("--preset", preset, "fig1a | fig1b | fig1c | fig1d | bounds")
      ->check(CLI::IsMember({"fig1a", "fig1b", "fig1c", "fig1d", "bounds"}));
  app.add_option("--out", out, "CSV path (the JSON summary is written next to it)");
  app.add_option("--threads", threads, "worker threads, 0 = all cores")->capture_default_str();
  app.add_option("--trials", trials, "trials per inequality suite (bounds)")->capture_default_str();
  app.add_option("--floor-reps", floor_reps, "replications per regret-floor instance (bounds)")
      ->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (preset == "bounds") {
      batched::BoundsSuiteConfig cfg;
      cfg.trials = trials;
      cfg.seed = seed;
      cfg.floor_replications = floor_reps;
      cfg.threads = threads;
      return run_bounds(cfg, out);
    }

    batched::ExperimentConfig cfg;
    if (!preset.empty()) {
      cfg = *batched::preset_by_name(preset);
    } else {
      const auto kind = batched::parse_policy_kind(policy);
      if (!kind) throw batched::ConfigError("unknown policy '" + policy + "'");
      const auto family = batched::parse_grid_family(grid);
      if (!family || *family == batched::GridFamily::explicit_times ||
          *family == batched::GridFamily::online) {
        throw batched::ConfigError("unknown grid '" + grid + "'");
      }
      cfg.experiment_id = "custom";
      cfg.series = {{*kind, *family}};
      cfg.K = K;
      cfg.M = M;
      cfg.T = T;
      cfg.gamma = gamma;
    }
    cfg.replications = reps;
    cfg.base_seed = seed;
    cfg.threads = threads;

    const auto result = batched::run_experiment(cfg);
    if (out.empty()) {
      batched::write_csv(std::cout, result.rows);
    } else {
      batched::emit_csv(result.rows, out);
      batched::emit_summary_json(result, batched::summary_path_for(out));
    }
    for (const auto& s : result.summaries) {
      std::cerr << s.policy << '-' << s.grid << ' ' << s.sweep_point << ": mean " << s.mean
                << " +- " << s.standard_error << '\n';
    }
    for (const auto& s : result.skipped) {
      std::cerr << "skipped " << s.policy << '-' << s.grid << ' ' << s.sweep_point << ": "
                << s.reason << '\n';
    }
    if (result.summaries.empty()) {
      std::cerr << "error: no configuration could be run\n";
      return 2;
    }
  } catch (const batched::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
