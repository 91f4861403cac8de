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

// Acceptance gate. Prints one PASS/FAIL line per criterion and exits nonzero
// if any criterion fails or overruns its time budget.
//
//   acceptance                 # every criterion
//   acceptance rate_check      # one criterion by id
//   acceptance --list

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "batched_bandit/batched_bandit.hpp"

namespace batched {
namespace {

// Pinned tolerances and sizes.
constexpr std::size_t kInvariantEpisodes = 1000;
constexpr std::size_t kGoodEventReps = 2000;
constexpr double kGoodEventMaxRate = 0.01;
constexpr std::size_t kOracleTrials = 10000;
constexpr double kOracleSlack = 1e-12;
constexpr std::size_t kFloorReps = 2000;
constexpr double kFloorStderrs = 3.0;
constexpr double kOrderingStderrs = 2.0;
constexpr double kUcbFactor = 2.0;
constexpr std::size_t kRateReps = 500;
constexpr double kRateSlopeLo = 0.52;
constexpr double kRateSlopeHi = 0.82;
constexpr std::size_t kRateGapPoints = 15;
constexpr double kProbeConstant = 1.0 / 8.0;
constexpr std::uint64_t kSeed = 20190501;

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  std::string id;
  double budget_seconds;
  std::function<Outcome()> run;
};

std::string Fmt(double x, int digits = 4) {
  std::ostringstream out;
  out.precision(digits);
  out << x;
  return out.str();
}

std::string Join(const std::vector<std::size_t>& v) {
  std::string s = "{";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + std::to_string(v[i]);
  return s + "}";
}

// t^den <= T^num, exact in 128 bits for the sizes used here.
bool PowLeq(std::size_t t, unsigned den, std::size_t T, unsigned num) {
  unsigned __int128 lhs = 1, rhs = 1;
  for (unsigned i = 0; i < den; ++i) lhs *= t;
  for (unsigned i = 0; i < num; ++i) rhs *= T;
  return lhs <= rhs;
}

Outcome GridClosedForms() {
  struct Case {
    GridFamily family;
    std::size_t T, M, K;
    std::vector<std::size_t> expected;
  };
  // floor(50000^{6/7}) = 10658: 10658^7 < 50000^6 < 10659^7.
  const std::vector<Case> cases = {
      {GridFamily::minimax, 100, 2, 2, {21, 100}},
      {GridFamily::minimax, 50000, 3, 3, {484, 10658, 50000}},
      {GridFamily::geometric, 1000, 3, 2, {10, 100, 1000}},
      {GridFamily::arithmetic, 100, 4, 2, {25, 50, 75, 100}},
  };
  Outcome out{true, ""};
  for (const auto& c : cases) {
    const auto got = make_grid(c.family, c.T, c.M, c.K).times;
    if (got != c.expected) {
      out.pass = false;
      out.detail += std::string(to_string(c.family)) + "(" + std::to_string(c.T) + "," +
                    std::to_string(c.M) + ") = " + Join(got) + " expected " + Join(c.expected) + "; ";
    }
  }
  // Independent check of the middle minimax endpoint around the listed 10722.
  const bool floor_ok = PowLeq(10658, 7, 50000, 6) && !PowLeq(10659, 7, 50000, 6);
  const bool listed_too_big = !PowLeq(10722, 7, 50000, 6);
  out.pass = out.pass && floor_ok;
  if (out.pass) out.detail = "4 grids exact";
  if (listed_too_big) out.detail += "; note: 10722 exceeds 50000^{6/7}, so the closed form gives 10658";
  return out;
}

Outcome BaseInvariants() {
  const auto cfg = preset_fig1a();
  const BanditInstance inst = cfg.instance_for(cfg.K);
  const Grid grid = make_minimax_grid(cfg.T, cfg.M, cfg.K);
  std::size_t batches = 0, violations = 0;
  double worst_ratio = 0.0;
  for (std::size_t e = 0; e < kInvariantEpisodes; ++e) {
    BasePolicy policy(BaseConfig{cfg.gamma, cfg.K, cfg.T, {}});
    RewardStream source(inst, derive_seed(kSeed, e));
    run_episode_with_source(policy, grid, inst, source,
                            [&](const BatchContext& ctx, const PolicyState& s, const BatchPlan&) {
                              ++batches;
                              bool ok = !s.active.empty();
                              if (ok && !ctx.is_last()) {
                                const auto tau = s.counted_pulls[s.active.front()];
                                for (auto arm : s.active) ok = ok && s.counted_pulls[arm] == tau;
                                for (std::size_t arm = 0; arm < s.num_arms(); ++arm) {
                                  if (s.total_pulls[arm] == 0) continue;
                                  const double ratio = double(s.total_pulls[arm]) / double(s.counted_pulls[arm]);
                                  worst_ratio = std::max(worst_ratio, ratio);
                                  ok = ok && ratio <= 2.0;
                                }
                              }
                              if (!ok) ++violations;
                            });
  }
  return {violations == 0, std::to_string(batches) + " batches, " + std::to_string(violations) +
                               " violations, worst total/counted " + Fmt(worst_ratio, 6)};
}

Outcome GoodEventRate() {
  const std::size_t K = 3, T = 2000, M = 3;
  const BanditInstance inst({0.6, 0.5, 0.5});
  const Grid grid = make_minimax_grid(T, M, K);
  const AnyPolicy policy = BasePolicy(BaseConfig{12.0, K, T, {}});
  const auto lost = run_replications(policy, grid, inst, kGoodEventReps, hash_combine(kSeed, 3), 1,
                                     [&](const RunTrace& t) {
                                       for (const auto& e : t.eliminations) {
                                         if (e.arm == inst.optimal_arm()) return 1;
                                       }
                                       return 0;
                                     });
  std::size_t count = 0;
  for (int x : lost) count += static_cast<std::size_t>(x);
  const double rate = double(count) / double(kGoodEventReps);
  return {rate <= kGoodEventMaxRate, "optimal arm eliminated in " + std::to_string(count) + "/" +
                                         std::to_string(kGoodEventReps) + " (rate " + Fmt(rate) +
                                         ", limit " + Fmt(kGoodEventMaxRate) + ")"};
}

Outcome InequalityOracles() {
  Outcome out{true, ""};
  for (const auto& r : {run_tv_kl_trials(kOracleTrials, kSeed), run_majorization_trials(kOracleTrials, kSeed),
                        run_tree_testing_trials(kOracleTrials, kSeed)}) {
    bool slack_ok = true;
    for (const auto& w : r.failures) slack_ok = slack_ok && w.slack == kOracleSlack;
    out.pass = out.pass && r.pass() && r.trials == kOracleTrials && slack_ok;
    out.detail += r.name + " " + std::to_string(r.violations) + "/" + std::to_string(r.trials) + "; ";
  }
  return out;
}

Outcome RegretFloor() {
  Outcome out{true, ""};
  for (PolicyKind kind : {PolicyKind::base, PolicyKind::ucb1, PolicyKind::etc, PolicyKind::uniform}) {
    const std::size_t K = kind == PolicyKind::etc ? 2 : 3;
    const Grid grid = validate_grid({10, 100}, 100, K);
    const auto fam = make_static_star_family(K, 0.1);
    const auto r = regret_floor_check(make_policy(kind, K, 100, 1.0), std::string(to_string(kind)), fam,
                                      grid, kFloorReps, hash_combine(kSeed, static_cast<std::uint64_t>(kind)));
    const bool pass = r.max_mean >= r.bound - kFloorStderrs * r.max_standard_error;
    out.pass = out.pass && pass && r.pass;
    out.detail += r.policy + " " + Fmt(r.max_mean) + ">=" + Fmt(r.bound) + "; ";
  }
  return out;
}

// Shared by the Figure-1 ordering and determinism criteria.
const ExperimentResult& Fig1a() {
  static const ExperimentResult result = run_experiment(preset_fig1a());
  return result;
}

Outcome OrderingMinimaxVsArithmetic() {
  const auto* mm = Fig1a().find("base", "minimax", "M=3");
  const auto* ar = Fig1a().find("base", "arithmetic", "M=3");
  const double hi = mm->mean + kOrderingStderrs * mm->standard_error;
  const double lo = ar->mean - kOrderingStderrs * ar->standard_error;
  return {mm->mean <= ar->mean && hi < lo,
          "minimax " + Fmt(mm->mean) + " +- " + Fmt(mm->standard_error) + " vs arithmetic " +
              Fmt(ar->mean) + " +- " + Fmt(ar->standard_error)};
}

Outcome OrderingM4VsUcb1() {
  const auto* mm = Fig1a().find("base", "minimax", "M=4");
  const auto* ucb = Fig1a().find("ucb1", "online", "reference");
  return {mm->mean <= kUcbFactor * ucb->mean,
          "minimax M=4 " + Fmt(mm->mean) + " +- " + Fmt(mm->standard_error) + " vs 2 x ucb1 " +
              Fmt(kUcbFactor * ucb->mean) + " (ucb1 " + Fmt(ucb->mean) + " +- " +
              Fmt(ucb->standard_error) + ")"};
}

Outcome OrderingBaseVsEtc() {
  ExperimentConfig cfg = preset_fig1d();
  cfg.axis = SweepAxis::none;
  cfg.sweep_values.clear();
  const auto result = run_experiment(cfg);
  const auto* base = result.find("base", "minimax", "none");
  const auto* etc = result.find("etc", "minimax", "none");
  return {base->mean <= etc->mean, "K=2 base " + Fmt(base->mean) + " +- " + Fmt(base->standard_error) +
                                       " vs etc " + Fmt(etc->mean) + " +- " + Fmt(etc->standard_error)};
}

double LeastSquaresSlope(const std::vector<double>& x, const std::vector<double>& y) {
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) mx += x[i], my += y[i];
  mx /= x.size();
  my /= y.size();
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

// Worst-case mean regret over two-armed instances (gap, 0) on a fixed
// log-spaced gap grid in [0.01, sqrt(2)], per horizon. The slope of the
// single default instance is printed alongside.
Outcome RateCheck() {
  const std::size_t K = 2, M = 2;
  const std::vector<std::size_t> horizons{1000, 3000, 10000, 30000, 100000};
  std::vector<double> gaps;
  const double lo = 0.01, hi = std::sqrt(2.0);
  for (std::size_t i = 0; i < kRateGapPoints; ++i) {
    gaps.push_back(lo * std::pow(hi / lo, double(i) / double(kRateGapPoints - 1)));
  }
  std::vector<double> log_t, log_worst, log_fixed;
  std::string detail;
  for (std::size_t T : horizons) {
    const Grid grid = make_minimax_grid(T, M, K);
    const AnyPolicy policy = BasePolicy(BaseConfig{1.0, K, T, {}});
    const std::uint64_t seed = hash_combine(kSeed, T);
    double worst = 0.0, worst_gap = 0.0;
    for (double g : gaps) {
      const double m = mean_regret(policy, grid, BanditInstance({g, 0.0}), kRateReps, seed).mean;
      if (m > worst) worst = m, worst_gap = g;
    }
    const double fixed = mean_regret(policy, grid, BanditInstance({0.6, 0.5}), kRateReps, seed).mean;
    log_t.push_back(std::log(double(T)));
    log_worst.push_back(std::log(worst));
    log_fixed.push_back(std::log(fixed));
    detail += "T=" + std::to_string(T) + ":" + Fmt(worst) + "@" + Fmt(worst_gap, 3) + " ";
  }
  const double slope = LeastSquaresSlope(log_t, log_worst);
  const double fixed_slope = LeastSquaresSlope(log_t, log_fixed);
  return {slope >= kRateSlopeLo && slope <= kRateSlopeHi,
          "worst-case slope " + Fmt(slope) + " in [" + Fmt(kRateSlopeLo) + ", " + Fmt(kRateSlopeHi) +
              "]; gap-0.1 instance slope " + Fmt(fixed_slope) + "; " + detail};
}

Outcome RateProbe() {
  std::size_t checked = 0, failed = 0;
  double worst = INFINITY;
  for (std::size_t K : {2u, 5u, 10u}) {
    for (std::size_t M = 1; M <= 4; ++M) {
      for (std::size_t T : {1000u, 10000u, 100000u}) {
        const double rate = std::pow(double(T), 1.0 / (2.0 - std::ldexp(1.0, 1 - int(M))));
        const double target = kProbeConstant * std::sqrt(double(K)) * rate;
        const double value = static_lb_optimized(make_minimax_grid(T, M, K), K).minimax;
        worst = std::min(worst, value / target);
        ++checked;
        if (value < target) ++failed;
      }
    }
  }
  return {failed == 0, std::to_string(checked) + " configurations, min value/target " + Fmt(worst)};
}

Outcome Determinism() {
  const auto csv = [](const ExperimentResult& r) {
    std::ostringstream out;
    write_csv(out, r.rows);
    return out.str();
  };
  const std::string first = csv(Fig1a());
  const std::string first_json = summary_json(Fig1a()).dump(2);
  const auto again = run_experiment(preset_fig1a());
  auto cfg = preset_fig1a();
  cfg.threads = 4;
  const auto threaded = run_experiment(cfg);
  const bool same = first == csv(again) && first == csv(threaded) &&
                    first_json == summary_json(again).dump(2) &&
                    first_json == summary_json(threaded).dump(2);
  return {same, std::to_string(first.size()) + " CSV bytes, reruns with 1 and 4 threads " +
                    (same ? "identical" : "DIFFER")};
}

std::vector<Criterion> Criteria() {
  return {
      {"grid_closed_forms", 1, GridClosedForms},
      {"base_invariants", 120, BaseInvariants},
      {"good_event_rate", 300, GoodEventRate},
      {"inequality_oracles", 60, InequalityOracles},
      {"regret_floor", 300, RegretFloor},
      {"fig1_minimax_vs_arithmetic", 900, OrderingMinimaxVsArithmetic},
      {"fig1_m4_vs_ucb1", 900, OrderingM4VsUcb1},
      {"fig1_base_vs_etc", 900, OrderingBaseVsEtc},
      {"rate_check", 1200, RateCheck},
      {"rate_probe", 1, RateProbe},
      {"determinism", 900, Determinism},
  };
}

}  // namespace
}  // namespace batched

int main(int argc, char** argv) {
  using namespace batched;
  const auto criteria = Criteria();
  std::optional<std::string> only;
  if (argc > 1) {
    const std::string arg = argv[1];
    if (arg == "--list") {
      for (const auto& c : criteria) std::printf("%s\n", c.id.c_str());
      return 0;
    }
    only = arg;
  }
  bool all_pass = true;
  bool matched = false;
  for (const auto& c : criteria) {
    if (only && *only != c.id) continue;
    matched = true;
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_budget = secs <= c.budget_seconds;
    const bool pass = out.pass && in_budget;
    all_pass = all_pass && pass;
    std::printf("%s %-28s %8.2fs (budget %gs) %s%s\n", pass ? "PASS" : "FAIL", c.id.c_str(), secs,
                c.budget_seconds, out.detail.c_str(), in_budget ? "" : " [over budget]");
    std::fflush(stdout);
  }
  if (!matched) {
    std::fprintf(stderr, "unknown criterion %s\n", only->c_str());
    return 2;
  }
  return all_pass ? 0 : 1;
}
