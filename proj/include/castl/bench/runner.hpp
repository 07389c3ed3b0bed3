#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "castl/bench/generator.hpp"
#include "castl/planner/planner.hpp"
#include "json.hpp"

namespace castl::bench {

struct BenchConfig {
  std::vector<Domain> domains{Domain::HC, Domain::KT, Domain::BW};
  std::vector<int> tiers{1, 2};
  std::vector<Profile> profiles = all_profiles();
  int trials = 11;
  std::uint64_t seed = 0;
  planner::EncodingConfig encoding;
  /// "none" plans symbolically; "auto" grounds HC moves on the grid and leaves KT and BW
  /// to the stub backend; any make_backend() spec applies to every domain.
  std::string motion = "none";
  bool timing = false;  // wall-clock fields make reports differ between runs
  int jobs = 1;
  std::string instances_dir;  // when set, every generated instance is written below it
};

struct TrialResult {
  std::string instance;
  std::uint64_t seed = 0;
  std::string status;  // plan, infeasible, timeout, error
  bool valid = false;  // plan found and accepted by the validator
  int makespan = -1;
  int optimal_makespan = -1;
  int iterations = 0;  // candidate plans (1 without motion grounding)
  int motion_failures = 0;
  std::string violation;  // first validator violation, if any
  std::string error;
  std::uint64_t conflicts = 0;
  std::optional<double> solve_seconds;
};

struct CellSummary {
  Domain domain = Domain::BW;
  int tier = 1;
  Profile profile = Profile::No;
  int trials = 0;
  int successes = 0;
  int optimal = 0;  // successes whose makespan equals the oracle optimum
  double success_rate = 0;
  double mean_makespan = 0;          // over successes
  double mean_optimal_makespan = 0;  // over all trials with a known optimum
  double mean_iterations = 0;
  std::optional<double> mean_solve_seconds;
  std::vector<TrialResult> results;
};

struct BenchReport {
  BenchConfig config;
  std::vector<CellSummary> cells;
  int total_trials = 0;
  int total_successes = 0;
};

using ProgressFn = std::function<void(const TrialResult&)>;

/// Deterministic per config.seed as long as no trial hits the solver timeout.
BenchReport run_bench(const BenchConfig& config, const ProgressFn& progress = {});

/// Runs a single generated instance the way run_bench does.
TrialResult run_trial(const Instance& inst, const BenchConfig& config);

nlohmann::json report_to_json(const BenchReport& report);
BenchReport report_from_json(const nlohmann::json& j);

/// Seed of trial `i` of a (domain, tier, profile) cell.
std::uint64_t trial_seed(std::uint64_t base, int trial);

}  // namespace castl::bench
