#pragma once

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "sparsetd/config.hpp"
#include "sparsetd/environments.hpp"
#include "sparsetd/tabular.hpp"

namespace sparsetd {

struct TrialOutcome {
  std::string arch;
  std::uint64_t seed = 0;
  StopReason reason = StopReason::EpisodeBudget;
  int episodes = 0;
  double goal_rate = 0.0;
  double msd = std::nan("");
  bool msd_valid = false;
  std::string dir;
};

struct ExperimentResult {
  std::vector<TrialOutcome> trials;
  int exit_code = 0;  // 1 when any trial diverged
};

// Trains every (architecture x seed) trial, evaluates the final greedy policy
// over the task's start set, compares against the look-up-table reference
// where one exists, and writes per-trial artifacts plus an aggregate summary.
// Trials run on a worker pool (SPARSETD_WORKERS overrides the size).
ExperimentResult run_experiment(const ExperimentConfig& cfg);

// resolution x resolution lattice of states; one row `x, y, value, action`
// per point with value = max_a q and action = argmax_a q. 2D tasks only.
void export_grids(const ApproximatorParams& params, const ArchSpec& arch,
                  const Environment& env, std::span<const GridSpec> grids,
                  int resolution, const std::string& csv_path);

// Evaluation start set for an environment: the 21x21 non-puddle lattice, 100
// pinned random starts for Mountain-car, or the single Acrobot rest state.
std::vector<EnvState> evaluation_starts(const Environment& env);

int worker_count();
std::string version_string();

}  // namespace sparsetd
