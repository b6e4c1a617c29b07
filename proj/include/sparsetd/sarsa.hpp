#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "sparsetd/approximator.hpp"
#include "sparsetd/environments.hpp"

namespace sparsetd {

enum class AnnealMode { OnGoalAfterDeltaThreshold, PerEpisode };

const char* to_string(AnnealMode mode);
AnnealMode anneal_mode_from_string(const std::string& name);

// Exploration and learning-rate schedule carried across episodes.
struct ScheduleState {
  double epsilon = 0.1;
  double epsilon_floor = 0.0;
  AnnealMode anneal_mode = AnnealMode::OnGoalAfterDeltaThreshold;
  double anneal_factor = 0.999;  // multiplicative decay per anneal event
  double delta_gate = 0.2;       // episode mean-|delta| threshold opening annealing
  bool gate_open = false;
  double alpha = 0.005;
  double gamma = 1.0;
};

struct EpisodeStats {
  int steps = 0;
  double total_reward = 0.0;
  double mean_abs_delta = 0.0;
  bool reached_goal = false;
};

struct StopSpec {
  double delta_stop = 0.01;
  int max_episodes = 1000;
  int max_steps = 100;  // per-episode cap T
  int window = 100;     // trailing episodes examined by the stopping rule
  bool require_consistent_goal = true;
};

// epsilon-greedy: with probability epsilon a uniform draw over all actions
// (greedy included), otherwise the argmax with lowest-index tie-breaking.
// epsilon == 0 consumes no randomness.
int select_action(const Eigen::VectorXd& q_values, double epsilon,
                  std::mt19937_64& rng);

// Discounted sum of a reward sequence.
double compute_return(std::span<const double> rewards, double gamma);

// One on-policy TD episode. The bootstrap term is dropped on terminal
// transitions. With learning=false the weights are untouched and epsilon is
// forced to zero. A non-null start overrides the environment's reset.
EpisodeStats run_episode(const Environment& env, std::span<const GridSpec> grids,
                         ApproximatorParams& params, const ArchSpec& arch,
                         const ScheduleState& schedule, int max_steps,
                         std::mt19937_64& rng, bool learning,
                         const EnvState* start = nullptr);

void anneal_epsilon(ScheduleState& schedule, const EpisodeStats& stats);

enum class StopReason { Converged, EpisodeBudget, Diverged };
const char* to_string(StopReason reason);

struct EpisodeRow {
  double mean_abs_delta = 0.0;
  int steps = 0;
  double total_reward = 0.0;
  bool reached_goal = false;
  double epsilon = 0.0;  // value in effect during the episode
};

struct TestEpochRow {
  int epoch = 0;  // episodes completed when the test ran
  double mean_abs_delta = 0.0;
  double mean_steps = 0.0;
  double goal_rate = 0.0;
};

struct TrainConfig {
  ScheduleState schedule;
  StopSpec stop;
  int test_interval = 0;  // frozen-weight test epoch every N episodes; 0 = off
  int test_episodes = 20;
};

struct TrainResult {
  ApproximatorParams params;
  std::vector<EpisodeRow> curves;
  std::vector<TestEpochRow> tests;
  StopReason reason = StopReason::EpisodeBudget;
  int episodes = 0;
  ScheduleState final_schedule;
};

// Runs episodes with annealing until the trailing window satisfies the
// stopping rule (all episodes reached the goal when required, and the window
// mean of |delta| is below delta_stop) or the episode budget runs out.
// A divergent update ends the trial with StopReason::Diverged.
TrainResult train(const Environment& env, std::span<const GridSpec> grids,
                  const ArchSpec& arch, const TrainConfig& config,
                  std::uint64_t seed);

struct TestStats {
  std::vector<double> returns;  // accumulated (undiscounted) reward per start
  std::vector<int> steps;
  std::vector<std::uint8_t> reached;
  double goal_rate() const;
};

// Greedy, frozen-weight episode from each start.
TestStats evaluate(const Environment& env, std::span<const GridSpec> grids,
                   const ApproximatorParams& params, const ArchSpec& arch,
                   std::span<const EnvState> starts, int max_steps);

}  // namespace sparsetd
