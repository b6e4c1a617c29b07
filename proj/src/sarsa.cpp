#include "sparsetd/sarsa.hpp"

#include <cmath>
#include <deque>
#include <string>

#include "sparsetd/errors.hpp"

namespace sparsetd {

const char* to_string(AnnealMode mode) {
  switch (mode) {
    case AnnealMode::OnGoalAfterDeltaThreshold: return "on_goal_after_delta";
    case AnnealMode::PerEpisode: return "per_episode";
  }
  return "?";
}

AnnealMode anneal_mode_from_string(const std::string& name) {
  if (name == "on_goal_after_delta") return AnnealMode::OnGoalAfterDeltaThreshold;
  if (name == "per_episode") return AnnealMode::PerEpisode;
  throw InvalidValue("unknown anneal mode '" + name + "'");
}

const char* to_string(StopReason reason) {
  switch (reason) {
    case StopReason::Converged: return "converged";
    case StopReason::EpisodeBudget: return "episode_budget";
    case StopReason::Diverged: return "diverged";
  }
  return "?";
}

int select_action(const Eigen::VectorXd& q_values, double epsilon,
                  std::mt19937_64& rng) {
  const int n = static_cast<int>(q_values.size());
  if (n == 0) throw EmptyActionSet("select_action: no actions");
  if (epsilon > 0.0) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    if (u(rng) < epsilon) {
      std::uniform_int_distribution<int> pick(0, n - 1);
      return pick(rng);
    }
  }
  int best = 0;
  for (int i = 1; i < n; ++i) {
    if (q_values(i) > q_values(best)) best = i;
  }
  return best;
}

double compute_return(std::span<const double> rewards, double gamma) {
  double g = 0.0;
  double discount = 1.0;
  for (double r : rewards) {
    g += discount * r;
    discount *= gamma;
  }
  return g;
}

EpisodeStats run_episode(const Environment& env, std::span<const GridSpec> grids,
                         ApproximatorParams& params, const ArchSpec& arch,
                         const ScheduleState& schedule, int max_steps,
                         std::mt19937_64& rng, bool learning, const EnvState* start) {
  const double eps = learning ? schedule.epsilon : 0.0;

  EnvState s = start != nullptr ? *start : env.reset(rng);
  Eigen::VectorXd x, x_next;
  ForwardTrace trace, next_trace;
  encode_state(std::span<const double>(s.v.data(), static_cast<size_t>(s.dim)),
               grids, x);
  forward(params, arch, x, trace);
  int a = select_action(trace.q, eps, rng);

  EpisodeStats stats;
  double abs_delta_sum = 0.0;
  for (int t = 0; t < max_steps; ++t) {
    // Both q(s,a) and q(s',a') in the TD error, and the gradient carried by
    // the trace, are evaluated under the current weights.
    forward(params, arch, x, trace);
    const StepResult sr = env.step(s, a);
    ++stats.steps;
    stats.total_reward += sr.reward;

    double delta;
    int a_next = 0;
    if (sr.terminal) {
      delta = sr.reward - trace.q(a);
    } else {
      encode_state(std::span<const double>(sr.next.v.data(),
                                           static_cast<size_t>(sr.next.dim)),
                   grids, x_next);
      forward(params, arch, x_next, next_trace);
      a_next = select_action(next_trace.q, eps, rng);
      delta = sr.reward + schedule.gamma * next_trace.q(a_next) - trace.q(a);
    }
    if (!std::isfinite(delta)) {
      throw NonFiniteResult("run_episode: non-finite TD error");
    }
    if (learning) {
      td_update(params, arch, trace, a, delta, schedule.alpha);
    }
    abs_delta_sum += std::abs(delta);
    if (sr.terminal) {
      stats.reached_goal = true;
      break;
    }
    s = sr.next;
    std::swap(x, x_next);
    a = a_next;
  }
  stats.mean_abs_delta = stats.steps > 0 ? abs_delta_sum / stats.steps : 0.0;
  return stats;
}

void anneal_epsilon(ScheduleState& schedule, const EpisodeStats& stats) {
  switch (schedule.anneal_mode) {
    case AnnealMode::PerEpisode:
      schedule.epsilon =
          std::max(schedule.epsilon_floor, schedule.epsilon * schedule.anneal_factor);
      break;
    case AnnealMode::OnGoalAfterDeltaThreshold:
      if (!schedule.gate_open && stats.mean_abs_delta < schedule.delta_gate) {
        schedule.gate_open = true;  // latches permanently
      }
      if (schedule.gate_open && stats.reached_goal) {
        schedule.epsilon = std::max(schedule.epsilon_floor,
                                    schedule.epsilon * schedule.anneal_factor);
      }
      break;
  }
}

namespace {

// Derives an independent stream for frozen-weight test epochs so they never
// perturb the training draws.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

TestEpochRow run_test_epoch(const Environment& env, std::span<const GridSpec> grids,
                            const ApproximatorParams& params, const ArchSpec& arch,
                            const ScheduleState& schedule, int max_steps,
                            int episodes, std::uint64_t seed, int epoch) {
  std::mt19937_64 rng(mix_seed(seed, static_cast<std::uint64_t>(epoch)));
  ApproximatorParams frozen = params;
  TestEpochRow row;
  row.epoch = epoch;
  double delta_sum = 0.0, step_sum = 0.0;
  int goals = 0;
  for (int e = 0; e < episodes; ++e) {
    const EpisodeStats stats = run_episode(env, grids, frozen, arch, schedule,
                                           max_steps, rng, /*learning=*/false);
    delta_sum += stats.mean_abs_delta;
    step_sum += stats.steps;
    goals += stats.reached_goal ? 1 : 0;
  }
  if (episodes > 0) {
    row.mean_abs_delta = delta_sum / episodes;
    row.mean_steps = step_sum / episodes;
    row.goal_rate = static_cast<double>(goals) / episodes;
  }
  return row;
}

}  // namespace

TrainResult train(const Environment& env, std::span<const GridSpec> grids,
                  const ArchSpec& arch, const TrainConfig& config,
                  std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  TrainResult result;
  result.params = init_params(arch, rng);
  ScheduleState schedule = config.schedule;

  // Trailing window of (mean |delta|, reached_goal).
  std::deque<std::pair<double, bool>> window;
  double window_delta_sum = 0.0;
  int window_goal_count = 0;

  result.reason = StopReason::EpisodeBudget;
  for (int ep = 0; ep < config.stop.max_episodes; ++ep) {
    EpisodeStats stats;
    const double eps_used = schedule.epsilon;
    try {
      stats = run_episode(env, grids, result.params, arch, schedule,
                          config.stop.max_steps, rng, /*learning=*/true);
    } catch (const NonFiniteResult&) {
      result.reason = StopReason::Diverged;
      break;
    }
    result.curves.push_back({stats.mean_abs_delta, stats.steps, stats.total_reward,
                             stats.reached_goal, eps_used});
    ++result.episodes;
    anneal_epsilon(schedule, stats);

    window.emplace_back(stats.mean_abs_delta, stats.reached_goal);
    window_delta_sum += stats.mean_abs_delta;
    window_goal_count += stats.reached_goal ? 1 : 0;
    if (static_cast<int>(window.size()) > config.stop.window) {
      window_delta_sum -= window.front().first;
      window_goal_count -= window.front().second ? 1 : 0;
      window.pop_front();
    }
    if (static_cast<int>(window.size()) == config.stop.window) {
      const bool goals_ok = !config.stop.require_consistent_goal ||
                            window_goal_count == config.stop.window;
      if (goals_ok && window_delta_sum / config.stop.window < config.stop.delta_stop) {
        result.reason = StopReason::Converged;
        break;
      }
    }
    if (config.test_interval > 0 && (ep + 1) % config.test_interval == 0) {
      result.tests.push_back(run_test_epoch(env, grids, result.params, arch, schedule,
                                            config.stop.max_steps,
                                            config.test_episodes, seed, ep + 1));
    }
  }
  result.final_schedule = schedule;
  return result;
}

double TestStats::goal_rate() const {
  if (reached.empty()) return 0.0;
  double n = 0;
  for (auto r : reached) n += r ? 1 : 0;
  return n / static_cast<double>(reached.size());
}

TestStats evaluate(const Environment& env, std::span<const GridSpec> grids,
                   const ApproximatorParams& params, const ArchSpec& arch,
                   std::span<const EnvState> starts, int max_steps) {
  ApproximatorParams frozen = params;
  ScheduleState greedy;
  greedy.epsilon = 0.0;
  std::mt19937_64 rng(0);  // never drawn: epsilon is zero and starts are fixed
  TestStats out;
  out.returns.reserve(starts.size());
  out.steps.reserve(starts.size());
  out.reached.reserve(starts.size());
  for (const EnvState& s : starts) {
    const EpisodeStats stats = run_episode(env, grids, frozen, arch, greedy, max_steps,
                                           rng, /*learning=*/false, &s);
    out.returns.push_back(stats.total_reward);
    out.steps.push_back(stats.steps);
    out.reached.push_back(stats.reached_goal ? 1 : 0);
  }
  return out;
}

}  // namespace sparsetd
