#include "sparsetd/tabular.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <limits>

#include "sparsetd/csv.hpp"
#include "sparsetd/errors.hpp"

namespace sparsetd {

long QTable::n_states() const {
  long n = 1;
  for (const auto& g : grids) n *= g.units();
  return n;
}

int QTable::greedy_action(long s) const {
  const double* row = values.data() + static_cast<size_t>(s) * n_actions;
  int best = 0;
  for (int a = 1; a < n_actions; ++a) {
    if (row[a] > row[best]) best = a;
  }
  return best;
}

QTable make_qtable(std::vector<GridSpec> grids, int n_actions) {
  QTable t;
  t.grids = std::move(grids);
  t.n_actions = n_actions;
  t.values.assign(static_cast<size_t>(t.n_states()) * n_actions, 0.0);
  return t;
}

long discretize(const EnvState& s, std::span<const GridSpec> grids) {
  if (static_cast<size_t>(s.dim) != grids.size()) {
    throw DimensionMismatch("discretize: state dim " + std::to_string(s.dim) +
                            " vs " + std::to_string(grids.size()) + " grids");
  }
  long index = 0;
  for (size_t d = 0; d < grids.size(); ++d) {
    const GridSpec& g = grids[d];
    const double value = s[static_cast<int>(d)];
    if (value < g.lo - 1e-9 || value > g.hi + 1e-9) {
      throw OutOfRange("discretize: value " + std::to_string(value) +
                       " outside grid " + std::to_string(d));
    }
    double v = (value - g.lo) / (g.hi - g.lo) * g.n_div;
    long i = std::lround(v);
    i = std::min<long>(g.n_div, std::max<long>(0, i));
    index = index * g.units() + i;
  }
  return index;
}

EnvState lattice_point(long index, std::span<const GridSpec> grids) {
  EnvState s;
  s.dim = static_cast<int>(grids.size());
  for (size_t d = grids.size(); d-- > 0;) {
    const GridSpec& g = grids[d];
    const long i = index % g.units();
    index /= g.units();
    s.v[d] = g.lo + (g.hi - g.lo) * static_cast<double>(i) / g.n_div;
  }
  return s;
}

QTable tabular_sarsa(const Environment& env, std::vector<GridSpec> grids,
                     ScheduleState schedule, const StopSpec& stop, std::uint64_t seed,
                     const QTable* init, const TabularOptions& opts) {
  QTable table = init != nullptr ? *init : make_qtable(grids, env.num_actions());
  if (init != nullptr) table.grids = grids;
  std::mt19937_64 rng(seed);

  std::deque<std::pair<double, bool>> window;
  double window_delta_sum = 0.0;
  int window_goal_count = 0;

  auto greedy_or_explore = [&](long idx, double eps) {
    if (eps > 0.0) {
      std::uniform_real_distribution<double> u(0.0, 1.0);
      if (u(rng) < eps) {
        std::uniform_int_distribution<int> pick(0, table.n_actions - 1);
        return pick(rng);
      }
    }
    return table.greedy_action(idx);
  };

  for (int ep = 0; ep < stop.max_episodes; ++ep) {
    EnvState s;
    if (opts.cycle_starts != nullptr && !opts.cycle_starts->empty()) {
      s = (*opts.cycle_starts)[static_cast<size_t>(ep) % opts.cycle_starts->size()];
    } else {
      s = env.reset(rng);
    }
    if (opts.snap_start_to_grid) s = lattice_point(discretize(s, grids), grids);
    long idx = discretize(s, grids);
    int a = greedy_or_explore(idx, schedule.epsilon);

    EpisodeStats stats;
    double abs_delta_sum = 0.0;
    for (int t = 0; t < stop.max_steps; ++t) {
      const StepResult sr = env.step(s, a);
      ++stats.steps;
      stats.total_reward += sr.reward;
      double delta;
      long idx_next = 0;
      int a_next = 0;
      if (sr.terminal) {
        delta = sr.reward - table.at(idx, a);
      } else {
        idx_next = discretize(sr.next, grids);
        a_next = greedy_or_explore(idx_next, schedule.epsilon);
        delta = sr.reward + schedule.gamma * table.at(idx_next, a_next) -
                table.at(idx, a);
      }
      table.at(idx, a) += schedule.alpha * delta;
      abs_delta_sum += std::abs(delta);
      if (sr.terminal) {
        stats.reached_goal = true;
        break;
      }
      s = sr.next;
      idx = idx_next;
      a = a_next;
    }
    stats.mean_abs_delta = stats.steps > 0 ? abs_delta_sum / stats.steps : 0.0;
    anneal_epsilon(schedule, stats);

    window.emplace_back(stats.mean_abs_delta, stats.reached_goal);
    window_delta_sum += stats.mean_abs_delta;
    window_goal_count += stats.reached_goal ? 1 : 0;
    if (static_cast<int>(window.size()) > stop.window) {
      window_delta_sum -= window.front().first;
      window_goal_count -= window.front().second ? 1 : 0;
      window.pop_front();
    }
    if (static_cast<int>(window.size()) == stop.window) {
      const bool goals_ok =
          !stop.require_consistent_goal || window_goal_count == stop.window;
      if (goals_ok && window_delta_sum / stop.window < stop.delta_stop) break;
    }
  }
  return table;
}

std::vector<double> value_iteration(const ExplicitMdp& mdp, double tol) {
  if (mdp.n_states < 1 || mdp.n_actions < 1) {
    throw InvalidValue("value_iteration: empty MDP");
  }
  if (mdp.gamma == 1.0 &&
      std::none_of(mdp.terminal.begin(), mdp.terminal.end(),
                   [](std::uint8_t t) { return t != 0; })) {
    throw NonEpisodic("value_iteration: gamma = 1 with no absorbing state");
  }
  const size_t n = static_cast<size_t>(mdp.n_states) * mdp.n_actions;
  std::vector<double> q(n, 0.0);
  std::vector<double> q_next(n, 0.0);
  const int max_iters = 1000000;
  for (int iter = 0; iter < max_iters; ++iter) {
    double residual = 0.0;
    for (int s = 0; s < mdp.n_states; ++s) {
      for (int a = 0; a < mdp.n_actions; ++a) {
        const size_t sa = static_cast<size_t>(s) * mdp.n_actions + a;
        double target = mdp.reward[sa];
        if (mdp.terminal[static_cast<size_t>(s)]) {
          target = 0.0;  // absorbing
        } else {
          const int t = mdp.next[sa];
          if (!mdp.terminal[static_cast<size_t>(t)]) {
            double best = q[static_cast<size_t>(t) * mdp.n_actions];
            for (int b = 1; b < mdp.n_actions; ++b) {
              best = std::max(best, q[static_cast<size_t>(t) * mdp.n_actions + b]);
            }
            target += mdp.gamma * best;
          }
        }
        residual = std::max(residual, std::abs(target - q[sa]));
        q_next[sa] = target;
      }
    }
    q.swap(q_next);
    if (residual < tol) return q;
  }
  throw NonEpisodic("value_iteration: no convergence (unreachable absorbing state?)");
}

DeviationMetrics deviation_metrics(std::span<const double> agent_returns,
                                   std::span<const std::uint8_t> agent_reached,
                                   std::span<const double> optimal_returns) {
  if (agent_returns.size() != optimal_returns.size() ||
      agent_returns.size() != agent_reached.size()) {
    throw DimensionMismatch("deviation_metrics: start lists differ in length");
  }
  DeviationMetrics m;
  double sq_sum = 0.0;
  size_t reached = 0;
  for (size_t i = 0; i < agent_returns.size(); ++i) {
    if (agent_reached[i]) {
      const double d = agent_returns[i] - optimal_returns[i];
      sq_sum += d * d;
      ++reached;
    }
  }
  if (!agent_returns.empty()) {
    m.goal_rate = static_cast<double>(reached) / agent_returns.size();
  }
  if (reached == 0) {
    throw NoSuccessfulEpisodes("deviation_metrics: no episode reached the goal");
  }
  m.msd = sq_sum / static_cast<double>(reached);
  return m;
}

TableRollout rollout_table(const QTable& table, const Environment& env,
                           std::span<const EnvState> starts, int max_steps) {
  TableRollout out;
  out.returns.reserve(starts.size());
  out.steps.reserve(starts.size());
  out.reached.reserve(starts.size());
  for (const EnvState& start : starts) {
    EnvState s = start;
    double total = 0.0;
    int steps = 0;
    bool reached = false;
    for (int t = 0; t < max_steps; ++t) {
      const int a = table.greedy_action(discretize(s, table.grids));
      const StepResult sr = env.step(s, a);
      total += sr.reward;
      ++steps;
      if (sr.terminal) {
        reached = true;
        break;
      }
      s = sr.next;
    }
    out.returns.push_back(total);
    out.steps.push_back(steps);
    out.reached.push_back(reached ? 1 : 0);
  }
  return out;
}

QTable puddle_reference_table() {
  PuddleWorld env;
  const std::vector<GridSpec> grids = env.grids(20, 0.0);

  // The reference agent plays the same continuous task as the networks:
  // episodes reset to uniform continuous states and the table sees them
  // through nearest-cell discretization. Values therefore average the
  // within-cell reward variation, which is the regime the networks are
  // scored against. The schedule mirrors the task's network schedule with a
  // table-appropriate learning rate.
  ScheduleState schedule;
  schedule.epsilon = 0.1;
  schedule.epsilon_floor = 0.0;
  schedule.anneal_mode = AnnealMode::OnGoalAfterDeltaThreshold;
  schedule.anneal_factor = 0.999;
  schedule.delta_gate = 0.2;
  schedule.alpha = 0.1;
  schedule.gamma = 1.0;

  StopSpec stop;
  stop.delta_stop = 0.0;  // run the full budget
  stop.max_episodes = 300000;
  stop.max_steps = 80;
  stop.window = 100;

  return tabular_sarsa(env, grids, schedule, stop, 0xC0FFEEULL);
}

void export_qtable_csv(const QTable& table, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("export_qtable_csv: cannot open '" + path + "'");
  const size_t dims = table.grids.size();
  for (size_t d = 0; d < dims; ++d) out << "x" << d << ",";
  for (int a = 0; a < table.n_actions; ++a) {
    out << "q" << a << (a + 1 < table.n_actions ? "," : "\n");
  }
  const long n = table.n_states();
  for (long s = 0; s < n; ++s) {
    const EnvState p = lattice_point(s, table.grids);
    for (size_t d = 0; d < dims; ++d) out << csv_double(p[static_cast<int>(d)]) << ",";
    for (int a = 0; a < table.n_actions; ++a) {
      out << csv_double(table.at(s, a)) << (a + 1 < table.n_actions ? "," : "\n");
    }
  }
}

}  // namespace sparsetd
