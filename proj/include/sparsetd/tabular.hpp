#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sparsetd/encoding.hpp"
#include "sparsetd/environments.hpp"
#include "sparsetd/sarsa.hpp"

namespace sparsetd {

// Dense state-action value table over the product of per-dimension grids.
struct QTable {
  std::vector<GridSpec> grids;
  int n_actions = 0;
  std::vector<double> values;  // [n_states * n_actions], row-major by state

  long n_states() const;
  double at(long s, int a) const { return values[static_cast<size_t>(s) * n_actions + a]; }
  double& at(long s, int a) { return values[static_cast<size_t>(s) * n_actions + a]; }
  int greedy_action(long s) const;
};

QTable make_qtable(std::vector<GridSpec> grids, int n_actions);

// Nearest-grid-point index per dimension, flattened row-major (first
// dimension varies slowest).
long discretize(const EnvState& s, std::span<const GridSpec> grids);

// Coordinates of a flat index; inverse of discretize on lattice points.
EnvState lattice_point(long index, std::span<const GridSpec> grids);

struct TabularOptions {
  // Snap episode starts to the nearest lattice point. On tasks whose
  // dynamics keep lattice states on the lattice this makes the table exact.
  bool snap_start_to_grid = false;
  // When set, episode i starts from cycle_starts[i % size] instead of the
  // environment's reset, guaranteeing uniform start coverage.
  const std::vector<EnvState>* cycle_starts = nullptr;
};

// On-policy TD control with a look-up table in place of the network; shares
// the epsilon-greedy policy, annealing and stopping machinery with train().
// Values start at zero unless an initial table is supplied.
QTable tabular_sarsa(const Environment& env, std::vector<GridSpec> grids,
                     ScheduleState schedule, const StopSpec& stop, std::uint64_t seed,
                     const QTable* init = nullptr, const TabularOptions& opts = {});

// Explicit finite deterministic MDP for the value-iteration oracle.
struct ExplicitMdp {
  int n_states = 0;
  int n_actions = 0;
  double gamma = 1.0;
  std::vector<int> next;               // [s * n_actions + a]
  std::vector<double> reward;          // [s * n_actions + a]
  std::vector<std::uint8_t> terminal;  // absorbing states
};

// Bellman-optimal Q to sup-norm tolerance; layout [s * n_actions + a].
std::vector<double> value_iteration(const ExplicitMdp& mdp, double tol = 1e-12);

struct DeviationMetrics {
  double msd = 0.0;       // over the agent's goal-reaching starts
  double goal_rate = 0.0; // over all starts
};

DeviationMetrics deviation_metrics(std::span<const double> agent_returns,
                                   std::span<const std::uint8_t> agent_reached,
                                   std::span<const double> optimal_returns);

struct TableRollout {
  std::vector<double> returns;  // accumulated reward per start
  std::vector<int> steps;
  std::vector<std::uint8_t> reached;
};

// Greedy rollout of the table from each start.
TableRollout rollout_table(const QTable& table, const Environment& env,
                           std::span<const EnvState> starts, int max_steps);

// Converged 21x21 look-up-table reference for Puddle-world, trained with
// lattice-snapped starts (the step size equals the grid spacing, so lattice
// trajectories are exact).
QTable puddle_reference_table();

// One row per state index: coordinates, then one value per action.
void export_qtable_csv(const QTable& table, const std::string& path);

}  // namespace sparsetd
