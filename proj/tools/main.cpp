// Command-line front end: train single or multi-seed experiments, evaluate
// checkpoints into value/policy grids, run the full architecture comparison,
// and build look-up-table references.

#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "sparsetd/checkpoint.hpp"
#include "sparsetd/config.hpp"
#include "sparsetd/csv.hpp"
#include "sparsetd/errors.hpp"
#include "sparsetd/experiment.hpp"
#include "sparsetd/tabular.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitDiverged = 1;
constexpr int kExitConfigError = 2;

sparsetd::ExperimentConfig resolve_config(const std::string& config_path,
                                          const std::string& preset) {
  if (!config_path.empty()) {
    sparsetd::ExperimentConfig cfg = sparsetd::load_config(config_path);
    if (!preset.empty()) {
      throw sparsetd::InvalidValue("pass either a config file or --preset, not both");
    }
    return cfg;
  }
  if (!preset.empty()) return sparsetd::preset_config(preset);
  throw sparsetd::InvalidValue("no config file and no --preset given");
}

void print_trials(const sparsetd::ExperimentResult& result) {
  for (const auto& t : result.trials) {
    std::printf("trial %-8s seed %-4llu %-15s episodes %-7d goal_rate %.4f msd %s\n",
                t.arch.c_str(), static_cast<unsigned long long>(t.seed),
                sparsetd::to_string(t.reason), t.episodes, t.goal_rate,
                t.msd_valid ? sparsetd::csv_double(t.msd).c_str() : "n/a");
  }
}

int run_with_config(sparsetd::ExperimentConfig cfg) {
  const sparsetd::ExperimentResult result = sparsetd::run_experiment(cfg);
  print_trials(result);
  std::printf("artifacts: %s\n", cfg.output_dir.c_str());
  return result.exit_code == 0 ? kExitOk : kExitDiverged;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SARSA with sparse-coding value-function approximators"};
  app.require_subcommand(1);

  // train
  std::string train_config, train_preset, train_arch, train_out;
  long long train_seed = -1;
  auto* train_cmd = app.add_subcommand("train", "train one experiment");
  train_cmd->add_option("config", train_config, "config file (key = value lines)");
  train_cmd->add_option("--preset", train_preset, "built-in preset name");
  train_cmd->add_option("--seed", train_seed, "override the seed list with one seed");
  train_cmd->add_option("--arch", train_arch, "linear|regular|kwta|all");
  train_cmd->add_option("--out", train_out, "output directory");

  // compare
  std::string cmp_config, cmp_preset, cmp_out;
  auto* cmp_cmd =
      app.add_subcommand("compare", "multi-seed study over all three architectures");
  cmp_cmd->add_option("config", cmp_config, "config file");
  cmp_cmd->add_option("--preset", cmp_preset, "built-in preset name");
  cmp_cmd->add_option("--out", cmp_out, "output directory");

  // eval
  std::string eval_ckpt, eval_env, eval_out = "grid.csv";
  int eval_grid = 21;
  auto* eval_cmd =
      app.add_subcommand("eval", "dump a value/policy grid from a checkpoint");
  eval_cmd->add_option("checkpoint", eval_ckpt, "checkpoint file")->required();
  eval_cmd->add_option("--env", eval_env, "puddle|mountain")->required();
  eval_cmd->add_option("--grid", eval_grid, "lattice resolution per axis");
  eval_cmd->add_option("--out", eval_out, "output CSV path");

  // oracle
  std::string oracle_env, oracle_out;
  auto* oracle_cmd =
      app.add_subcommand("oracle", "build a look-up-table reference and export it");
  oracle_cmd->add_option("env", oracle_env, "puddle|mountain")->required();
  oracle_cmd->add_option("--out", oracle_out, "output CSV path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*train_cmd) {
      sparsetd::ExperimentConfig cfg = resolve_config(train_config, train_preset);
      if (train_seed >= 0) cfg.seeds = {static_cast<std::uint64_t>(train_seed)};
      if (!train_arch.empty()) {
        sparsetd::apply_config_key(cfg, "arch.kind", train_arch);
      }
      if (!train_out.empty()) cfg.output_dir = train_out;
      return run_with_config(cfg);
    }
    if (*cmp_cmd) {
      sparsetd::ExperimentConfig cfg = resolve_config(cmp_config, cmp_preset);
      cfg.arch_kind = "all";
      if (!cmp_out.empty()) cfg.output_dir = cmp_out;
      return run_with_config(cfg);
    }
    if (*eval_cmd) {
      auto [params, arch] = sparsetd::checkpoint_load(eval_ckpt);
      const auto env = sparsetd::make_environment(eval_env);
      if (arch.n_in % env->state_dim() != 0) {
        throw sparsetd::InvalidValue("checkpoint input width does not match '" +
                                     eval_env + "'");
      }
      const int n_div = arch.n_in / env->state_dim() - 1;
      if (n_div < 1) throw sparsetd::InvalidValue("checkpoint input width too small");
      const auto grids = env->grids(n_div, 0.0);
      sparsetd::export_grids(params, arch, *env, grids, eval_grid, eval_out);
      std::printf("wrote %s (%d x %d lattice)\n", eval_out.c_str(), eval_grid,
                  eval_grid);
      return kExitOk;
    }
    if (*oracle_cmd) {
      if (oracle_env == "puddle") {
        const sparsetd::QTable table = sparsetd::puddle_reference_table();
        const std::string out =
            oracle_out.empty() ? std::string("puddle_qtable.csv") : oracle_out;
        sparsetd::export_qtable_csv(table, out);
        std::printf("wrote %s (%ld states x %d actions)\n", out.c_str(),
                    table.n_states(), table.n_actions);
        return kExitOk;
      }
      if (oracle_env == "mountain") {
        const auto env = sparsetd::make_environment("mountain");
        sparsetd::ScheduleState schedule;
        schedule.epsilon = 0.2;
        schedule.epsilon_floor = 0.01;
        schedule.anneal_mode = sparsetd::AnnealMode::PerEpisode;
        schedule.anneal_factor = 0.999;
        schedule.alpha = 0.2;
        schedule.gamma = 1.0;
        sparsetd::StopSpec stop;
        stop.delta_stop = 0.0;
        stop.max_episodes = 30000;
        stop.max_steps = 1000;
        const sparsetd::QTable table = sparsetd::tabular_sarsa(
            *env, env->grids(60, 0.0), schedule, stop, 0xC0FFEEULL);
        const std::string out =
            oracle_out.empty() ? std::string("mountain_qtable.csv") : oracle_out;
        sparsetd::export_qtable_csv(table, out);
        std::printf("wrote %s (%ld states x %d actions)\n", out.c_str(),
                    table.n_states(), table.n_actions);
        return kExitOk;
      }
      throw sparsetd::UnsupportedEnv("no look-up-table reference for '" + oracle_env +
                                     "' (state space too large)");
    }
  } catch (const sparsetd::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfigError;
  }
  return kExitConfigError;
}
