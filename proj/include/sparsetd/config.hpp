#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sparsetd/approximator.hpp"
#include "sparsetd/sarsa.hpp"

namespace sparsetd {

// Fully resolved experiment description. Two runs with an identical config
// and seed list produce identical artifacts.
struct ExperimentConfig {
  std::string preset = "puddle";
  std::string env_name = "puddle";
  int n_div = 20;
  double sigma = 0.0;  // <= 0: 1/n_div
  std::string arch_kind = "kwta";  // linear | regular | kwta | all
  int n_hidden = 220;
  int k = 22;
  double q = 0.25;
  ScheduleState schedule;
  StopSpec stop;
  std::vector<std::uint64_t> seeds{0};
  int test_interval = 0;
  int test_episodes = 20;
  std::string output_dir = "runs/puddle";

  std::vector<std::string> arch_list() const;
  ArchSpec make_arch(const std::string& kind, int n_in) const;
  // Sorted key = value dump; the run manifest hashes this text.
  std::string canonical_text() const;
  std::uint64_t hash() const;
};

bool is_known_preset(const std::string& name);
// Built-in per-task presets: puddle, mountain, acrobot, plus reduced
// puddle-small, mountain-small, acrobot-small variants.
ExperimentConfig preset_config(const std::string& name);

// Applies one key to the config; throws UnknownKey / InvalidValue.
void apply_config_key(ExperimentConfig& cfg, const std::string& key,
                      const std::string& value);

// Flat `key = value` file with '#' comments. A `preset` key (or the env
// named by `env.name`) selects the base config; every other key overrides it.
ExperimentConfig load_config(const std::string& path);

}  // namespace sparsetd
