#include "sparsetd/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "sparsetd/csv.hpp"
#include "sparsetd/errors.hpp"

namespace sparsetd {

namespace {

double parse_double(const std::string& v) {
  if (v == "inf") return std::numeric_limits<double>::infinity();
  size_t pos = 0;
  double d;
  try {
    d = std::stod(v, &pos);
  } catch (const std::exception&) {
    throw InvalidValue("expected a number, got '" + v + "'");
  }
  if (pos != v.size()) throw InvalidValue("trailing characters in number '" + v + "'");
  return d;
}

int parse_int(const std::string& v) {
  size_t pos = 0;
  long n;
  try {
    n = std::stol(v, &pos);
  } catch (const std::exception&) {
    throw InvalidValue("expected an integer, got '" + v + "'");
  }
  if (pos != v.size()) throw InvalidValue("trailing characters in integer '" + v + "'");
  return static_cast<int>(n);
}

bool parse_bool(const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw InvalidValue("expected true/false, got '" + v + "'");
}

std::vector<std::uint64_t> parse_seeds(const std::string& v) {
  std::vector<std::uint64_t> seeds;
  std::string token;
  std::stringstream ss(v);
  while (std::getline(ss, token, ',')) {
    const auto first = token.find_first_not_of(" \t");
    const auto last = token.find_last_not_of(" \t");
    if (first == std::string::npos) continue;
    token = token.substr(first, last - first + 1);
    try {
      seeds.push_back(std::stoull(token));
    } catch (const std::exception&) {
      throw InvalidValue("bad seed '" + token + "'");
    }
  }
  if (seeds.empty()) throw InvalidValue("empty seed list");
  return seeds;
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::uint64_t> seed_range(std::uint64_t n) {
  std::vector<std::uint64_t> seeds(n);
  for (std::uint64_t i = 0; i < n; ++i) seeds[i] = i;
  return seeds;
}

}  // namespace

std::vector<std::string> ExperimentConfig::arch_list() const {
  if (arch_kind == "all") return {"linear", "regular", "kwta"};
  return {arch_kind};
}

ArchSpec ExperimentConfig::make_arch(const std::string& kind, int n_in) const {
  ArchSpec arch;
  arch.kind = arch_kind_from_string(kind);
  arch.n_in = n_in;
  arch.n_out = 0;  // caller sets the action count
  arch.n_hidden = arch.kind == ArchKind::Linear ? 0 : n_hidden;
  if (arch.kind == ArchKind::Kwta) {
    arch.kwta.k = k;
    arch.kwta.q = q;
  }
  return arch;
}

std::string ExperimentConfig::canonical_text() const {
  std::ostringstream out;
  out << "preset = " << preset << "\n";
  out << "env.name = " << env_name << "\n";
  out << "env.n_div = " << n_div << "\n";
  out << "env.sigma = " << csv_double(sigma) << "\n";
  out << "arch.kind = " << arch_kind << "\n";
  out << "arch.n_hidden = " << n_hidden << "\n";
  out << "arch.k = " << k << "\n";
  out << "arch.q = " << csv_double(q) << "\n";
  out << "sarsa.alpha = " << csv_double(schedule.alpha) << "\n";
  out << "sarsa.gamma = " << csv_double(schedule.gamma) << "\n";
  out << "sarsa.epsilon0 = " << csv_double(schedule.epsilon) << "\n";
  out << "sarsa.epsilon_floor = " << csv_double(schedule.epsilon_floor) << "\n";
  out << "sarsa.anneal_mode = " << to_string(schedule.anneal_mode) << "\n";
  out << "sarsa.anneal_factor = " << csv_double(schedule.anneal_factor) << "\n";
  out << "sarsa.delta_gate = "
      << (std::isinf(schedule.delta_gate) ? "inf" : csv_double(schedule.delta_gate))
      << "\n";
  out << "stop.delta_stop = " << csv_double(stop.delta_stop) << "\n";
  out << "stop.max_episodes = " << stop.max_episodes << "\n";
  out << "stop.max_steps = " << stop.max_steps << "\n";
  out << "stop.window = " << stop.window << "\n";
  out << "stop.require_consistent_goal = "
      << (stop.require_consistent_goal ? "true" : "false") << "\n";
  out << "harness.seeds = ";
  for (size_t i = 0; i < seeds.size(); ++i) {
    out << seeds[i] << (i + 1 < seeds.size() ? "," : "");
  }
  out << "\n";
  out << "harness.test_interval = " << test_interval << "\n";
  out << "harness.test_episodes = " << test_episodes << "\n";
  out << "harness.output_dir = " << output_dir << "\n";
  return out.str();
}

std::uint64_t ExperimentConfig::hash() const {
  // FNV-1a over the canonical text.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : canonical_text()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

bool is_known_preset(const std::string& name) {
  return name == "puddle" || name == "puddle-small" || name == "mountain" ||
         name == "mountain-small" || name == "acrobot" || name == "acrobot-small";
}

ExperimentConfig preset_config(const std::string& name) {
  ExperimentConfig c;
  c.preset = name;
  if (name == "puddle" || name == "puddle-small") {
    c.env_name = "puddle";
    c.n_div = 20;
    c.sigma = 0.0;
    c.arch_kind = "kwta";
    c.n_hidden = 220;
    c.k = 22;
    c.q = 0.25;
    c.schedule.alpha = 0.005;
    c.schedule.gamma = 1.0;
    c.schedule.epsilon = 0.1;
    c.schedule.epsilon_floor = 0.0;
    c.schedule.anneal_mode = AnnealMode::OnGoalAfterDeltaThreshold;
    c.schedule.anneal_factor = 0.999;
    c.schedule.delta_gate = 0.2;
    c.stop.delta_stop = 0.01;
    c.stop.max_episodes = 44100;  // (21 * 21) * 100
    c.stop.max_steps = 80;
    c.stop.window = 100;
    c.stop.require_consistent_goal = true;
    c.seeds = seed_range(20);
    c.test_interval = 0;
    c.test_episodes = 20;
    c.output_dir = "runs/puddle";
    if (name == "puddle-small") {
      c.n_hidden = 60;
      c.k = 6;
      c.stop.max_episodes = 4000;
      c.seeds = seed_range(3);
      c.output_dir = "runs/puddle-small";
    }
    return c;
  }
  if (name == "mountain" || name == "mountain-small") {
    c.env_name = "mountain";
    c.n_div = 60;
    c.sigma = 0.0;
    c.arch_kind = "kwta";
    c.n_hidden = 2604;  // 61 * 61 * 0.7
    c.k = 260;
    c.q = 0.25;
    c.schedule.alpha = 0.001;
    c.schedule.gamma = 1.0;
    c.schedule.epsilon = 0.1;
    c.schedule.epsilon_floor = 0.0001;
    c.schedule.anneal_mode = AnnealMode::PerEpisode;
    c.schedule.anneal_factor = 0.99;
    c.schedule.delta_gate = 0.2;  // unused in per-episode mode
    c.stop.delta_stop = 0.05;
    c.stop.max_episodes = 200000;
    c.stop.max_steps = 3000;
    c.stop.window = 100;
    c.stop.require_consistent_goal = true;
    c.seeds = seed_range(20);
    c.test_interval = 1000;
    c.test_episodes = 20;
    c.output_dir = "runs/mountain";
    if (name == "mountain-small") {
      c.n_div = 40;  // 41-unit grids, 82 inputs
      c.n_hidden = 600;
      c.k = 60;
      c.stop.max_episodes = 20000;
      c.stop.max_steps = 1000;
      c.seeds = {1};
      c.output_dir = "runs/mountain-small";
    }
    return c;
  }
  if (name == "acrobot" || name == "acrobot-small") {
    c.env_name = "acrobot";
    c.n_div = 20;
    c.sigma = 0.0;
    c.arch_kind = "kwta";
    c.n_hidden = 8400;
    c.k = 840;
    c.q = 0.25;
    c.schedule.alpha = 0.0001;
    c.schedule.gamma = 0.99;
    c.schedule.epsilon = 0.05;
    c.schedule.epsilon_floor = 0.0001;
    // Annealing starts with the first goal; the delta gate never blocks it.
    c.schedule.anneal_mode = AnnealMode::OnGoalAfterDeltaThreshold;
    c.schedule.anneal_factor = 0.999;
    c.schedule.delta_gate = std::numeric_limits<double>::infinity();
    c.stop.delta_stop = 0.05;
    c.stop.max_episodes = 200000;
    c.stop.max_steps = 2000;
    c.stop.window = 100;
    c.stop.require_consistent_goal = true;
    c.seeds = seed_range(20);
    c.test_interval = 1000;
    c.test_episodes = 1;  // the start state is deterministic
    c.output_dir = "runs/acrobot";
    if (name == "acrobot-small") {
      c.n_hidden = 1000;
      c.k = 100;
      c.schedule.alpha = 0.001;
      c.stop.max_episodes = 5000;
      c.stop.max_steps = 500;
      c.seeds = {1, 2, 3, 4, 5};
      c.output_dir = "runs/acrobot-small";
    }
    return c;
  }
  throw InvalidValue("unknown preset '" + name + "'");
}

void apply_config_key(ExperimentConfig& cfg, const std::string& key,
                      const std::string& value) {
  if (key == "preset") {
    if (!is_known_preset(value)) throw InvalidValue("unknown preset '" + value + "'");
    cfg.preset = value;
  } else if (key == "env.name") {
    if (value != "puddle" && value != "mountain" && value != "acrobot") {
      throw InvalidValue("unknown environment '" + value + "'");
    }
    cfg.env_name = value;
  } else if (key == "env.n_div") {
    cfg.n_div = parse_int(value);
    if (cfg.n_div < 1) throw InvalidValue("env.n_div must be >= 1");
  } else if (key == "env.sigma") {
    cfg.sigma = parse_double(value);
  } else if (key == "arch.kind") {
    if (value != "linear" && value != "regular" && value != "kwta" && value != "all") {
      throw InvalidValue("arch.kind must be linear|regular|kwta|all");
    }
    cfg.arch_kind = value;
  } else if (key == "arch.n_hidden") {
    cfg.n_hidden = parse_int(value);
    if (cfg.n_hidden < 1) throw InvalidValue("arch.n_hidden must be >= 1");
  } else if (key == "arch.k") {
    cfg.k = parse_int(value);
    if (cfg.k < 1) throw InvalidValue("arch.k must be >= 1");
  } else if (key == "arch.q") {
    cfg.q = parse_double(value);
    if (!(cfg.q > 0.0 && cfg.q < 1.0)) throw InvalidValue("arch.q must be in (0,1)");
  } else if (key == "sarsa.alpha") {
    cfg.schedule.alpha = parse_double(value);
    if (cfg.schedule.alpha <= 0.0) throw InvalidValue("sarsa.alpha must be > 0");
  } else if (key == "sarsa.gamma") {
    cfg.schedule.gamma = parse_double(value);
    if (cfg.schedule.gamma < 0.0 || cfg.schedule.gamma > 1.0) {
      throw InvalidValue("sarsa.gamma must be in [0,1]");
    }
  } else if (key == "sarsa.epsilon0") {
    cfg.schedule.epsilon = parse_double(value);
    if (cfg.schedule.epsilon < 0.0 || cfg.schedule.epsilon > 1.0) {
      throw InvalidValue("sarsa.epsilon0 must be in [0,1]");
    }
  } else if (key == "sarsa.epsilon_floor") {
    cfg.schedule.epsilon_floor = parse_double(value);
    if (cfg.schedule.epsilon_floor < 0.0) {
      throw InvalidValue("sarsa.epsilon_floor must be >= 0");
    }
  } else if (key == "sarsa.anneal_mode") {
    cfg.schedule.anneal_mode = anneal_mode_from_string(value);
  } else if (key == "sarsa.anneal_factor") {
    cfg.schedule.anneal_factor = parse_double(value);
    if (!(cfg.schedule.anneal_factor > 0.0 && cfg.schedule.anneal_factor <= 1.0)) {
      throw InvalidValue("sarsa.anneal_factor must be in (0,1]");
    }
  } else if (key == "sarsa.delta_gate") {
    cfg.schedule.delta_gate = parse_double(value);
  } else if (key == "stop.delta_stop") {
    cfg.stop.delta_stop = parse_double(value);
  } else if (key == "stop.max_episodes") {
    cfg.stop.max_episodes = parse_int(value);
    if (cfg.stop.max_episodes < 0) throw InvalidValue("stop.max_episodes must be >= 0");
  } else if (key == "stop.max_steps") {
    cfg.stop.max_steps = parse_int(value);
    if (cfg.stop.max_steps < 1) throw InvalidValue("stop.max_steps must be >= 1");
  } else if (key == "stop.window") {
    cfg.stop.window = parse_int(value);
    if (cfg.stop.window < 1) throw InvalidValue("stop.window must be >= 1");
  } else if (key == "stop.require_consistent_goal") {
    cfg.stop.require_consistent_goal = parse_bool(value);
  } else if (key == "harness.seeds") {
    cfg.seeds = parse_seeds(value);
  } else if (key == "harness.test_interval") {
    cfg.test_interval = parse_int(value);
    if (cfg.test_interval < 0) throw InvalidValue("harness.test_interval must be >= 0");
  } else if (key == "harness.test_episodes") {
    cfg.test_episodes = parse_int(value);
    if (cfg.test_episodes < 1) throw InvalidValue("harness.test_episodes must be >= 1");
  } else if (key == "harness.output_dir") {
    cfg.output_dir = value;
  } else {
    throw UnknownKey("'" + key + "'");
  }
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open config file '" + path + "'");

  struct Entry {
    int line;
    std::string key, value;
  };
  std::vector<Entry> entries;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash_pos = line.find('#');
    if (hash_pos != std::string::npos) line.erase(hash_pos);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ParseError(path + ":" + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      throw ParseError(path + ":" + std::to_string(line_no) + ": empty key");
    }
    if (value.empty()) {
      throw ParseError(path + ":" + std::to_string(line_no) + ": empty value for '" +
                       key + "'");
    }
    entries.push_back({line_no, key, value});
  }

  // Base preset: an explicit `preset` key wins, otherwise the paper preset
  // of the named environment.
  std::string base;
  for (const auto& e : entries) {
    if (e.key == "preset") base = e.value;
  }
  if (base.empty()) {
    for (const auto& e : entries) {
      if (e.key == "env.name") base = e.value;
    }
  }
  if (base.empty()) {
    throw ParseError(path + ": config must name a preset or an env.name");
  }
  if (!is_known_preset(base)) {
    throw InvalidValue(path + ": unknown preset '" + base + "'");
  }
  ExperimentConfig cfg = preset_config(base);
  for (const auto& e : entries) {
    try {
      apply_config_key(cfg, e.key, e.value);
    } catch (const UnknownKey& err) {
      throw UnknownKey(path + ":" + std::to_string(e.line) + ": " + err.what());
    } catch (const InvalidValue& err) {
      throw InvalidValue(path + ":" + std::to_string(e.line) + ": " + err.what());
    }
  }
  return cfg;
}

}  // namespace sparsetd
