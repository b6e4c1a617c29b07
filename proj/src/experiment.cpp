#include "sparsetd/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>
#include <tuple>

#include "sparsetd/checkpoint.hpp"
#include "sparsetd/csv.hpp"
#include "sparsetd/errors.hpp"

namespace sparsetd {

namespace fs = std::filesystem;

std::string version_string() { return "sparsetd 0.1.0"; }

int worker_count() {
  if (const char* env = std::getenv("SPARSETD_WORKERS")) {
    const int n = std::atoi(env);
    if (n >= 1) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

std::vector<EnvState> evaluation_starts(const Environment& env) {
  const std::string name = env.name();
  if (name == "puddle") return puddle_start_lattice();
  if (name == "mountain") {
    // Pinned start set shared by every trial so architectures are compared
    // on identical episodes.
    std::mt19937_64 rng(0x5EEDBA5EULL);
    std::vector<EnvState> starts;
    starts.reserve(100);
    for (int i = 0; i < 100; ++i) starts.push_back(env.reset(rng));
    return starts;
  }
  std::mt19937_64 rng(0);
  return {env.reset(rng)};
}

namespace {

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  out << text;
}

void write_curves_csv(const fs::path& path, const std::vector<EpisodeRow>& rows) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  out << "episode,mean_abs_delta,steps,total_reward,reached_goal,epsilon\n";
  for (size_t i = 0; i < rows.size(); ++i) {
    const EpisodeRow& r = rows[i];
    out << (i + 1) << ',' << csv_double(r.mean_abs_delta) << ',' << r.steps << ','
        << csv_double(r.total_reward) << ',' << (r.reached_goal ? 1 : 0) << ','
        << csv_double(r.epsilon) << '\n';
  }
}

void write_tests_csv(const fs::path& path, const std::vector<TestEpochRow>& rows) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  out << "epoch,mean_abs_delta,mean_steps,goal_rate\n";
  for (const TestEpochRow& r : rows) {
    out << r.epoch << ',' << csv_double(r.mean_abs_delta) << ','
        << csv_double(r.mean_steps) << ',' << csv_double(r.goal_rate) << '\n';
  }
}

void write_result_csv(const fs::path& path, const TrialOutcome& t) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  out << "arch,seed,reason,episodes,eval_goal_rate,msd\n";
  out << t.arch << ',' << t.seed << ',' << to_string(t.reason) << ',' << t.episodes
      << ',' << csv_double(t.goal_rate) << ','
      << (t.msd_valid ? csv_double(t.msd) : "nan") << '\n';
}

struct ArchAggregate {
  std::string arch;
  int n_trials = 0;
  double goal_rate_mean = 0.0, goal_rate_stderr = 0.0;
  double msd_mean = std::nan(""), msd_stderr = std::nan("");
};

ArchAggregate aggregate_arch(const std::string& arch,
                             std::span<const TrialOutcome> trials) {
  std::vector<double> rates;
  std::vector<double> msds;
  for (const TrialOutcome& t : trials) {
    if (t.arch != arch || t.reason == StopReason::Diverged) continue;
    rates.push_back(t.goal_rate);
    if (t.msd_valid) msds.push_back(t.msd);
  }
  auto mean_stderr = [](std::span<const double> xs) {
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(xs.size());
    double var = 0.0;
    for (double x : xs) var += (x - mean) * (x - mean);
    const double se = xs.size() > 1
                          ? std::sqrt(var / (static_cast<double>(xs.size()) - 1.0) /
                                      static_cast<double>(xs.size()))
                          : 0.0;
    return std::pair<double, double>(mean, se);
  };
  ArchAggregate agg;
  agg.arch = arch;
  agg.n_trials = static_cast<int>(rates.size());
  if (!rates.empty()) {
    std::tie(agg.goal_rate_mean, agg.goal_rate_stderr) = mean_stderr(rates);
  }
  if (!msds.empty()) {
    std::tie(agg.msd_mean, agg.msd_stderr) = mean_stderr(msds);
  }
  return agg;
}

void write_aggregate_csv(const fs::path& path, std::span<const std::string> archs,
                         std::span<const TrialOutcome> trials) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  out << "arch,n_trials,goal_rate_mean,goal_rate_stderr,msd_mean,msd_stderr\n";
  for (const std::string& arch : archs) {
    const ArchAggregate a = aggregate_arch(arch, trials);
    out << a.arch << ',' << a.n_trials << ',' << csv_double(a.goal_rate_mean) << ','
        << csv_double(a.goal_rate_stderr) << ','
        << (std::isnan(a.msd_mean) ? "nan" : csv_double(a.msd_mean)) << ','
        << (std::isnan(a.msd_stderr) ? "nan" : csv_double(a.msd_stderr)) << '\n';
  }
}

}  // namespace

void export_grids(const ApproximatorParams& params, const ArchSpec& arch,
                  const Environment& env, std::span<const GridSpec> grids,
                  int resolution, const std::string& csv_path) {
  if (env.state_dim() != 2) {
    throw UnsupportedEnv(std::string("export_grids: '") + env.name() +
                         "' is not a 2D task");
  }
  if (resolution < 2) throw InvalidValue("export_grids: resolution must be >= 2");
  std::ofstream out(csv_path);
  if (!out) throw Error("cannot open '" + csv_path + "' for writing");
  out << "x,y,value,action\n";
  ForwardTrace trace;
  Eigen::VectorXd input;
  for (int i = 0; i < resolution; ++i) {
    for (int j = 0; j < resolution; ++j) {
      const double x =
          grids[0].lo + (grids[0].hi - grids[0].lo) * i / (resolution - 1.0);
      const double y =
          grids[1].lo + (grids[1].hi - grids[1].lo) * j / (resolution - 1.0);
      const double state[2] = {x, y};
      encode_state(std::span<const double>(state, 2), grids, input);
      forward(params, arch, input, trace);
      int best = 0;
      for (int a = 1; a < arch.n_out; ++a) {
        if (trace.q(a) > trace.q(best)) best = a;
      }
      out << csv_double(x) << ',' << csv_double(y) << ',' << csv_double(trace.q(best))
          << ',' << best << '\n';
    }
  }
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  const auto env = make_environment(cfg.env_name);
  const std::vector<GridSpec> grids = env->grids(cfg.n_div, cfg.sigma);
  const int n_in = encoded_size(grids);
  const std::vector<std::string> archs = cfg.arch_list();

  const fs::path out_dir(cfg.output_dir);
  fs::create_directories(out_dir);
  write_file(out_dir / "config.txt", cfg.canonical_text());

  // Shared evaluation machinery.
  const std::vector<EnvState> starts = evaluation_starts(*env);
  std::vector<double> optimal_returns;
  if (cfg.env_name == "puddle") {
    const QTable oracle = puddle_reference_table();
    const TableRollout ref = rollout_table(oracle, *env, starts, cfg.stop.max_steps);
    for (size_t i = 0; i < starts.size(); ++i) {
      if (!ref.reached[i]) {
        throw Error("puddle reference table failed to reach the goal from start " +
                    std::to_string(i));
      }
    }
    optimal_returns = ref.returns;
  }

  struct Job {
    std::string arch;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (const std::string& arch : archs) {
    for (std::uint64_t seed : cfg.seeds) jobs.push_back({arch, seed});
  }
  std::vector<TrialOutcome> outcomes(jobs.size());

  auto run_trial = [&](const Job& job, TrialOutcome& outcome) {
    outcome.arch = job.arch;
    outcome.seed = job.seed;

    const ArchSpec arch = [&] {
      ArchSpec a = cfg.make_arch(job.arch, n_in);
      a.n_out = env->num_actions();
      a.validate();
      return a;
    }();

    TrainConfig tc;
    tc.schedule = cfg.schedule;
    tc.stop = cfg.stop;
    tc.test_interval = cfg.test_interval;
    tc.test_episodes = cfg.test_episodes;
    const TrainResult result = train(*env, grids, arch, tc, job.seed);

    outcome.reason = result.reason;
    outcome.episodes = result.episodes;

    const fs::path trial_dir =
        out_dir / ("trial_" + job.arch + "_seed" + std::to_string(job.seed));
    fs::create_directories(trial_dir);
    write_curves_csv(trial_dir / "curves.csv", result.curves);
    if (!result.tests.empty()) write_tests_csv(trial_dir / "tests.csv", result.tests);
    checkpoint_save(result.params, arch, (trial_dir / "checkpoint.bin").string());

    if (result.reason != StopReason::Diverged) {
      const TestStats eval =
          evaluate(*env, grids, result.params, arch, starts, cfg.stop.max_steps);
      outcome.goal_rate = eval.goal_rate();
      if (!optimal_returns.empty()) {
        try {
          const DeviationMetrics m =
              deviation_metrics(eval.returns, eval.reached, optimal_returns);
          outcome.msd = m.msd;
          outcome.msd_valid = true;
        } catch (const NoSuccessfulEpisodes&) {
          outcome.msd_valid = false;  // reported as nan
        }
      }
    }
    outcome.dir = trial_dir.string();
    write_result_csv(trial_dir / "result.csv", outcome);
  };

  const int workers = std::max(1, std::min<int>(worker_count(),
                                                static_cast<int>(jobs.size())));
  std::atomic<size_t> cursor{0};
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(static_cast<size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (;;) {
          const size_t i = cursor.fetch_add(1);
          if (i >= jobs.size()) break;
          run_trial(jobs[i], outcomes[i]);
        }
      } catch (...) {
        errors[static_cast<size_t>(w)] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  write_aggregate_csv(out_dir / "aggregate.csv", archs, outcomes);

  int diverged = 0;
  for (const TrialOutcome& t : outcomes) {
    if (t.reason == StopReason::Diverged) ++diverged;
  }
  {
    std::ostringstream manifest;
    char hash_hex[32];
    std::snprintf(hash_hex, sizeof(hash_hex), "%016llx",
                  static_cast<unsigned long long>(cfg.hash()));
    manifest << "config_hash = " << hash_hex << "\n";
    manifest << "code_version = " << version_string() << "\n";
    manifest << "seeds = ";
    for (size_t i = 0; i < cfg.seeds.size(); ++i) {
      manifest << cfg.seeds[i] << (i + 1 < cfg.seeds.size() ? "," : "");
    }
    manifest << "\n";
    manifest << "trials_ok = " << (outcomes.size() - static_cast<size_t>(diverged))
             << "/" << outcomes.size() << "\n";
    write_file(out_dir / "manifest.txt", manifest.str());
  }

  ExperimentResult result;
  result.trials = std::move(outcomes);
  result.exit_code = diverged > 0 ? 1 : 0;
  return result;
}

}  // namespace sparsetd
