// Copyright 2026 The maddpgk Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "maddpgk/cli.hpp"

#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "maddpgk/errors.hpp"
#include "maddpgk/harness.hpp"

namespace maddpgk {

namespace {

namespace fs = std::filesystem;

struct Options {
  std::string config_path;
  std::optional<std::string> env;
  std::optional<std::string> algo;
  std::optional<int> n;
  std::optional<int> k;
  std::optional<int> seeds;
  std::uint64_t seed_base = 0;
  std::optional<int> episodes;
  std::optional<int> batch;
  std::optional<int> update_period;
  bool benchmark = false;
  std::vector<int> n_list;
  std::optional<std::string> out;
  std::vector<std::string> aggregate_inputs;
  bool save_checkpoints = false;
  bool dump_trajectory = false;
};

std::string read_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const fs::path& path, const std::string& contents) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << contents;
}

ExperimentConfig resolve(const Options& opts) {
  ExperimentConfig config;
  bool have_env = false;
  if (!opts.config_path.empty()) {
    const std::string text = read_file(opts.config_path);
    config = config_from_json_string(text);
    have_env = text.find("\"env\"") != std::string::npos;
  }
  if (opts.env) {
    switch (env::env_from_name(*opts.env)) {
      case env::EnvId::kSpread: config.env = env::EnvConfig::spread(3); break;
      case env::EnvId::kTag: config.env = env::EnvConfig::tag(); break;
      case env::EnvId::kAdversary: config.env = env::EnvConfig::adversary(); break;
    }
    have_env = true;
  }
  if (!have_env) {
    if (!opts.benchmark) throw CLI::ValidationError("--env", "an environment is required (--env or --config)");
    config.env = env::EnvConfig::spread(3);
  }
  if (opts.n) resize_agents(config.env, *opts.n);
  if (opts.algo) config.algo.algorithm = algorithm_from_name(*opts.algo);
  if (opts.k) config.algo.k.good = config.algo.k.adversary = *opts.k;
  if (opts.seeds) {
    if (*opts.seeds <= 0) throw ConfigError("--seeds must be positive");
    config.seeds.clear();
    for (int i = 0; i < *opts.seeds; ++i) config.seeds.push_back(opts.seed_base + static_cast<std::uint64_t>(i));
  }
  if (opts.batch) config.batch_size = *opts.batch;
  if (opts.update_period) config.update_period = *opts.update_period;
  if (opts.out) config.output_dir = *opts.out;
  if (opts.benchmark) config.benchmark = true;
  if (!opts.n_list.empty()) config.n_list = opts.n_list;
  if (opts.dump_trajectory) config.dump_trajectory = true;
  if (opts.episodes) {
    config.episodes = *opts.episodes;
  } else if (config.benchmark && config.episodes == ExperimentConfig{}.episodes) {
    config.episodes = kBenchmarkEpisodes;
  }
  validate(config);
  return config;
}

int run_aggregate(const Options& opts, std::ostream& out) {
  std::vector<RunLog> logs;
  for (const auto& path : opts.aggregate_inputs) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path);
    logs.push_back(read_run_log(in));
  }
  const fs::path dir = opts.out.value_or(".");
  fs::create_directories(dir);
  std::ostringstream csv;
  write_aggregate(csv, aggregate_runs(logs));
  write_file(dir / "aggregate.csv", csv.str());
  out << "wrote " << (dir / "aggregate.csv").string() << '\n';
  return kExitOk;
}

int run_benchmark(const ExperimentConfig& config, std::ostream& out) {
  fs::create_directories(config.output_dir);
  write_file(config.output_dir / "config.json", to_json_string(config) + "\n");
  const auto rows = run_scaling_benchmark(config, config.n_list, &out);
  std::ostringstream csv;
  write_scaling(csv, rows);
  write_file(config.output_dir / "scaling.csv", csv.str());
  out << "wrote " << (config.output_dir / "scaling.csv").string() << '\n';
  return kExitOk;
}

int run_experiment(const ExperimentConfig& config, const Options& opts, std::ostream& out, std::ostream& err) {
  fs::create_directories(config.output_dir);
  const std::string config_json = to_json_string(config);
  write_file(config.output_dir / "config.json", config_json + "\n");
  out << "# algorithm=" << algorithm_name(config.algo.algorithm) << " env=" << env::env_name(config.env.id)
      << " agents=" << config.env.agent_count() << " K(good)=" << config.algo.k.good
      << " K(adversary)=" << config.algo.k.adversary << " gamma=" << config.algo.gamma
      << " tau=" << config.algo.tau << " lr=" << config.algo.learning_rate << " batch=" << config.batch_size
      << " update_period=" << config.update_period << " episodes=" << config.episodes << '\n';

  std::vector<RunLog> logs;
  bool failed = false;
  for (std::uint64_t seed : config.seeds) {
    RunLog log;
    log.seed = seed;
    log.agent_kinds = env::agent_kinds(config.env);
    Trainer trainer(config, seed);
    std::ofstream trajectory;
    if (config.dump_trajectory) {
      trajectory.open(config.output_dir / ("trajectory_" + std::to_string(seed) + ".csv"));
      env::write_trajectory_header(trajectory);
      trainer.trajectory_out = &trajectory;
    }
    try {
      for (int e = 0; e < config.episodes; ++e) log.rows.push_back(trainer.run_episode());
    } catch (const TrainingError& error) {
      log.error = error.what();
    }
    std::ostringstream csv;
    write_run_log(csv, log, config_json);
    write_file(config.output_dir / ("run_" + std::to_string(seed) + ".csv"), csv.str());
    if (opts.save_checkpoints) trainer.learners().save(config.output_dir / ("checkpoints_" + std::to_string(seed)));
    if (log.error) {
      err << "seed " << seed << " aborted: " << *log.error << '\n';
      failed = true;
    } else {
      out << "seed " << seed << ": final-200 mean return " << final_mean_return(log, 200) << '\n';
    }
    logs.push_back(std::move(log));
  }
  if (failed) return kExitFailure;
  std::ostringstream csv;
  write_aggregate(csv, aggregate_runs(logs));
  write_file(config.output_dir / "aggregate.csv", csv.str());
  out << "wrote " << logs.size() << " run logs and aggregate.csv to " << config.output_dir.string() << '\n';
  return kExitOk;
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multi-agent DDPG / MADDPG / MADDPG-K trainer for particle environments", "maddpgk"};
  Options opts;
  app.add_option("--config", opts.config_path, "JSON experiment config; flags override it");
  app.add_option("--env", opts.env, "Environment: spread | tag | adversary");
  app.add_option("--algo", opts.algo, "Algorithm: ddpg | maddpg | maddpg_k");
  app.add_option("--n", opts.n, "Agent count (tag: good agents)");
  app.add_option("--k", opts.k, "Neighbors per agent, excluding itself (all agent kinds)");
  app.add_option("--seeds", opts.seeds, "Number of seeds to run");
  app.add_option("--seed-base", opts.seed_base, "First seed");
  app.add_option("--episodes", opts.episodes, "Episodes per run");
  app.add_option("--batch", opts.batch, "Minibatch size");
  app.add_option("--update-period", opts.update_period, "Environment steps between updates");
  app.add_flag("--benchmark", opts.benchmark, "Run the MADDPG vs MADDPG-K wall-clock benchmark");
  app.add_option("--n-list", opts.n_list, "Agent counts for --benchmark, comma separated")->delimiter(',');
  app.add_option("--out", opts.out, "Output directory");
  app.add_option("--aggregate", opts.aggregate_inputs, "Aggregate existing run_<seed>.csv files and exit");
  app.add_flag("--save-checkpoints", opts.save_checkpoints, "Write network checkpoints after each run");
  app.add_flag("--dump-trajectory", opts.dump_trajectory, "Write per-step entity trajectories as CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& error) {
    const int code = app.exit(error, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  keep_large_allocations_on_heap();
  try {
    if (!opts.aggregate_inputs.empty()) return run_aggregate(opts, out);
    const ExperimentConfig config = resolve(opts);
    if (config.benchmark) return run_benchmark(config, out);
    return run_experiment(config, opts, out, err);
  } catch (const CLI::Error& error) {
    err << "usage error: " << error.what() << "\n" << app.help();
    return kExitUsage;
  } catch (const ConfigError& error) {
    err << "usage error: " << error.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& error) {
    err << "error: " << error.what() << '\n';
    return kExitFailure;
  }
}

}  // namespace maddpgk
