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

#ifndef MADDPGK_HARNESS_HPP_
#define MADDPGK_HARNESS_HPP_

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "maddpgk/algorithms.hpp"
#include "maddpgk/particle_env.hpp"
#include "maddpgk/replay.hpp"

namespace maddpgk {

struct ExperimentConfig {
  env::EnvConfig env = env::EnvConfig::spread(3);
  AlgoConfig algo;
  std::vector<std::uint64_t> seeds = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  int episodes = 3000;
  int update_period = 100;  // env steps (= samples per agent) between updates
  int batch_size = 1024;
  std::size_t buffer_capacity = ReplayBuffer::kDefaultCapacity;
  std::filesystem::path output_dir = "runs";
  bool benchmark = false;
  std::vector<int> n_list = {5, 15, 30, 45};
  // Unset: store neighbor index sets only when the algorithm reads them.
  std::optional<bool> store_index_sets;
  bool dump_trajectory = false;

  bool stores_index_sets() const {
    return store_index_sets.value_or(algo.algorithm == Algorithm::kMaddpgK);
  }
};

inline constexpr int kBenchmarkEpisodes = 200;

void validate(const ExperimentConfig& config);

// Sets the number of agents in the way each environment scales: spread and
// adversary grow agents and landmarks together, tag grows good agents.
void resize_agents(env::EnvConfig& config, int n);

struct EpisodeRow {
  int episode = 0;
  std::vector<double> agent_returns;
  double total_return = 0.0;
  std::int64_t env_steps = 0;
  double wall_ms = 0.0;
};

struct RunLog {
  std::uint64_t seed = 0;
  std::vector<env::EntityKind> agent_kinds;
  std::vector<EpisodeRow> rows;
  std::optional<std::string> error;
};

std::vector<std::string> agent_labels(const std::vector<env::EntityKind>& kinds);

// Owns one training run: environment, learners, replay buffer and all RNG
// streams derived from the run seed.
class Trainer {
 public:
  Trainer(const ExperimentConfig& config, std::uint64_t seed);

  // Plays one full episode, pushing every transition and firing updates on
  // the schedule.
  EpisodeRow run_episode();

  const ExperimentConfig& config() const { return config_; }
  const LearnerGroup& learners() const { return learners_; }
  LearnerGroup& learners() { return learners_; }
  const ReplayBuffer& buffer() const { return buffer_; }
  std::int64_t env_steps() const { return env_steps_; }
  int updates_performed() const { return updates_performed_; }
  int updates_skipped() const { return updates_skipped_; }
  bool warmup() const { return updates_performed_ == 0; }
  int episodes_completed() const { return episode_; }

  // Called after every performed update.
  std::function<void(const Trainer&, const UpdateStats&)> on_update;
  // Receives trajectory rows for every step of every episode when set.
  std::ostream* trajectory_out = nullptr;

 private:
  IndexSets index_sets_for(const env::WorldState& state) const;

  ExperimentConfig config_;
  std::uint64_t seed_;
  std::mt19937_64 env_rng_;
  std::mt19937_64 init_rng_;
  std::mt19937_64 explore_rng_;
  std::mt19937_64 sample_rng_;
  LearnerGroup learners_;
  ReplayBuffer buffer_;
  MetricSpec metric_;
  std::vector<int> k_per_agent_;
  std::int64_t env_steps_ = 0;
  int updates_performed_ = 0;
  int updates_skipped_ = 0;
  int episode_ = 0;
  std::chrono::steady_clock::duration elapsed_{};
};

// Full run for one seed. A TrainingError ends the run early; the rows
// collected so far are returned with `error` set.
RunLog run_training(const ExperimentConfig& config, std::uint64_t seed);

// Serves large batch matrices from the reused heap instead of fresh mmap
// regions. Process-wide; a no-op outside glibc.
void keep_large_allocations_on_heap();

struct AggregateRow {
  int episode = 0;
  double mean_total = 0.0;
  double std_total = 0.0;  // population standard deviation across runs
  double min_total = 0.0;
  double max_total = 0.0;
  double mean_good = 0.0;
  double mean_adversary = 0.0;
};

struct AggregateLog {
  std::size_t runs = 0;
  std::vector<AggregateRow> rows;
};

// Per-episode statistics of the total return across runs. Throws
// ConfigError when the logs differ in length.
AggregateLog aggregate_runs(const std::vector<RunLog>& logs);

struct ScalingRow {
  Algorithm algorithm = Algorithm::kMaddpg;
  int n = 0;
  Eigen::Index critic_input_width = 0;
  int episodes = 0;
  double seconds_per_100_episodes = 0.0;
};

// Times MADDPG and MADDPG-K (same network widths) for every n, serially on
// the calling thread.
std::vector<ScalingRow> run_scaling_benchmark(const ExperimentConfig& config, const std::vector<int>& n_values,
                                              std::ostream* progress = nullptr);

// CSV writers and readers; schemas are listed in the README.
void write_run_log(std::ostream& out, const RunLog& log, const std::string& config_json = {});
RunLog read_run_log(std::istream& in);
void write_aggregate(std::ostream& out, const AggregateLog& aggregate);
void write_scaling(std::ostream& out, const std::vector<ScalingRow>& rows);

std::string to_json_string(const ExperimentConfig& config);
ExperimentConfig config_from_json_string(const std::string& text);

// Mean of the last `window` total returns.
double final_mean_return(const RunLog& log, int window);

}  // namespace maddpgk

#endif  // MADDPGK_HARNESS_HPP_
