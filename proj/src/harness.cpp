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

#include "maddpgk/harness.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <utility>

#include "maddpgk/errors.hpp"

#if defined(__GLIBC__)
#include <malloc.h>
#endif

namespace maddpgk {

namespace {

std::mt19937_64 make_stream(std::uint64_t seed, std::uint32_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu), static_cast<std::uint32_t>(seed >> 32),
                    stream};
  return std::mt19937_64(seq);
}

enum Stream : std::uint32_t { kEnvStream = 1, kInitStream = 2, kExploreStream = 3, kSampleStream = 4 };

}  // namespace

void validate(const ExperimentConfig& config) {
  env::validate(config.env);
  validate(config.algo);
  if (config.episodes <= 0) throw ConfigError("episodes must be positive");
  if (config.update_period <= 0) throw ConfigError("update period must be positive");
  if (config.batch_size <= 0) throw ConfigError("batch size must be positive");
  if (config.seeds.empty()) throw ConfigError("at least one seed is required");
  if (config.buffer_capacity == 0) throw ConfigError("buffer capacity must be positive");
  if (config.algo.algorithm == Algorithm::kMaddpgK && !config.stores_index_sets()) {
    throw ConfigError("maddpg_k requires stored index sets");
  }
}

void resize_agents(env::EnvConfig& config, int n) {
  if (n < 1) throw ConfigError("agent count must be positive");
  switch (config.id) {
    case env::EnvId::kSpread:
    case env::EnvId::kAdversary:
      config.n_good = n;
      config.n_landmarks = n;
      break;
    case env::EnvId::kTag:
      config.n_good = n;
      break;
  }
}

std::vector<std::string> agent_labels(const std::vector<env::EntityKind>& kinds) {
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < kinds.size(); ++i) {
    labels.push_back(std::string(env::kind_name(kinds[i])) + "_" + std::to_string(i));
  }
  return labels;
}

Trainer::Trainer(const ExperimentConfig& config, std::uint64_t seed)
    : config_((validate(config), config)),
      seed_(seed),
      env_rng_(make_stream(seed, kEnvStream)),
      init_rng_(make_stream(seed, kInitStream)),
      explore_rng_(make_stream(seed, kExploreStream)),
      sample_rng_(make_stream(seed, kSampleStream)),
      learners_(config_.algo, agent_specs(config_.env), init_rng_),
      buffer_(config_.buffer_capacity),
      metric_(metric_from_name(config_.algo.metric)),
      k_per_agent_(learners_.k_per_agent()) {}

IndexSets Trainer::index_sets_for(const env::WorldState& state) const {
  const auto positions = env::agent_positions(state);
  return compute_index_sets(positions, k_per_agent_, metric_);
}

EpisodeRow Trainer::run_episode() {
  const auto start = std::chrono::steady_clock::now();
  const bool store_sets = config_.stores_index_sets();
  auto [state, observations] = env::reset(config_.env, env_rng_());
  IndexSets current_sets = store_sets ? index_sets_for(state) : IndexSets{};

  EpisodeRow row;
  row.episode = episode_;
  row.agent_returns.assign(static_cast<std::size_t>(state.agent_count), 0.0);
  if (trajectory_out != nullptr) env::write_trajectory_rows(*trajectory_out, state);

  bool done = false;
  while (!done) {
    auto actions = learners_.select_actions(observations, warmup(), explore_rng_);
    env::StepResult result = env::step(config_.env, state, actions);
    if (trajectory_out != nullptr) env::write_trajectory_rows(*trajectory_out, state);

    Transition transition;
    transition.observations = std::move(observations);
    transition.actions = std::move(actions);
    transition.rewards = result.rewards;
    transition.next_observations = result.observations;
    if (store_sets) {
      IndexSets next_sets = index_sets_for(state);
      transition.index_sets = std::move(current_sets);
      transition.next_index_sets = next_sets;
      current_sets = std::move(next_sets);
    }
    buffer_.push(std::move(transition));

    for (std::size_t i = 0; i < row.agent_returns.size(); ++i) {
      row.agent_returns[i] += result.rewards(static_cast<Eigen::Index>(i));
    }
    observations = std::move(result.observations);
    done = result.done;

    ++env_steps_;
    if (env_steps_ % config_.update_period == 0) {
      auto stats = learners_.update_all(buffer_, static_cast<std::size_t>(config_.batch_size), sample_rng_);
      if (stats) {
        ++updates_performed_;
        if (on_update) on_update(*this, *stats);
      } else {
        ++updates_skipped_;
      }
    }
  }

  elapsed_ += std::chrono::steady_clock::now() - start;
  for (double r : row.agent_returns) row.total_return += r;
  row.env_steps = env_steps_;
  row.wall_ms = std::chrono::duration<double, std::milli>(elapsed_).count();
  ++episode_;
  return row;
}

RunLog run_training(const ExperimentConfig& config, std::uint64_t seed) {
  RunLog log;
  log.seed = seed;
  log.agent_kinds = env::agent_kinds(config.env);
  Trainer trainer(config, seed);
  try {
    for (int e = 0; e < config.episodes; ++e) log.rows.push_back(trainer.run_episode());
  } catch (const TrainingError& error) {
    log.error = error.what();
  }
  return log;
}

void keep_large_allocations_on_heap() {
#if defined(__GLIBC__)
  constexpr int kThreshold = 1 << 30;
  mallopt(M_MMAP_THRESHOLD, kThreshold);
  mallopt(M_TRIM_THRESHOLD, kThreshold);
#endif
}

AggregateLog aggregate_runs(const std::vector<RunLog>& logs) {
  if (logs.empty()) throw ConfigError("aggregate_runs: no logs");
  const std::size_t episodes = logs.front().rows.size();
  for (const auto& log : logs) {
    if (log.rows.size() != episodes) throw ConfigError("aggregate_runs: logs have different episode counts");
  }
  AggregateLog aggregate;
  aggregate.runs = logs.size();
  const auto runs = static_cast<double>(logs.size());
  for (std::size_t e = 0; e < episodes; ++e) {
    AggregateRow row;
    row.episode = logs.front().rows[e].episode;
    row.min_total = std::numeric_limits<double>::infinity();
    row.max_total = -std::numeric_limits<double>::infinity();
    double sum = 0.0;
    for (const auto& log : logs) {
      const EpisodeRow& r = log.rows[e];
      sum += r.total_return;
      row.min_total = std::min(row.min_total, r.total_return);
      row.max_total = std::max(row.max_total, r.total_return);
      for (std::size_t i = 0; i < r.agent_returns.size() && i < log.agent_kinds.size(); ++i) {
        if (log.agent_kinds[i] == env::EntityKind::kAdversary) {
          row.mean_adversary += r.agent_returns[i];
        } else {
          row.mean_good += r.agent_returns[i];
        }
      }
    }
    row.mean_total = sum / runs;
    row.mean_good /= runs;
    row.mean_adversary /= runs;
    double squares = 0.0;
    for (const auto& log : logs) {
      const double d = log.rows[e].total_return - row.mean_total;
      squares += d * d;
    }
    row.std_total = std::sqrt(squares / runs);
    // Keep the mean inside [min, max] despite rounding.
    row.mean_total = std::clamp(row.mean_total, row.min_total, row.max_total);
    aggregate.rows.push_back(row);
  }
  return aggregate;
}

std::vector<ScalingRow> run_scaling_benchmark(const ExperimentConfig& config, const std::vector<int>& n_values,
                                              std::ostream* progress) {
  std::vector<ScalingRow> rows;
  const std::uint64_t seed = config.seeds.empty() ? 0 : config.seeds.front();
  for (int n : n_values) {
    for (Algorithm algorithm : {Algorithm::kMaddpg, Algorithm::kMaddpgK}) {
      ExperimentConfig run = config;
      resize_agents(run.env, n);
      run.algo.algorithm = algorithm;
      run.store_index_sets = algorithm == Algorithm::kMaddpgK;
      Trainer trainer(run, seed);
      double wall_ms = 0.0;
      for (int e = 0; e < run.episodes; ++e) wall_ms = trainer.run_episode().wall_ms;
      ScalingRow row;
      row.algorithm = algorithm;
      row.n = n;
      row.critic_input_width = trainer.learners().learner(0).critic_input_size();
      row.episodes = run.episodes;
      row.seconds_per_100_episodes = wall_ms / 1000.0 * 100.0 / run.episodes;
      if (progress != nullptr) {
        *progress << algorithm_name(algorithm) << " n=" << n << " width=" << row.critic_input_width << " "
                  << row.seconds_per_100_episodes << " s/100ep (" << trainer.updates_performed()
                  << " updates)" << std::endl;
      }
      rows.push_back(row);
    }
  }
  return rows;
}

double final_mean_return(const RunLog& log, int window) {
  if (log.rows.empty() || window <= 0) throw ConfigError("final_mean_return: empty log or window");
  const std::size_t count = std::min(log.rows.size(), static_cast<std::size_t>(window));
  double sum = 0.0;
  for (std::size_t i = log.rows.size() - count; i < log.rows.size(); ++i) sum += log.rows[i].total_return;
  return sum / static_cast<double>(count);
}

// ---------------------------------------------------------------------------
// CSV

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream stream(line);
  while (std::getline(stream, field, sep)) fields.push_back(field);
  if (!line.empty() && line.back() == sep) fields.emplace_back();
  return fields;
}

env::EntityKind kind_from_label(const std::string& label) {
  if (label.rfind("adversary", 0) == 0) return env::EntityKind::kAdversary;
  if (label.rfind("good", 0) == 0) return env::EntityKind::kGoodAgent;
  throw ConfigError("run log: unknown agent label '" + label + "'");
}

}  // namespace

void write_run_log(std::ostream& out, const RunLog& log, const std::string& config_json) {
  out << "# maddpgk run_log v1\n";
  out << "# seed: " << log.seed << '\n';
  if (!config_json.empty()) out << "# config: " << config_json << '\n';
  out << "episode";
  for (const auto& label : agent_labels(log.agent_kinds)) out << ",return_" << label;
  out << ",total_return,env_steps,wall_ms\n";
  out << std::setprecision(17);
  for (const auto& row : log.rows) {
    out << row.episode;
    for (double r : row.agent_returns) out << ',' << r;
    out << ',' << row.total_return << ',' << row.env_steps << ',' << row.wall_ms << '\n';
  }
  if (log.error) out << "# error: " << *log.error << '\n';
}

RunLog read_run_log(std::istream& in) {
  RunLog log;
  std::string line;
  bool have_header = false;
  std::size_t agents = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (line.rfind("# seed: ", 0) == 0) log.seed = std::stoull(line.substr(8));
      if (line.rfind("# error: ", 0) == 0) log.error = line.substr(9);
      continue;
    }
    const auto fields = split(line, ',');
    if (!have_header) {
      if (fields.size() < 4 || fields.front() != "episode") throw ConfigError("run log: bad column header");
      for (std::size_t i = 1; i + 3 < fields.size(); ++i) {
        if (fields[i].rfind("return_", 0) != 0) throw ConfigError("run log: bad column '" + fields[i] + "'");
        log.agent_kinds.push_back(kind_from_label(fields[i].substr(7)));
      }
      agents = log.agent_kinds.size();
      have_header = true;
      continue;
    }
    if (fields.size() != agents + 4) throw ConfigError("run log: row has wrong field count");
    EpisodeRow row;
    row.episode = std::stoi(fields[0]);
    for (std::size_t i = 0; i < agents; ++i) row.agent_returns.push_back(std::stod(fields[1 + i]));
    row.total_return = std::stod(fields[1 + agents]);
    row.env_steps = std::stoll(fields[2 + agents]);
    row.wall_ms = std::stod(fields[3 + agents]);
    if (!log.rows.empty() && row.episode <= log.rows.back().episode) {
      throw ConfigError("run log: episode indices must increase");
    }
    log.rows.push_back(std::move(row));
  }
  if (!have_header) throw ConfigError("run log: missing column header");
  return log;
}

void write_aggregate(std::ostream& out, const AggregateLog& aggregate) {
  out << "# maddpgk aggregate v1\n";
  out << "episode,mean_total_return,std_total_return,min_total_return,max_total_return,"
         "mean_good_return,mean_adversary_return,runs\n";
  out << std::setprecision(17);
  for (const auto& row : aggregate.rows) {
    out << row.episode << ',' << row.mean_total << ',' << row.std_total << ',' << row.min_total << ','
        << row.max_total << ',' << row.mean_good << ',' << row.mean_adversary << ',' << aggregate.runs << '\n';
  }
}

void write_scaling(std::ostream& out, const std::vector<ScalingRow>& rows) {
  out << "# maddpgk scaling v1\n";
  out << "algorithm,n,critic_input_width,episodes,seconds_per_100_episodes\n";
  out << std::setprecision(17);
  for (const auto& row : rows) {
    out << algorithm_name(row.algorithm) << ',' << row.n << ',' << row.critic_input_width << ','
        << row.episodes << ',' << row.seconds_per_100_episodes << '\n';
  }
}

}  // namespace maddpgk
