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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "maddpgk/errors.hpp"
#include "maddpgk/harness.hpp"

namespace maddpgk {
namespace {

ExperimentConfig small_config(Algorithm algorithm = Algorithm::kMaddpgK) {
  ExperimentConfig config;
  config.env = env::EnvConfig::spread(3);
  config.algo.algorithm = algorithm;
  config.algo.hidden = {16, 16};
  config.seeds = {0};
  config.episodes = 4;
  config.batch_size = 32;
  config.update_period = 25;
  return config;
}

RunLog make_log(const std::vector<double>& totals, std::uint64_t seed = 0) {
  RunLog log;
  log.seed = seed;
  log.agent_kinds = {env::EntityKind::kAdversary, env::EntityKind::kGoodAgent};
  for (std::size_t e = 0; e < totals.size(); ++e) {
    EpisodeRow row;
    row.episode = static_cast<int>(e);
    row.agent_returns = {totals[e] / 4.0, 3.0 * totals[e] / 4.0};
    row.total_return = totals[e];
    row.env_steps = 25 * static_cast<std::int64_t>(e + 1);
    row.wall_ms = 1.5 * static_cast<double>(e);
    log.rows.push_back(row);
  }
  return log;
}

TEST_CASE("one episode writes one row and 25 transitions") {
  ExperimentConfig config = small_config();
  config.episodes = 1;
  const RunLog log = run_training(config, 0);
  REQUIRE(log.rows.size() == 1);
  CHECK(log.rows[0].env_steps == 25);
  Trainer trainer(config, 0);
  trainer.run_episode();
  CHECK(trainer.buffer().size() == 25);
  CHECK(trainer.env_steps() == 25);
  CHECK(trainer.buffer().at(0).index_sets.size() == 3);
}

TEST_CASE("fixed seed reproduces returns exactly") {
  for (Algorithm algorithm : {Algorithm::kDdpg, Algorithm::kMaddpg, Algorithm::kMaddpgK}) {
    const ExperimentConfig config = small_config(algorithm);
    const RunLog a = run_training(config, 7);
    const RunLog b = run_training(config, 7);
    const RunLog c = run_training(config, 8);
    REQUIRE(a.rows.size() == b.rows.size());
    for (std::size_t e = 0; e < a.rows.size(); ++e) {
      CHECK(a.rows[e].agent_returns == b.rows[e].agent_returns);
      CHECK(a.rows[e].env_steps == b.rows[e].env_steps);
    }
    CHECK(a.rows.back().total_return != c.rows.back().total_return);
  }
}

TEST_CASE("updates wait for a full batch while the schedule advances") {
  ExperimentConfig config = small_config();
  config.update_period = 100;
  config.batch_size = 150;
  config.episodes = 8;
  Trainer trainer(config, 1);
  std::vector<std::int64_t> update_steps;
  trainer.on_update = [&](const Trainer& t, const UpdateStats& stats) {
    update_steps.push_back(t.env_steps());
    CHECK(stats.critic_loss.size() == 3);
  };
  for (int e = 0; e < 4; ++e) trainer.run_episode();
  // Step 100 finds 100 < 150 transitions; the next chance is step 200.
  CHECK(trainer.updates_skipped() == 1);
  CHECK(trainer.updates_performed() == 0);
  CHECK(trainer.warmup());
  for (int e = 0; e < 4; ++e) trainer.run_episode();
  CHECK(trainer.updates_skipped() == 1);
  CHECK(trainer.updates_performed() == 1);
  CHECK(update_steps == std::vector<std::int64_t>{200});
  CHECK_FALSE(trainer.warmup());
}

TEST_CASE("index sets are stored only when read") {
  Trainer joint(small_config(Algorithm::kMaddpg), 0);
  joint.run_episode();
  CHECK_FALSE(joint.buffer().at(0).has_index_sets());
  ExperimentConfig forced = small_config(Algorithm::kMaddpg);
  forced.store_index_sets = true;
  Trainer stored(forced, 0);
  stored.run_episode();
  CHECK(stored.buffer().at(3).has_index_sets());
  // Consecutive transitions share the boundary neighborhood.
  CHECK(stored.buffer().at(3).next_index_sets == stored.buffer().at(4).index_sets);
  ExperimentConfig broken = small_config(Algorithm::kMaddpgK);
  broken.store_index_sets = false;
  CHECK_THROWS_AS(Trainer(broken, 0), ConfigError);
}

TEST_CASE("aggregate statistics") {
  SUBCASE("one log") {
    const AggregateLog agg = aggregate_runs({make_log({1.0, 2.0})});
    CHECK(agg.runs == 1);
    CHECK(agg.rows[1].mean_total == 2.0);
    CHECK(agg.rows[1].std_total == 0.0);
  }
  SUBCASE("two logs with returns 1 and 3") {
    const AggregateLog agg = aggregate_runs({make_log({1.0}), make_log({3.0})});
    CHECK(agg.rows[0].mean_total == doctest::Approx(2.0));
    CHECK(agg.rows[0].std_total == doctest::Approx(1.0));
    CHECK(agg.rows[0].min_total == 1.0);
    CHECK(agg.rows[0].max_total == 3.0);
    CHECK(agg.rows[0].mean_adversary == doctest::Approx(0.5));
    CHECK(agg.rows[0].mean_good == doctest::Approx(1.5));
  }
  SUBCASE("ten logs") {
    std::vector<RunLog> logs;
    for (int s = 0; s < 10; ++s) logs.push_back(make_log({0.1 * s, -0.3 * s, 7.0}, static_cast<std::uint64_t>(s)));
    const AggregateLog agg = aggregate_runs(logs);
    CHECK(agg.runs == 10);
    CHECK(agg.rows[0].mean_total == doctest::Approx(0.45));
    CHECK(agg.rows[0].std_total == doctest::Approx(std::sqrt(8.25) * 0.1));
    for (const auto& row : agg.rows) {
      CHECK(row.mean_total >= row.min_total);
      CHECK(row.mean_total <= row.max_total);
    }
    CHECK(agg.rows[2].std_total == 0.0);
  }
  SUBCASE("ragged or empty input") {
    CHECK_THROWS_AS(aggregate_runs({make_log({1.0}), make_log({1.0, 2.0})}), ConfigError);
    CHECK_THROWS_AS(aggregate_runs({}), ConfigError);
  }
}

TEST_CASE("run log CSV round trip") {
  RunLog log = make_log({0.1, -2.5e-7, 1.0 / 3.0}, 42);
  log.error = "non-finite reward";
  std::stringstream stream;
  write_run_log(stream, log, "{\"episodes\":3}");
  const RunLog back = read_run_log(stream);
  CHECK(back.seed == 42);
  CHECK(back.agent_kinds == log.agent_kinds);
  REQUIRE(back.rows.size() == 3);
  for (std::size_t e = 0; e < 3; ++e) {
    CHECK(back.rows[e].agent_returns == log.rows[e].agent_returns);
    CHECK(back.rows[e].total_return == log.rows[e].total_return);
    CHECK(back.rows[e].env_steps == log.rows[e].env_steps);
  }
  CHECK(back.error == log.error);
  std::istringstream bad("episode,foo,total_return,env_steps,wall_ms\n0,1,1,1,1\n");
  CHECK_THROWS_AS(read_run_log(bad), ConfigError);
  std::istringstream empty("# nothing\n");
  CHECK_THROWS_AS(read_run_log(empty), ConfigError);
}

TEST_CASE("run log header names every agent") {
  std::ostringstream out;
  RunLog log;
  log.agent_kinds = env::agent_kinds(env::EnvConfig::tag(1, 3, 2));
  write_run_log(out, log);
  CHECK(out.str().find("episode,return_adversary_0,return_adversary_1,return_adversary_2,return_good_3,"
                       "total_return,env_steps,wall_ms") != std::string::npos);
}

TEST_CASE("aggregate and scaling CSV columns") {
  std::ostringstream agg;
  write_aggregate(agg, aggregate_runs({make_log({1.0})}));
  CHECK(agg.str().find("episode,mean_total_return,std_total_return,min_total_return,max_total_return,"
                       "mean_good_return,mean_adversary_return,runs\n0,1,0,1,1,0.75,0.25,1\n") != std::string::npos);
  std::ostringstream scaling;
  write_scaling(scaling, {ScalingRow{Algorithm::kMaddpgK, 5, 81, 200, 1.5}});
  CHECK(scaling.str() == "# maddpgk scaling v1\nalgorithm,n,critic_input_width,episodes,seconds_per_100_episodes\nmaddpg_k,5,81,200,1.5\n");
}

TEST_CASE("JSON config round trip") {
  ExperimentConfig config = small_config();
  config.env = env::EnvConfig::tag(1, 3, 2);
  config.algo.k = {1, 2};
  config.algo.slot_order = SlotOrder::kAgentIndex;
  config.seeds = {3, 9};
  config.n_list = {3, 4};
  config.store_index_sets = true;
  const ExperimentConfig back = config_from_json_string(to_json_string(config));
  CHECK(to_json_string(back) == to_json_string(config));
  CHECK(back.env.n_adversaries == 3);
  CHECK(back.algo.k.adversary == 2);
  CHECK(back.algo.slot_order == SlotOrder::kAgentIndex);
  CHECK(back.seeds == config.seeds);
  CHECK(std::isinf(back.env.landmark_kind.max_speed));
  CHECK_THROWS_AS(config_from_json_string("{not json"), ConfigError);
  CHECK_THROWS_AS(config_from_json_string("{\"algo\": {\"algorithm\": \"ppo\"}}"), ConfigError);
  CHECK_THROWS_AS(config_from_json_string("{\"episodes\": \"many\"}"), ConfigError);
}

TEST_CASE("tiny scaling benchmark") {
  ExperimentConfig config = small_config();
  config.episodes = 2;
  const auto rows = run_scaling_benchmark(config, {3, 4});
  REQUIRE(rows.size() == 4);
  CHECK(rows[0].algorithm == Algorithm::kMaddpg);
  CHECK(rows[1].algorithm == Algorithm::kMaddpgK);
  const Eigen::Index o3 = env::observation_size(env::EnvConfig::spread(3), 0);
  const Eigen::Index o4 = env::observation_size(env::EnvConfig::spread(4), 0);
  CHECK(rows[0].critic_input_width == 3 * (o3 + 5));
  CHECK(rows[1].critic_input_width == 3 * (o3 + 5));
  CHECK(rows[2].critic_input_width == 4 * (o4 + 5));
  CHECK(rows[3].critic_input_width == 3 * (o4 + 5));
  for (const auto& row : rows) {
    CHECK(row.episodes == 2);
    CHECK(row.seconds_per_100_episodes > 0.0);
  }
}

TEST_CASE("resize and validation") {
  env::EnvConfig spread = env::EnvConfig::spread(3);
  resize_agents(spread, 7);
  CHECK(spread.agent_count() == 7);
  CHECK(spread.n_landmarks == 7);
  env::EnvConfig tag = env::EnvConfig::tag(1, 3, 2);
  resize_agents(tag, 4);
  CHECK(tag.agent_count() == 7);
  CHECK_THROWS_AS(resize_agents(tag, 0), ConfigError);
  ExperimentConfig bad = small_config();
  bad.episodes = 0;
  CHECK_THROWS_AS(validate(bad), ConfigError);
  CHECK(final_mean_return(make_log({1.0, 2.0, 3.0}), 2) == doctest::Approx(2.5));
  CHECK(agent_labels({env::EntityKind::kGoodAgent}) == std::vector<std::string>{"good_0"});
}

}  // namespace
}  // namespace maddpgk
