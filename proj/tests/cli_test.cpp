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

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "maddpgk/cli.hpp"
#include "maddpgk/harness.hpp"

namespace maddpgk {
namespace {

namespace fs = std::filesystem;

struct Outcome {
  int code = 0;
  std::string out;
  std::string err;
};

Outcome run(std::vector<std::string> args) {
  args.insert(args.begin(), "maddpgk");
  std::vector<const char*> argv;
  for (const auto& arg : args) argv.push_back(arg.c_str());
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("maddpgk_cli_test_" + name);
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

TEST_CASE("missing environment is a usage error") {
  const Outcome outcome = run({"--algo", "maddpg"});
  CHECK(outcome.code == kExitUsage);
  CHECK(outcome.err.find("--env") != std::string::npos);
}

TEST_CASE("unknown names and malformed flags are usage errors") {
  CHECK(run({"--env", "soccer"}).code == kExitUsage);
  CHECK(run({"--env", "spread", "--algo", "ppo"}).code == kExitUsage);
  CHECK(run({"--env", "spread", "--episodes", "many"}).code == kExitUsage);
  CHECK(run({"--env", "spread", "--episodes", "0"}).code == kExitUsage);
  CHECK(run({"--help"}).code == kExitOk);
}

TEST_CASE("malformed config file is a usage error") {
  const fs::path dir = fresh_dir("config");
  fs::create_directories(dir);
  std::ofstream(dir / "bad.json") << "{\"env\": {\"name\": \"spread\", \"n\": -2}";
  CHECK(run({"--config", (dir / "bad.json").string()}).code == kExitUsage);
  CHECK(run({"--config", (dir / "missing.json").string()}).code == kExitUsage);
  fs::remove_all(dir);
}

TEST_CASE("training writes run logs, aggregate and config") {
  const fs::path dir = fresh_dir("train");
  const Outcome outcome = run({"--env", "spread", "--algo", "maddpg_k", "--n", "3", "--k", "1", "--seeds", "2",
                               "--seed-base", "5", "--episodes", "3", "--batch", "16", "--update-period", "20",
                               "--out", dir.string(), "--save-checkpoints", "--dump-trajectory"});
  CHECK(outcome.code == kExitOk);
  CHECK(outcome.out.find("algorithm=maddpg_k") != std::string::npos);
  for (const char* name : {"run_5.csv", "run_6.csv", "aggregate.csv", "config.json", "trajectory_5.csv",
                           "checkpoints_6/actor_0.txt"}) {
    CHECK_MESSAGE(fs::exists(dir / name), name);
  }
  std::ifstream log_in(dir / "run_6.csv");
  const RunLog log = read_run_log(log_in);
  CHECK(log.seed == 6);
  CHECK(log.rows.size() == 3);
  const ExperimentConfig config = config_from_json_string(slurp(dir / "config.json"));
  CHECK(config.algo.k.good == 1);
  CHECK(config.episodes == 3);
  CHECK(slurp(dir / "trajectory_5.csv").rfind("step,entity,x,y,vx,vy\n", 0) == 0);

  SUBCASE("aggregate mode reads the run logs back") {
    const fs::path agg_dir = dir / "again";
    const Outcome agg = run({"--aggregate", (dir / "run_5.csv").string(), (dir / "run_6.csv").string(), "--out",
                             agg_dir.string()});
    CHECK(agg.code == kExitOk);
    CHECK(slurp(agg_dir / "aggregate.csv") == slurp(dir / "aggregate.csv"));
  }
  fs::remove_all(dir);
}

TEST_CASE("config file with flag overrides") {
  const fs::path dir = fresh_dir("override");
  fs::create_directories(dir);
  ExperimentConfig base;
  base.env = env::EnvConfig::adversary(2);
  base.episodes = 50;
  base.seeds = {0, 1, 2};
  std::ofstream(dir / "config.json") << to_json_string(base);
  const Outcome outcome = run({"--config", (dir / "config.json").string(), "--episodes", "1", "--seeds", "1",
                               "--algo", "ddpg", "--out", (dir / "out").string()});
  CHECK(outcome.code == kExitOk);
  const ExperimentConfig used = config_from_json_string(slurp(dir / "out" / "config.json"));
  CHECK(used.env.id == env::EnvId::kAdversary);
  CHECK(used.episodes == 1);
  CHECK(used.algo.algorithm == Algorithm::kDdpg);
  fs::remove_all(dir);
}

TEST_CASE("benchmark dispatch writes the scaling table") {
  const fs::path dir = fresh_dir("bench");
  const Outcome outcome = run({"--benchmark", "--n-list", "3,4", "--episodes", "1", "--batch", "16",
                               "--update-period", "20", "--out", dir.string()});
  CHECK(outcome.code == kExitOk);
  const std::string csv = slurp(dir / "scaling.csv");
  CHECK(csv.find("\nalgorithm,n,critic_input_width,episodes,seconds_per_100_episodes\n") != std::string::npos);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 6);
  CHECK(csv.find("maddpg_k,4,") != std::string::npos);
  fs::remove_all(dir);
}

}  // namespace
}  // namespace maddpgk
