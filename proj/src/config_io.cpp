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

// JSON form of ExperimentConfig. Every key is optional when reading; missing
// keys keep the defaults of the chosen environment. An infinite max speed is
// written as null.

#include <cmath>
#include <string>

#include <json.hpp>

#include "maddpgk/errors.hpp"
#include "maddpgk/harness.hpp"

namespace maddpgk {

using nlohmann::json;

namespace {

json speed_to_json(double speed) { return std::isinf(speed) ? json(nullptr) : json(speed); }

json kind_to_json(const env::KindConstants& kind) {
  return {{"radius", kind.radius}, {"max_speed", speed_to_json(kind.max_speed)}};
}

void kind_from_json(const json& j, env::KindConstants& kind) {
  if (j.contains("radius")) kind.radius = j.at("radius").get<double>();
  if (j.contains("max_speed")) {
    kind.max_speed = j.at("max_speed").is_null() ? env::kUnlimitedSpeed : j.at("max_speed").get<double>();
  }
}

json env_to_json(const env::EnvConfig& c) {
  return {{"id", env::env_name(c.id)},
          {"n_good", c.n_good},
          {"n_adversaries", c.n_adversaries},
          {"n_landmarks", c.n_landmarks},
          {"episode_length", c.episode_length},
          {"spawn_extent", c.spawn_extent},
          {"landmark_spawn_extent", c.landmark_spawn_extent},
          {"seed", c.seed},
          {"physics",
           {{"time_step", c.physics.time_step},
            {"damping", c.physics.damping},
            {"contact_force", c.physics.contact_force},
            {"contact_margin", c.physics.contact_margin},
            {"sensitivity", c.physics.sensitivity},
            {"mass", c.physics.mass}}},
          {"good", kind_to_json(c.good_kind)},
          {"adversary", kind_to_json(c.adversary_kind)},
          {"landmark", kind_to_json(c.landmark_kind)}};
}

env::EnvConfig env_from_json(const json& j) {
  env::EnvConfig c;
  const env::EnvId id = env::env_from_name(j.value("id", std::string("spread")));
  switch (id) {
    case env::EnvId::kSpread: c = env::EnvConfig::spread(3); break;
    case env::EnvId::kTag: c = env::EnvConfig::tag(); break;
    case env::EnvId::kAdversary: c = env::EnvConfig::adversary(); break;
  }
  if (j.contains("n")) resize_agents(c, j.at("n").get<int>());
  c.n_good = j.value("n_good", c.n_good);
  c.n_adversaries = j.value("n_adversaries", c.n_adversaries);
  c.n_landmarks = j.value("n_landmarks", c.n_landmarks);
  c.episode_length = j.value("episode_length", c.episode_length);
  c.spawn_extent = j.value("spawn_extent", c.spawn_extent);
  c.landmark_spawn_extent = j.value("landmark_spawn_extent", c.landmark_spawn_extent);
  c.seed = j.value("seed", c.seed);
  if (j.contains("physics")) {
    const json& p = j.at("physics");
    c.physics.time_step = p.value("time_step", c.physics.time_step);
    c.physics.damping = p.value("damping", c.physics.damping);
    c.physics.contact_force = p.value("contact_force", c.physics.contact_force);
    c.physics.contact_margin = p.value("contact_margin", c.physics.contact_margin);
    c.physics.sensitivity = p.value("sensitivity", c.physics.sensitivity);
    c.physics.mass = p.value("mass", c.physics.mass);
  }
  if (j.contains("good")) kind_from_json(j.at("good"), c.good_kind);
  if (j.contains("adversary")) kind_from_json(j.at("adversary"), c.adversary_kind);
  if (j.contains("landmark")) kind_from_json(j.at("landmark"), c.landmark_kind);
  return c;
}

const char* slot_order_name(SlotOrder order) {
  return order == SlotOrder::kAgentIndex ? "agent_index" : "self_first";
}

SlotOrder slot_order_from_name(const std::string& name) {
  if (name == "self_first") return SlotOrder::kSelfFirst;
  if (name == "agent_index") return SlotOrder::kAgentIndex;
  throw ConfigError("unknown slot order '" + name + "'");
}

json algo_to_json(const AlgoConfig& c) {
  return {{"algorithm", algorithm_name(c.algorithm)},
          {"k", {{"good", c.k.good}, {"adversary", c.k.adversary}}},
          {"gamma", c.gamma},
          {"tau", c.tau},
          {"learning_rate", c.learning_rate},
          {"noise_sigma", c.noise_sigma},
          {"clip_norm", c.clip_norm},
          {"hidden", c.hidden},
          {"metric", c.metric},
          {"slot_order", slot_order_name(c.slot_order)}};
}

AlgoConfig algo_from_json(const json& j) {
  AlgoConfig c;
  if (j.contains("algorithm")) c.algorithm = algorithm_from_name(j.at("algorithm").get<std::string>());
  if (j.contains("k")) {
    const json& k = j.at("k");
    if (k.is_number_integer()) {
      c.k.good = c.k.adversary = k.get<int>();
    } else {
      c.k.good = k.value("good", c.k.good);
      c.k.adversary = k.value("adversary", c.k.adversary);
    }
  }
  c.gamma = j.value("gamma", c.gamma);
  c.tau = j.value("tau", c.tau);
  c.learning_rate = j.value("learning_rate", c.learning_rate);
  c.noise_sigma = j.value("noise_sigma", c.noise_sigma);
  c.clip_norm = j.value("clip_norm", c.clip_norm);
  if (j.contains("hidden")) c.hidden = j.at("hidden").get<std::vector<int>>();
  c.metric = j.value("metric", c.metric);
  if (j.contains("slot_order")) c.slot_order = slot_order_from_name(j.at("slot_order").get<std::string>());
  return c;
}

}  // namespace

std::string to_json_string(const ExperimentConfig& config) {
  json j = {{"env", env_to_json(config.env)},
            {"algo", algo_to_json(config.algo)},
            {"seeds", config.seeds},
            {"episodes", config.episodes},
            {"update_period", config.update_period},
            {"batch_size", config.batch_size},
            {"buffer_capacity", config.buffer_capacity},
            {"output_dir", config.output_dir.string()},
            {"benchmark", config.benchmark},
            {"n_list", config.n_list},
            {"store_index_sets", config.store_index_sets ? json(*config.store_index_sets) : json(nullptr)},
            {"dump_trajectory", config.dump_trajectory}};
  return j.dump();
}

ExperimentConfig config_from_json_string(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& error) {
    throw ConfigError(std::string("malformed config: ") + error.what());
  }
  if (!j.is_object()) throw ConfigError("malformed config: top level must be an object");
  ExperimentConfig c;
  try {
    if (j.contains("env")) c.env = env_from_json(j.at("env"));
    if (j.contains("algo")) c.algo = algo_from_json(j.at("algo"));
    if (j.contains("seeds")) c.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    c.episodes = j.value("episodes", c.episodes);
    c.update_period = j.value("update_period", c.update_period);
    c.batch_size = j.value("batch_size", c.batch_size);
    c.buffer_capacity = j.value("buffer_capacity", c.buffer_capacity);
    if (j.contains("output_dir")) c.output_dir = j.at("output_dir").get<std::string>();
    c.benchmark = j.value("benchmark", c.benchmark);
    if (j.contains("n_list")) c.n_list = j.at("n_list").get<std::vector<int>>();
    if (j.contains("store_index_sets") && !j.at("store_index_sets").is_null()) {
      c.store_index_sets = j.at("store_index_sets").get<bool>();
    }
    c.dump_trajectory = j.value("dump_trajectory", c.dump_trajectory);
  } catch (const json::exception& error) {
    throw ConfigError(std::string("malformed config: ") + error.what());
  }
  return c;
}

}  // namespace maddpgk
