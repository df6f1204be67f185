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

#include "maddpgk/particle_env.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "maddpgk/errors.hpp"

namespace maddpgk::env {

const char* env_name(EnvId id) {
  switch (id) {
    case EnvId::kTag: return "tag";
    case EnvId::kSpread: return "spread";
    case EnvId::kAdversary: return "adversary";
  }
  return "spread";
}

EnvId env_from_name(const std::string& name) {
  if (name == "tag") return EnvId::kTag;
  if (name == "spread") return EnvId::kSpread;
  if (name == "adversary") return EnvId::kAdversary;
  throw ConfigError("unknown environment '" + name + "'");
}

const char* kind_name(EntityKind kind) {
  switch (kind) {
    case EntityKind::kGoodAgent: return "good";
    case EntityKind::kAdversary: return "adversary";
    case EntityKind::kLandmark: return "landmark";
    case EntityKind::kObstacle: return "obstacle";
  }
  return "good";
}

EnvConfig EnvConfig::spread(int n) {
  EnvConfig config;
  config.id = EnvId::kSpread;
  config.n_good = n;
  config.n_adversaries = 0;
  config.n_landmarks = n;
  config.good_kind.radius = 0.05;
  config.landmark_kind.radius = 0.15;
  return config;
}

EnvConfig EnvConfig::tag(int n_good, int n_adversaries, int n_obstacles) {
  EnvConfig config;
  config.id = EnvId::kTag;
  config.n_good = n_good;
  config.n_adversaries = n_adversaries;
  config.n_landmarks = n_obstacles;
  config.good_kind = {0.05, 1.3};
  config.adversary_kind = {0.075, 1.0};
  config.landmark_kind.radius = 0.2;
  config.landmark_spawn_extent = 0.9;
  return config;
}

EnvConfig EnvConfig::adversary(int n_good) {
  EnvConfig config;
  config.id = EnvId::kAdversary;
  config.n_good = n_good;
  config.n_adversaries = 1;
  config.n_landmarks = n_good;
  config.good_kind.radius = 0.05;
  config.adversary_kind.radius = 0.05;
  config.landmark_kind.radius = 0.08;
  return config;
}

void validate(const EnvConfig& config) {
  if (config.n_good < 0 || config.n_adversaries < 0 || config.n_landmarks < 0) {
    throw ConfigError("entity counts must be non-negative");
  }
  if (config.agent_count() < 1) throw ConfigError("at least one agent is required");
  if (config.episode_length <= 0) throw ConfigError("episode length must be positive");
  const auto& p = config.physics;
  if (!(p.time_step > 0) || !(p.damping >= 0 && p.damping <= 1) || !(p.mass > 0) ||
      !(p.contact_margin > 0) || !(p.contact_force >= 0) || !(p.sensitivity >= 0)) {
    throw ConfigError("invalid physics constants");
  }
  for (const KindConstants* kind : {&config.good_kind, &config.adversary_kind, &config.landmark_kind}) {
    if (!(kind->radius >= 0) || !(kind->max_speed > 0)) throw ConfigError("invalid per-kind constants");
  }
  switch (config.id) {
    case EnvId::kSpread:
      if (config.n_adversaries != 0) throw ConfigError("spread has no adversaries");
      break;
    case EnvId::kTag:
      break;
    case EnvId::kAdversary:
      if (config.n_adversaries != 1) throw ConfigError("adversary env requires exactly one adversary");
      if (config.n_landmarks < 1) throw ConfigError("adversary env requires at least one landmark");
      break;
  }
}

std::vector<EntityKind> agent_kinds(const EnvConfig& config) {
  std::vector<EntityKind> kinds;
  for (int i = 0; i < config.n_adversaries; ++i) kinds.push_back(EntityKind::kAdversary);
  for (int i = 0; i < config.n_good; ++i) kinds.push_back(EntityKind::kGoodAgent);
  return kinds;
}

int observation_size(const EnvConfig& config, int agent) {
  const int n = config.agent_count();
  const int base = 4 + 2 * config.n_landmarks + 2 * (n - 1);
  const bool is_adversary = agent < config.n_adversaries;
  switch (config.id) {
    case EnvId::kSpread:
      return base;
    case EnvId::kTag:
      return base + 2 * (is_adversary ? config.n_good : config.n_good - 1);
    case EnvId::kAdversary:
      return base + (is_adversary ? 0 : 2);
  }
  return base;
}

namespace {

std::mt19937_64 make_rng(std::uint64_t seed) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu),
                    static_cast<std::uint32_t>(seed >> 32), 0x9e3779b9u};
  return std::mt19937_64(seq);
}

// Smooth penetration depth: k * log(1 + exp(-(dist - dist_min) / k)).
double soft_penetration(double dist, double dist_min, double margin) {
  const double x = -(dist - dist_min) / margin;
  const double softplus = x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
  return margin * softplus;
}

}  // namespace

ResetResult reset(const EnvConfig& config, std::uint64_t seed) {
  validate(config);
  auto rng = make_rng(seed);
  std::uniform_real_distribution<double> agent_box(-config.spawn_extent, config.spawn_extent);
  std::uniform_real_distribution<double> landmark_box(-config.landmark_spawn_extent,
                                                      config.landmark_spawn_extent);
  WorldState state;
  state.id = config.id;
  state.agent_count = config.agent_count();
  for (EntityKind kind : agent_kinds(config)) {
    Entity agent;
    agent.kind = kind;
    const KindConstants& constants = kind == EntityKind::kAdversary ? config.adversary_kind : config.good_kind;
    agent.radius = constants.radius;
    agent.max_speed = constants.max_speed;
    agent.position = Vec2(agent_box(rng), agent_box(rng));
    state.entities.push_back(agent);
  }
  for (int i = 0; i < config.n_landmarks; ++i) {
    Entity landmark;
    landmark.kind = config.id == EnvId::kTag ? EntityKind::kObstacle : EntityKind::kLandmark;
    landmark.radius = config.landmark_kind.radius;
    landmark.max_speed = 0.0;
    landmark.movable = false;
    landmark.collide = config.id == EnvId::kTag;
    landmark.position = Vec2(landmark_box(rng), landmark_box(rng));
    state.entities.push_back(landmark);
  }
  if (config.id == EnvId::kAdversary) {
    std::uniform_int_distribution<int> pick(0, config.n_landmarks - 1);
    state.target_landmark = state.agent_count + pick(rng);
  }
  ResetResult result;
  result.observations = observe(state);
  result.state = std::move(state);
  return result;
}

StepResult step(const EnvConfig& config, WorldState& state, const std::vector<Action>& actions) {
  const int n = state.agent_count;
  if (static_cast<int>(actions.size()) != n) {
    throw ContractViolation("step: expected " + std::to_string(n) + " actions, got " +
                            std::to_string(actions.size()));
  }
  const auto& physics = config.physics;
  const std::size_t entity_count = state.entities.size();
  std::vector<Vec2> forces(entity_count, Vec2::Zero());

  for (int i = 0; i < n; ++i) {
    const Action& a = actions[static_cast<std::size_t>(i)];
    if (a.size() != kActionSize) throw ContractViolation("step: action length must be 5");
    if (!a.allFinite() || (a.array() < 0.0).any() || (a.array() > 1.0).any()) {
      throw ContractViolation("step: action components must lie in [0, 1]");
    }
    forces[static_cast<std::size_t>(i)] = physics.sensitivity * Vec2(a(1) - a(2), a(3) - a(4));
  }

  for (std::size_t a = 0; a < entity_count; ++a) {
    const Entity& ea = state.entities[a];
    if (!ea.collide) continue;
    for (std::size_t b = a + 1; b < entity_count; ++b) {
      const Entity& eb = state.entities[b];
      if (!eb.collide || (!ea.movable && !eb.movable)) continue;
      const Vec2 delta = ea.position - eb.position;
      const double dist = delta.norm();
      if (dist <= 0.0) continue;  // coincident centres have no contact normal
      const double penetration =
          soft_penetration(dist, ea.radius + eb.radius, physics.contact_margin);
      const Vec2 force = physics.contact_force * penetration * (delta / dist);
      if (ea.movable) forces[a] += force;
      if (eb.movable) forces[b] -= force;
    }
  }

  for (std::size_t i = 0; i < entity_count; ++i) {
    Entity& entity = state.entities[i];
    if (!entity.movable) continue;
    entity.velocity *= (1.0 - physics.damping);
    entity.velocity += forces[i] / physics.mass * physics.time_step;
    const double speed = entity.velocity.norm();
    if (speed > entity.max_speed) entity.velocity *= entity.max_speed / speed;
    entity.position += entity.velocity * physics.time_step;
  }

  state.step += 1;
  StepResult result;
  result.rewards = compute_reward(state);
  if (!result.rewards.allFinite()) throw TrainingError("step: non-finite reward");
  result.observations = observe(state);
  result.done = state.step >= config.episode_length;
  result.tag_events = state.id == EnvId::kTag ? count_tag_events(state) : 0;
  return result;
}

std::vector<Observation> observe(const WorldState& state) {
  const int n = state.agent_count;
  const std::size_t entity_count = state.entities.size();
  std::vector<Observation> observations;
  observations.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const Entity& self = state.agent(i);
    std::vector<double> values;
    auto push = [&values](const Vec2& v) {
      values.push_back(v.x());
      values.push_back(v.y());
    };
    push(self.velocity);
    push(self.position);
    if (state.id == EnvId::kAdversary && self.kind == EntityKind::kGoodAgent) {
      push(state.entities[static_cast<std::size_t>(state.target_landmark)].position - self.position);
    }
    for (std::size_t e = static_cast<std::size_t>(n); e < entity_count; ++e) {
      push(state.entities[e].position - self.position);
    }
    for (int j = 0; j < n; ++j) {
      if (j != i) push(state.agent(j).position - self.position);
    }
    if (state.id == EnvId::kTag) {
      for (int j = 0; j < n; ++j) {
        if (j != i && state.agent(j).kind == EntityKind::kGoodAgent) push(state.agent(j).velocity);
      }
    }
    observations.push_back(Eigen::Map<const Eigen::VectorXd>(values.data(),
                                                             static_cast<Eigen::Index>(values.size())));
  }
  return observations;
}

bool is_collision(const Entity& a, const Entity& b) {
  return (a.position - b.position).norm() < a.radius + b.radius;
}

Eigen::VectorXd compute_spread_reward(const WorldState& state) {
  const int n = state.agent_count;
  double shared = 0.0;
  for (std::size_t e = static_cast<std::size_t>(n); e < state.entities.size(); ++e) {
    double nearest = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
      nearest = std::min(nearest, (state.agent(i).position - state.entities[e].position).norm());
    }
    if (n > 0) shared -= nearest;
  }
  Eigen::VectorXd rewards = Eigen::VectorXd::Constant(n, shared);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (is_collision(state.agent(i), state.agent(j))) {
        rewards(i) -= 1.0;
        rewards(j) -= 1.0;
      }
    }
  }
  return rewards;
}

double boundary_penalty(double z) {
  if (z < 0.9) return 0.0;
  if (z < 1.0) return (z - 0.9) * 10.0;
  return std::min(std::exp(2.0 * z - 2.0), 10.0);
}

int count_tag_events(const WorldState& state) {
  int events = 0;
  for (int g = 0; g < state.agent_count; ++g) {
    if (state.agent(g).kind != EntityKind::kGoodAgent) continue;
    for (int a = 0; a < state.agent_count; ++a) {
      if (state.agent(a).kind == EntityKind::kAdversary && is_collision(state.agent(g), state.agent(a))) {
        ++events;
      }
    }
  }
  return events;
}

Eigen::VectorXd compute_tag_reward(const WorldState& state) {
  const int n = state.agent_count;
  Eigen::VectorXd rewards = Eigen::VectorXd::Zero(n);
  int events = 0;
  for (int g = 0; g < n; ++g) {
    const Entity& good = state.agent(g);
    if (good.kind != EntityKind::kGoodAgent) continue;
    for (int a = 0; a < n; ++a) {
      if (state.agent(a).kind == EntityKind::kAdversary && is_collision(good, state.agent(a))) {
        rewards(g) -= 10.0;
        ++events;
      }
    }
    rewards(g) -= boundary_penalty(std::abs(good.position.x()));
    rewards(g) -= boundary_penalty(std::abs(good.position.y()));
  }
  for (int a = 0; a < n; ++a) {
    if (state.agent(a).kind == EntityKind::kAdversary) rewards(a) += 10.0 * events;
  }
  return rewards;
}

Eigen::VectorXd compute_adversary_reward(const WorldState& state) {
  const int n = state.agent_count;
  if (state.target_landmark < 0) throw ContractViolation("adversary reward: no target landmark");
  const Vec2& target = state.entities[static_cast<std::size_t>(state.target_landmark)].position;
  double nearest_good = std::numeric_limits<double>::infinity();
  double adversary_distance = 0.0;
  for (int i = 0; i < n; ++i) {
    const double dist = (state.agent(i).position - target).norm();
    if (state.agent(i).kind == EntityKind::kGoodAgent) {
      nearest_good = std::min(nearest_good, dist);
    } else {
      adversary_distance += dist;
    }
  }
  Eigen::VectorXd rewards(n);
  for (int i = 0; i < n; ++i) {
    if (state.agent(i).kind == EntityKind::kGoodAgent) {
      rewards(i) = -nearest_good + adversary_distance;
    } else {
      rewards(i) = -(state.agent(i).position - target).norm();
    }
  }
  return rewards;
}

Eigen::VectorXd compute_reward(const WorldState& state) {
  switch (state.id) {
    case EnvId::kSpread: return compute_spread_reward(state);
    case EnvId::kTag: return compute_tag_reward(state);
    case EnvId::kAdversary: return compute_adversary_reward(state);
  }
  return {};
}

std::vector<Vec2> agent_positions(const WorldState& state) {
  std::vector<Vec2> positions;
  positions.reserve(static_cast<std::size_t>(state.agent_count));
  for (int i = 0; i < state.agent_count; ++i) positions.push_back(state.agent(i).position);
  return positions;
}

void write_trajectory_header(std::ostream& out) { out << "step,entity,x,y,vx,vy\n"; }

void write_trajectory_rows(std::ostream& out, const WorldState& state) {
  for (std::size_t e = 0; e < state.entities.size(); ++e) {
    const Entity& entity = state.entities[e];
    out << state.step << ',' << e << ',' << entity.position.x() << ',' << entity.position.y() << ','
        << entity.velocity.x() << ',' << entity.velocity.y() << '\n';
  }
}

}  // namespace maddpgk::env
