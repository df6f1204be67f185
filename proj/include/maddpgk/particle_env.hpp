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

// Two-dimensional particle worlds: Simple Tag, Simple Spread and Simple
// Adversary.
//
// Entity order inside a WorldState is fixed: controllable agents first
// (adversaries before good agents), then landmarks or obstacles.
//
// Observation layouts, all offsets relative to the observing agent:
//   spread:    [vel(2), pos(2), landmarks(2L), other agents(2(n-1))]
//   tag:       [vel(2), pos(2), obstacles(2L), other agents(2(n-1)),
//               velocities of the other good agents(2 per good agent)]
//   adversary: good agents
//              [vel(2), pos(2), target(2), landmarks(2L), other agents(2(n-1))]
//              adversary
//              [vel(2), pos(2), landmarks(2L), other agents(2(n-1))]

#ifndef MADDPGK_PARTICLE_ENV_HPP_
#define MADDPGK_PARTICLE_ENV_HPP_

#include <Eigen/Dense>

#include <cstdint>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

namespace maddpgk::env {

using Vec2 = Eigen::Vector2d;
using Observation = Eigen::VectorXd;
using Action = Eigen::VectorXd;

inline constexpr int kActionSize = 5;
inline constexpr double kUnlimitedSpeed = std::numeric_limits<double>::infinity();

enum class EnvId { kTag, kSpread, kAdversary };
enum class EntityKind { kGoodAgent, kAdversary, kLandmark, kObstacle };

const char* env_name(EnvId id);
EnvId env_from_name(const std::string& name);
const char* kind_name(EntityKind kind);

struct PhysicsConstants {
  double time_step = 0.1;
  double damping = 0.25;
  double contact_force = 100.0;
  double contact_margin = 1e-3;
  double sensitivity = 5.0;
  double mass = 1.0;
};

struct KindConstants {
  double radius = 0.05;
  double max_speed = kUnlimitedSpeed;
};

struct EnvConfig {
  EnvId id = EnvId::kSpread;
  int n_good = 3;
  int n_adversaries = 0;
  int n_landmarks = 3;  // obstacles in tag
  PhysicsConstants physics;
  KindConstants good_kind;
  KindConstants adversary_kind;
  KindConstants landmark_kind;
  double spawn_extent = 1.0;           // agents spawn in [-e, e]^2
  double landmark_spawn_extent = 1.0;  // landmarks / obstacles spawn in [-e, e]^2
  int episode_length = 25;
  std::uint64_t seed = 0;

  int agent_count() const { return n_good + n_adversaries; }

  // Defaults for each environment.
  static EnvConfig spread(int n);
  static EnvConfig tag(int n_good = 1, int n_adversaries = 3, int n_obstacles = 2);
  static EnvConfig adversary(int n_good = 2);
};

// Throws ConfigError when counts or constants are invalid.
void validate(const EnvConfig& config);

struct Entity {
  EntityKind kind = EntityKind::kGoodAgent;
  Vec2 position = Vec2::Zero();
  Vec2 velocity = Vec2::Zero();
  double radius = 0.05;
  double max_speed = kUnlimitedSpeed;
  bool movable = true;
  bool collide = true;

  bool is_agent() const {
    return kind == EntityKind::kGoodAgent || kind == EntityKind::kAdversary;
  }
};

struct WorldState {
  EnvId id = EnvId::kSpread;
  std::vector<Entity> entities;
  int agent_count = 0;
  int step = 0;
  int target_landmark = -1;  // entity index of the target; adversary env only

  const Entity& agent(int i) const { return entities[static_cast<std::size_t>(i)]; }
};

struct ResetResult {
  WorldState state;
  std::vector<Observation> observations;
};

struct StepResult {
  std::vector<Observation> observations;
  Eigen::VectorXd rewards;
  bool done = false;
  int tag_events = 0;
};

// Fresh episode. Agents are placed uniformly in the spawn box, landmarks in
// theirs, all velocities are zero. Deterministic in (config, seed).
ResetResult reset(const EnvConfig& config, std::uint64_t seed);

// Advances `state` by one time step. Every action must have kActionSize
// components in [0, 1].
StepResult step(const EnvConfig& config, WorldState& state, const std::vector<Action>& actions);

std::vector<Observation> observe(const WorldState& state);
int observation_size(const EnvConfig& config, int agent);
std::vector<EntityKind> agent_kinds(const EnvConfig& config);

bool is_collision(const Entity& a, const Entity& b);

Eigen::VectorXd compute_spread_reward(const WorldState& state);
Eigen::VectorXd compute_tag_reward(const WorldState& state);
Eigen::VectorXd compute_adversary_reward(const WorldState& state);
Eigen::VectorXd compute_reward(const WorldState& state);

// Good-agent boundary penalty for one coordinate magnitude.
double boundary_penalty(double coordinate_magnitude);

// Number of (good agent, adversary) pairs currently in contact.
int count_tag_events(const WorldState& state);

std::vector<Vec2> agent_positions(const WorldState& state);

// Trajectory dump: header "step,entity,x,y,vx,vy", one row per entity.
void write_trajectory_header(std::ostream& out);
void write_trajectory_rows(std::ostream& out, const WorldState& state);

}  // namespace maddpgk::env

#endif  // MADDPGK_PARTICLE_ENV_HPP_
