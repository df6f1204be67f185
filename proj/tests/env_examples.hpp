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

// Worked physics and reward examples with hand-computed expectations, shared
// by the unit and acceptance suites.

#ifndef MADDPGK_TESTS_ENV_EXAMPLES_HPP_
#define MADDPGK_TESTS_ENV_EXAMPLES_HPP_

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "maddpgk/particle_env.hpp"

namespace maddpgk::testing {

inline constexpr double kExampleTolerance = 1e-12;

// Places agents and landmarks at explicit coordinates on top of a reset
// state, all at rest.
inline env::WorldState place(const env::EnvConfig& config, const std::vector<env::Vec2>& agents,
                             const std::vector<env::Vec2>& landmarks) {
  env::WorldState state = env::reset(config, 0).state;
  for (std::size_t i = 0; i < agents.size(); ++i) state.entities[i].position = agents[i];
  for (std::size_t i = 0; i < landmarks.size(); ++i) {
    state.entities[static_cast<std::size_t>(state.agent_count) + i].position = landmarks[i];
  }
  for (auto& e : state.entities) e.velocity.setZero();
  return state;
}

inline bool near(double actual, double expected) { return std::abs(actual - expected) <= kExampleTolerance; }

struct EnvExample {
  std::string name;
  std::function<bool()> holds;
};

inline std::vector<EnvExample> env_examples() {
  using env::EnvConfig;
  using env::Vec2;
  std::vector<EnvExample> examples;

  examples.push_back({"boundary penalty piecewise values", [] {
    return env::boundary_penalty(0.0) == 0.0 && env::boundary_penalty(0.899) == 0.0 &&
           near(env::boundary_penalty(0.95), 0.5) && near(env::boundary_penalty(1.0), 1.0) &&
           near(env::boundary_penalty(1.5), std::exp(1.0)) && env::boundary_penalty(3.0) == 10.0 &&
           env::boundary_penalty(1e6) == 10.0;
  }});

  examples.push_back({"zero action at rest leaves positions unchanged", [] {
    const auto config = EnvConfig::spread(2);
    auto state = place(config, {{-0.5, 0.0}, {0.5, 0.0}}, {{0.0, 0.7}, {0.0, -0.7}});
    const auto before = state.entities;
    env::step(config, state, std::vector<env::Action>(2, env::Action::Zero(env::kActionSize)));
    for (std::size_t i = 0; i < before.size(); ++i) {
      if (state.entities[i].position != before[i].position) return false;
    }
    return true;
  }});

  examples.push_back({"damping keeps 0.75 of the velocity", [] {
    const auto config = EnvConfig::spread(1);
    auto state = place(config, {{0.0, 0.0}}, {{0.8, 0.8}});
    state.entities[0].velocity = Vec2(0.4, -0.2);
    env::step(config, state, {env::Action::Zero(env::kActionSize)});
    return (state.entities[0].velocity - Vec2(0.3, -0.15)).norm() < kExampleTolerance &&
           (state.entities[0].position - Vec2(0.03, -0.015)).norm() < kExampleTolerance;
  }});

  examples.push_back({"action (0.3, 1, 0.2, 0, 0.5) gives velocity (0.4, -0.25)", [] {
    const auto config = EnvConfig::spread(1);
    auto state = place(config, {{0.0, 0.0}}, {{0.8, 0.8}});
    env::Action a(5);
    a << 0.3, 1.0, 0.2, 0.0, 0.5;
    env::step(config, state, {a});
    return (state.entities[0].velocity - Vec2(0.4, -0.25)).norm() < kExampleTolerance;
  }});

  examples.push_back({"spread: agents on landmarks without contact earn zero", [] {
    const auto state = place(EnvConfig::spread(2), {{0.5, 0.5}, {-0.5, -0.5}}, {{0.5, 0.5}, {-0.5, -0.5}});
    const auto r = env::compute_spread_reward(state);
    return r(0) == 0.0 && r(1) == 0.0;
  }});

  examples.push_back({"spread: two landmarks at unit distance sum to -2", [] {
    auto state = place(EnvConfig::spread(1), {{0.0, 0.0}}, {{1.0, 0.0}});
    env::Entity extra = state.entities.back();
    extra.position = Vec2(0.0, 1.0);
    state.entities.push_back(extra);
    return near(env::compute_spread_reward(state)(0), -2.0);
  }});

  examples.push_back({"spread: min-distance sum with one colliding pair", [] {
    const auto state = place(EnvConfig::spread(3), {{0.0, 0.0}, {0.05, 0.0}, {0.8, 0.8}},
                             {{0.3, 0.0}, {0.0, 0.4}, {-0.6, 0.0}});
    // Landmark minima: 0.25 (agent 1), 0.4 (agent 0), 0.6 (agent 0).
    const double shared = -(0.25 + 0.4 + 0.6);
    const auto r = env::compute_spread_reward(state);
    return near(r(0), shared - 1.0) && near(r(1), shared - 1.0) && near(r(2), shared);
  }});

  examples.push_back({"tag: no contact, good agent at origin gives zero", [] {
    const auto state = place(EnvConfig::tag(1, 3, 2), {{0.5, 0.5}, {-0.5, 0.5}, {0.5, -0.5}, {0.0, 0.0}},
                             {{-0.7, -0.7}, {0.7, 0.0}});
    return env::compute_tag_reward(state).norm() == 0.0;
  }});

  examples.push_back({"tag: one contact pays +10 to every adversary and -10 to the good agent", [] {
    const auto state = place(EnvConfig::tag(1, 3, 2), {{0.05, 0.0}, {-0.5, 0.5}, {0.5, -0.5}, {0.0, 0.0}},
                             {{-0.7, -0.7}, {0.7, 0.0}});
    const auto r = env::compute_tag_reward(state);
    return r(0) == 10.0 && r(1) == 10.0 && r(2) == 10.0 && r(3) == -10.0 && env::count_tag_events(state) == 1;
  }});

  examples.push_back({"tag: good agent at x = 1 pays a boundary penalty of 1", [] {
    const auto state = place(EnvConfig::tag(1, 3, 2), {{0.5, 0.5}, {-0.5, 0.5}, {0.5, -0.5}, {1.0, 0.0}},
                             {{-0.7, -0.7}, {0.2, 0.0}});
    return near(env::compute_tag_reward(state)(3), -1.0);
  }});

  examples.push_back({"adversary: everyone on the target earns zero", [] {
    auto state = place(EnvConfig::adversary(2), {{0.2, 0.2}, {0.2, 0.2}, {-0.9, 0.9}}, {{0.2, 0.2}, {-0.5, 0.0}});
    state.target_landmark = 3;
    const auto r = env::compute_adversary_reward(state);
    return r(0) == 0.0 && r(1) == 0.0 && r(2) == 0.0;
  }});

  examples.push_back({"adversary: closest good agent at 1 and adversary at 2 give +1 and -2", [] {
    auto state = place(EnvConfig::adversary(2), {{2.0, 0.0}, {0.0, 1.0}, {-3.0, 0.0}}, {{0.0, 0.0}, {0.5, 0.5}});
    state.target_landmark = 3;
    const auto r = env::compute_adversary_reward(state);
    return near(r(0), -2.0) && near(r(1), 1.0) && near(r(2), 1.0);
  }});

  return examples;
}

}  // namespace maddpgk::testing

#endif  // MADDPGK_TESTS_ENV_EXAMPLES_HPP_
