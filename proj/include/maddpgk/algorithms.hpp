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

// Independent DDPG, MADDPG and MADDPG-K learners. The three share actors,
// target networks, exploration and update rules; they differ only in which
// agents fill the slots of each critic input:
//
//   ddpg       [o_i, a_i]
//   maddpg     [o_1, a_1, ..., o_n, a_n]
//   maddpg_k   [o_i, a_i, o_j1, a_j1, ..., o_jK, a_jK], j sorted by distance
//
// K counts neighbors excluding the agent itself, so a MADDPG-K critic input
// has K + 1 slots.

#ifndef MADDPGK_ALGORITHMS_HPP_
#define MADDPGK_ALGORITHMS_HPP_

#include <Eigen/Dense>

#include <filesystem>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "maddpgk/neighborhood.hpp"
#include "maddpgk/nn.hpp"
#include "maddpgk/particle_env.hpp"
#include "maddpgk/replay.hpp"

namespace maddpgk {

enum class Algorithm { kDdpg, kMaddpg, kMaddpgK };

const char* algorithm_name(Algorithm algorithm);
Algorithm algorithm_from_name(const std::string& name);

struct KPerKind {
  int good = 2;
  int adversary = 2;

  int for_kind(env::EntityKind kind) const {
    return kind == env::EntityKind::kAdversary ? adversary : good;
  }
};

struct AlgoConfig {
  Algorithm algorithm = Algorithm::kMaddpgK;
  KPerKind k;
  double gamma = 0.95;
  double tau = 0.01;
  double learning_rate = 0.01;
  double noise_sigma = 0.1;  // Gaussian exploration noise after warmup
  double clip_norm = 0.5;
  std::vector<int> hidden = {64, 64};
  std::string metric = "euclidean";
  SlotOrder slot_order = SlotOrder::kSelfFirst;
};

void validate(const AlgoConfig& config);

struct AgentSpec {
  env::EntityKind kind = env::EntityKind::kGoodAgent;
  Eigen::Index observation_size = 0;
  Eigen::Index action_size = env::kActionSize;
};

struct AgentLearner {
  int index = 0;
  env::EntityKind kind = env::EntityKind::kGoodAgent;
  int k = 0;  // neighbors, MADDPG-K only
  nn::Mlp actor;
  nn::Mlp critic;
  nn::Mlp target_actor;
  nn::Mlp target_critic;
  nn::Adam actor_optimizer;
  nn::Adam critic_optimizer;
  // Observation width of each critic slot; each slot also carries one action.
  std::vector<Eigen::Index> slot_observation_widths;

  Eigen::Index critic_input_size() const { return critic.input_size(); }
};

// Where agent i's own action sits inside each column of a critic batch.
struct CriticBatchLayout {
  std::vector<Eigen::Index> own_action_offset;  // per sample
};

struct UpdateStats {
  std::vector<double> critic_loss;
  std::vector<double> actor_objective;
};

// Objective value with its unclipped parameter gradient.
struct LossGradient {
  double value = 0.0;
  nn::Gradients gradients;
};

class LearnerGroup {
 public:
  LearnerGroup(const AlgoConfig& config, const std::vector<AgentSpec>& agents, std::mt19937_64& init_rng);

  const AlgoConfig& config() const { return config_; }
  Algorithm algorithm() const { return config_.algorithm; }
  int agent_count() const { return static_cast<int>(learners_.size()); }
  const std::vector<AgentLearner>& learners() const { return learners_; }
  std::vector<AgentLearner>& learners() { return learners_; }
  const AgentLearner& learner(int i) const { return learners_[static_cast<std::size_t>(i)]; }

  std::vector<int> k_per_agent() const;
  bool needs_index_sets() const { return config_.algorithm == Algorithm::kMaddpgK; }

  // Uniform actions while `warmup`, otherwise actor output plus clipped noise.
  std::vector<env::Action> select_actions(const std::vector<Eigen::VectorXd>& observations, bool warmup,
                                          std::mt19937_64& rng) const;

  // Agents filling the critic slots of `agent` for one transition.
  std::vector<int> slot_agents(int agent, const Transition& transition, bool use_next_state) const;

  // Critic input batch (one column per transition). With `use_next_state`
  // every slot's action comes from that agent's target actor.
  Eigen::MatrixXd build_critic_inputs(const Batch& batch, int agent, bool use_next_state,
                                      CriticBatchLayout* layout = nullptr) const;

  // Mean squared TD error of the critic of `agent` and its gradient.
  LossGradient critic_gradient(int agent, const Batch& batch) const;

  // Mean Q with the own action replaced by the current policy, and the
  // gradient of its negation with respect to the actor.
  LossGradient actor_gradient(int agent, const Batch& batch) const;

  // One Adam step on the critic of `agent`; returns the mean squared TD error.
  double critic_update(int agent, const Batch& batch);

  // One Adam step on the actor of `agent`; returns the mean Q before the step.
  double actor_update(int agent, const Batch& batch);

  // Critic then actor update for every agent on its own sampled batch, then
  // Polyak updates of all targets. Returns nullopt (and changes nothing)
  // while the buffer holds fewer than `batch_size` transitions.
  std::optional<UpdateStats> update_all(const ReplayBuffer& buffer, std::size_t batch_size,
                                        std::mt19937_64& rng);

  void save(const std::filesystem::path& directory) const;
  void load(const std::filesystem::path& directory);

 private:
  AlgoConfig config_;
  std::vector<AgentLearner> learners_;
};

// Width of agent `agent`'s critic input under `config`.
Eigen::Index critic_input_width(const AlgoConfig& config, const std::vector<AgentSpec>& agents, int agent);

std::vector<AgentSpec> agent_specs(const env::EnvConfig& config);

}  // namespace maddpgk

#endif  // MADDPGK_ALGORITHMS_HPP_
