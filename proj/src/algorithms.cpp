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

#include "maddpgk/algorithms.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <utility>

#include "maddpgk/errors.hpp"

namespace maddpgk {

const char* algorithm_name(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::kDdpg: return "ddpg";
    case Algorithm::kMaddpg: return "maddpg";
    case Algorithm::kMaddpgK: return "maddpg_k";
  }
  return "maddpg_k";
}

Algorithm algorithm_from_name(const std::string& name) {
  if (name == "ddpg") return Algorithm::kDdpg;
  if (name == "maddpg") return Algorithm::kMaddpg;
  if (name == "maddpg_k" || name == "maddpg-k") return Algorithm::kMaddpgK;
  throw ConfigError("unknown algorithm '" + name + "'");
}

void validate(const AlgoConfig& config) {
  if (!(config.gamma >= 0 && config.gamma < 1)) throw ConfigError("gamma must lie in [0, 1)");
  if (!(config.tau > 0 && config.tau <= 1)) throw ConfigError("tau must lie in (0, 1]");
  if (!(config.learning_rate > 0)) throw ConfigError("learning rate must be positive");
  if (!(config.noise_sigma >= 0)) throw ConfigError("noise scale must be non-negative");
  if (!(config.clip_norm > 0)) throw ConfigError("clip norm must be positive");
  if (config.k.good < 0 || config.k.adversary < 0) throw ConfigError("K must be non-negative");
  for (int width : config.hidden) {
    if (width <= 0) throw ConfigError("hidden widths must be positive");
  }
  metric_from_name(config.metric);
}

std::vector<AgentSpec> agent_specs(const env::EnvConfig& config) {
  std::vector<AgentSpec> specs;
  const auto kinds = env::agent_kinds(config);
  for (int i = 0; i < static_cast<int>(kinds.size()); ++i) {
    specs.push_back({kinds[static_cast<std::size_t>(i)], env::observation_size(config, i), env::kActionSize});
  }
  return specs;
}

namespace {

int clamped_k(const AlgoConfig& config, env::EntityKind kind, int n) {
  return std::min(config.k.for_kind(kind), n - 1);
}

std::vector<Eigen::Index> slot_widths(const AlgoConfig& config, const std::vector<AgentSpec>& agents,
                                      int agent) {
  const int n = static_cast<int>(agents.size());
  switch (config.algorithm) {
    case Algorithm::kDdpg:
      return {agents[static_cast<std::size_t>(agent)].observation_size};
    case Algorithm::kMaddpg: {
      std::vector<Eigen::Index> widths;
      for (const auto& spec : agents) widths.push_back(spec.observation_size);
      return widths;
    }
    case Algorithm::kMaddpgK: {
      Eigen::Index widest = 0;
      for (const auto& spec : agents) widest = std::max(widest, spec.observation_size);
      const int k = clamped_k(config, agents[static_cast<std::size_t>(agent)].kind, n);
      return std::vector<Eigen::Index>(static_cast<std::size_t>(k + 1), widest);
    }
  }
  return {};
}

Eigen::Index layout_width(const std::vector<Eigen::Index>& widths, Eigen::Index action_size) {
  return std::accumulate(widths.begin(), widths.end(), Eigen::Index{0}) +
         action_size * static_cast<Eigen::Index>(widths.size());
}

}  // namespace

Eigen::Index critic_input_width(const AlgoConfig& config, const std::vector<AgentSpec>& agents, int agent) {
  return layout_width(slot_widths(config, agents, agent), agents[static_cast<std::size_t>(agent)].action_size);
}

LearnerGroup::LearnerGroup(const AlgoConfig& config, const std::vector<AgentSpec>& agents,
                           std::mt19937_64& init_rng)
    : config_(config) {
  validate(config_);
  const int n = static_cast<int>(agents.size());
  if (n < 1) throw ConfigError("at least one agent is required");
  for (const auto& spec : agents) {
    if (spec.observation_size <= 0 || spec.action_size != agents.front().action_size) {
      throw ConfigError("agent observation sizes must be positive and action sizes equal");
    }
  }
  if (config_.algorithm == Algorithm::kMaddpgK) {
    for (const auto& spec : agents) {
      if (config_.k.for_kind(spec.kind) > n - 1) {
        log_warning(std::string("K for kind '") + env::kind_name(spec.kind) + "' exceeds n-1=" +
                    std::to_string(n - 1) + "; clamping");
        break;
      }
    }
  }
  learners_.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const AgentSpec& spec = agents[static_cast<std::size_t>(i)];
    AgentLearner learner;
    learner.index = i;
    learner.kind = spec.kind;
    learner.k = config_.algorithm == Algorithm::kMaddpgK ? clamped_k(config_, spec.kind, n) : 0;
    learner.slot_observation_widths = slot_widths(config_, agents, i);
    learner.actor = nn::make_mlp<double>(spec.observation_size, config_.hidden, spec.action_size,
                                         nn::Activation::kLogistic, init_rng);
    learner.critic = nn::make_mlp<double>(layout_width(learner.slot_observation_widths, spec.action_size),
                                          config_.hidden, 1, nn::Activation::kIdentity, init_rng);
    learner.target_actor = learner.actor;
    learner.target_critic = learner.critic;
    learner.actor_optimizer = nn::make_adam_state(learner.actor);
    learner.critic_optimizer = nn::make_adam_state(learner.critic);
    learners_.push_back(std::move(learner));
  }
}

std::vector<int> LearnerGroup::k_per_agent() const {
  std::vector<int> ks;
  const int n = agent_count();
  for (const auto& learner : learners_) {
    ks.push_back(config_.algorithm == Algorithm::kMaddpgK ? learner.k
                                                          : std::min(config_.k.for_kind(learner.kind), n - 1));
  }
  return ks;
}

std::vector<env::Action> LearnerGroup::select_actions(const std::vector<Eigen::VectorXd>& observations,
                                                      bool warmup, std::mt19937_64& rng) const {
  if (observations.size() != learners_.size()) {
    throw ContractViolation("select_actions: one observation per agent required");
  }
  std::vector<env::Action> actions;
  actions.reserve(learners_.size());
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  std::normal_distribution<double> noise(0.0, 1.0);
  for (std::size_t i = 0; i < learners_.size(); ++i) {
    const auto& learner = learners_[i];
    env::Action action(learner.actor.output_size());
    if (warmup) {
      for (Eigen::Index c = 0; c < action.size(); ++c) action(c) = uniform(rng);
    } else {
      action = nn::forward(learner.actor, observations[i]);
      if (config_.noise_sigma > 0) {
        for (Eigen::Index c = 0; c < action.size(); ++c) {
          action(c) = std::clamp(action(c) + config_.noise_sigma * noise(rng), 0.0, 1.0);
        }
      }
    }
    actions.push_back(std::move(action));
  }
  return actions;
}

std::vector<int> LearnerGroup::slot_agents(int agent, const Transition& transition, bool use_next_state) const {
  switch (config_.algorithm) {
    case Algorithm::kDdpg:
      return {agent};
    case Algorithm::kMaddpg: {
      std::vector<int> all(learners_.size());
      std::iota(all.begin(), all.end(), 0);
      return all;
    }
    case Algorithm::kMaddpgK: {
      const IndexSets& sets = use_next_state ? transition.next_index_sets : transition.index_sets;
      if (sets.size() != learners_.size()) {
        throw ContractViolation("maddpg_k: transition is missing neighbor index sets");
      }
      const auto& neighbors = sets[static_cast<std::size_t>(agent)];
      if (static_cast<int>(neighbors.size()) != learner(agent).k) {
        throw ContractViolation("maddpg_k: stored index set size does not match K");
      }
      return critic_slots(agent, neighbors, config_.slot_order);
    }
  }
  return {};
}

Eigen::MatrixXd LearnerGroup::build_critic_inputs(const Batch& batch, int agent, bool use_next_state,
                                                  CriticBatchLayout* layout) const {
  if (agent < 0 || agent >= agent_count()) throw ContractViolation("build_critic_inputs: agent out of range");
  const AgentLearner& self = learner(agent);
  const auto batch_size = static_cast<Eigen::Index>(batch.size());
  const Eigen::Index action_size = self.actor.output_size();
  const auto& widths = self.slot_observation_widths;

  std::vector<Eigen::Index> offsets(widths.size());
  Eigen::Index offset = 0;
  for (std::size_t t = 0; t < widths.size(); ++t) {
    offsets[t] = offset;
    offset += widths[t] + action_size;
  }

  Eigen::MatrixXd inputs = Eigen::MatrixXd::Zero(self.critic_input_size(), batch_size);
  if (layout != nullptr) layout->own_action_offset.assign(static_cast<std::size_t>(batch_size), -1);

  // (sample, row) pairs whose action must come from agent j's target actor.
  std::vector<std::vector<std::pair<Eigen::Index, Eigen::Index>>> requests;
  if (use_next_state) requests.resize(learners_.size());

  for (Eigen::Index s = 0; s < batch_size; ++s) {
    const Transition& transition = *batch[static_cast<std::size_t>(s)];
    if (transition.agent_count() != learners_.size()) {
      throw ContractViolation("build_critic_inputs: transition agent count mismatch");
    }
    const std::vector<int> slots = slot_agents(agent, transition, use_next_state);
    if (slots.size() != widths.size()) throw ContractViolation("build_critic_inputs: slot count mismatch");
    for (std::size_t t = 0; t < slots.size(); ++t) {
      const auto j = static_cast<std::size_t>(slots[t]);
      const Eigen::VectorXd& obs =
          use_next_state ? transition.next_observations[j] : transition.observations[j];
      if (obs.size() > widths[t]) throw ContractViolation("build_critic_inputs: observation wider than slot");
      inputs.block(offsets[t], s, obs.size(), 1) = obs;
      const Eigen::Index action_row = offsets[t] + widths[t];
      if (use_next_state) {
        requests[j].emplace_back(s, action_row);
      } else {
        inputs.block(action_row, s, action_size, 1) = transition.actions[j];
      }
      if (layout != nullptr && slots[t] == agent) {
        layout->own_action_offset[static_cast<std::size_t>(s)] = action_row;
      }
    }
  }

  if (use_next_state) {
    for (std::size_t j = 0; j < requests.size(); ++j) {
      const auto& wanted = requests[j];
      if (wanted.empty()) continue;
      const AgentLearner& other = learners_[j];
      Eigen::MatrixXd next_obs(other.target_actor.input_size(), static_cast<Eigen::Index>(wanted.size()));
      for (std::size_t m = 0; m < wanted.size(); ++m) {
        next_obs.col(static_cast<Eigen::Index>(m)) =
            batch[static_cast<std::size_t>(wanted[m].first)]->next_observations[j];
      }
      const Eigen::MatrixXd target_actions = nn::forward(other.target_actor, std::move(next_obs));
      for (std::size_t m = 0; m < wanted.size(); ++m) {
        inputs.block(wanted[m].second, wanted[m].first, action_size, 1) =
            target_actions.col(static_cast<Eigen::Index>(m));
      }
    }
  }
  return inputs;
}

LossGradient LearnerGroup::critic_gradient(int agent, const Batch& batch) const {
  if (batch.empty()) throw ContractViolation("critic_gradient: empty batch");
  const AgentLearner& self = learner(agent);
  const auto batch_size = static_cast<Eigen::Index>(batch.size());

  const Eigen::MatrixXd next_q = nn::forward(self.target_critic, build_critic_inputs(batch, agent, true));
  Eigen::RowVectorXd targets(batch_size);
  for (Eigen::Index s = 0; s < batch_size; ++s) {
    targets(s) = batch[static_cast<std::size_t>(s)]->rewards(agent) + config_.gamma * next_q(0, s);
  }

  nn::Trace trace;
  const Eigen::MatrixXd q = nn::forward(self.critic, build_critic_inputs(batch, agent, false), &trace);
  const Eigen::RowVectorXd error = q.row(0) - targets;
  const double loss = error.squaredNorm() / static_cast<double>(batch_size);
  if (!std::isfinite(loss)) {
    throw TrainingError("critic_update: non-finite loss for agent " + std::to_string(agent));
  }
  const Eigen::MatrixXd upstream = (2.0 / static_cast<double>(batch_size)) * error;
  return {loss, nn::backward(self.critic, trace, upstream, true, false).gradients};
}

double LearnerGroup::critic_update(int agent, const Batch& batch) {
  LossGradient result = critic_gradient(agent, batch);
  AgentLearner& self = learners_[static_cast<std::size_t>(agent)];
  auto grads = nn::clip_gradients(std::move(result.gradients), config_.clip_norm);
  nn::adam_step(self.critic, self.critic_optimizer, grads, config_.learning_rate);
  return result.value;
}

LossGradient LearnerGroup::actor_gradient(int agent, const Batch& batch) const {
  if (batch.empty()) throw ContractViolation("actor_gradient: empty batch");
  const AgentLearner& self = learner(agent);
  const auto batch_size = static_cast<Eigen::Index>(batch.size());
  const Eigen::Index action_size = self.actor.output_size();

  Eigen::MatrixXd own_obs(self.actor.input_size(), batch_size);
  for (Eigen::Index s = 0; s < batch_size; ++s) {
    own_obs.col(s) = batch[static_cast<std::size_t>(s)]->observations[static_cast<std::size_t>(agent)];
  }
  nn::Trace actor_trace;
  const Eigen::MatrixXd policy_actions = nn::forward(self.actor, std::move(own_obs), &actor_trace);

  CriticBatchLayout layout;
  Eigen::MatrixXd inputs = build_critic_inputs(batch, agent, false, &layout);
  for (Eigen::Index s = 0; s < batch_size; ++s) {
    inputs.block(layout.own_action_offset[static_cast<std::size_t>(s)], s, action_size, 1) =
        policy_actions.col(s);
  }
  nn::Trace critic_trace;
  const Eigen::MatrixXd q = nn::forward(self.critic, std::move(inputs), &critic_trace);
  const double objective = q.mean();
  if (!std::isfinite(objective)) {
    throw TrainingError("actor_update: non-finite objective for agent " + std::to_string(agent));
  }

  const Eigen::MatrixXd upstream = Eigen::MatrixXd::Constant(1, batch_size, -1.0 / static_cast<double>(batch_size));
  const auto critic_back = nn::backward(self.critic, critic_trace, upstream, false);
  Eigen::MatrixXd action_grad(action_size, batch_size);
  for (Eigen::Index s = 0; s < batch_size; ++s) {
    action_grad.col(s) =
        critic_back.input_gradient.block(layout.own_action_offset[static_cast<std::size_t>(s)], s, action_size, 1);
  }
  return {objective, nn::backward(self.actor, actor_trace, action_grad, true, false).gradients};
}

double LearnerGroup::actor_update(int agent, const Batch& batch) {
  LossGradient result = actor_gradient(agent, batch);
  AgentLearner& self = learners_[static_cast<std::size_t>(agent)];
  auto grads = nn::clip_gradients(std::move(result.gradients), config_.clip_norm);
  nn::adam_step(self.actor, self.actor_optimizer, grads, config_.learning_rate);
  return result.value;
}

std::optional<UpdateStats> LearnerGroup::update_all(const ReplayBuffer& buffer, std::size_t batch_size,
                                                    std::mt19937_64& rng) {
  if (buffer.size() < batch_size || batch_size == 0) return std::nullopt;
  UpdateStats stats;
  for (int i = 0; i < agent_count(); ++i) {
    const auto batch = buffer.sample(batch_size, rng);
    stats.critic_loss.push_back(critic_update(i, *batch));
    stats.actor_objective.push_back(actor_update(i, *batch));
  }
  for (auto& learner : learners_) {
    nn::soft_update(learner.target_actor, learner.actor, config_.tau);
    nn::soft_update(learner.target_critic, learner.critic, config_.tau);
  }
  return stats;
}

void LearnerGroup::save(const std::filesystem::path& directory) const {
  std::filesystem::create_directories(directory);
  auto write = [&directory](const std::string& name, const nn::Mlp& params) {
    std::ofstream out(directory / name);
    if (!out) throw ConfigError("cannot write checkpoint " + (directory / name).string());
    nn::save_checkpoint(out, params);
  };
  for (const auto& learner : learners_) {
    const std::string suffix = "_" + std::to_string(learner.index) + ".txt";
    write("actor" + suffix, learner.actor);
    write("critic" + suffix, learner.critic);
    write("target_actor" + suffix, learner.target_actor);
    write("target_critic" + suffix, learner.target_critic);
  }
}

void LearnerGroup::load(const std::filesystem::path& directory) {
  auto read = [&directory](const std::string& name, nn::Mlp& params) {
    std::ifstream in(directory / name);
    if (!in) throw ConfigError("cannot read checkpoint " + (directory / name).string());
    nn::Mlp loaded = nn::load_checkpoint<double>(in);
    if (!nn::same_shape(loaded, params)) throw ConfigError("checkpoint " + name + " has the wrong shape");
    params = std::move(loaded);
  };
  for (auto& learner : learners_) {
    const std::string suffix = "_" + std::to_string(learner.index) + ".txt";
    read("actor" + suffix, learner.actor);
    read("critic" + suffix, learner.critic);
    read("target_actor" + suffix, learner.target_actor);
    read("target_critic" + suffix, learner.target_critic);
  }
}

}  // namespace maddpgk
