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

#include "maddpgk/neighborhood.hpp"

#include <algorithm>
#include <atomic>
#include <utility>

#include "maddpgk/errors.hpp"

namespace maddpgk {

double MetricSpec::operator()(const Position& a, const Position& b) const {
  if (id == "euclidean") return (a - b).norm();
  if (!custom) throw ConfigError("metric '" + id + "' has no function attached");
  return custom(a, b);
}

MetricSpec metric_from_name(const std::string& name) {
  if (name == "euclidean") return MetricSpec::euclidean();
  throw ConfigError("unknown metric '" + name + "' (only 'euclidean' is built in)");
}

IndexSets compute_index_sets(std::span<const Position> positions, std::span<const int> k_per_agent,
                             const MetricSpec& metric) {
  const int n = static_cast<int>(positions.size());
  if (n < 1) throw ContractViolation("compute_index_sets: need at least one agent");
  if (static_cast<int>(k_per_agent.size()) != n) {
    throw ContractViolation("compute_index_sets: one K per agent required");
  }

  // Pairwise distances, row i measured from agent i.
  const bool symmetric = metric.id == "euclidean";
  Eigen::MatrixXd distance(n, n);
  for (int i = 0; i < n; ++i) {
    distance(i, i) = 0.0;
    for (int j = symmetric ? i + 1 : 0; j < n; ++j) {
      if (j == i) continue;
      const double d = metric(positions[static_cast<std::size_t>(i)], positions[static_cast<std::size_t>(j)]);
      distance(i, j) = d;
      if (symmetric) distance(j, i) = d;
    }
  }

  IndexSets sets(static_cast<std::size_t>(n));
  std::vector<int> candidates;
  candidates.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    int k = k_per_agent[static_cast<std::size_t>(i)];
    if (k < 0) throw ContractViolation("compute_index_sets: K must be non-negative");
    if (k > n - 1) {
      static std::atomic<bool> warned{false};
      if (!warned.exchange(true)) {
        log_warning("K=" + std::to_string(k) + " exceeds n-1=" + std::to_string(n - 1) + "; clamping");
      }
      k = n - 1;
    }
    candidates.clear();
    for (int j = 0; j < n; ++j) {
      if (j != i) candidates.push_back(j);
    }
    auto closer = [&distance, i](int a, int b) {
      const double da = distance(i, a);
      const double db = distance(i, b);
      return da < db || (da == db && a < b);
    };
    std::partial_sort(candidates.begin(), candidates.begin() + k, candidates.end(), closer);
    sets[static_cast<std::size_t>(i)].assign(candidates.begin(), candidates.begin() + k);
  }
  return sets;
}

std::vector<int> critic_slots(int agent, std::span<const int> neighbors, SlotOrder order) {
  std::vector<int> slots;
  slots.reserve(neighbors.size() + 1);
  slots.push_back(agent);
  slots.insert(slots.end(), neighbors.begin(), neighbors.end());
  if (order == SlotOrder::kAgentIndex) std::sort(slots.begin(), slots.end());
  return slots;
}

Eigen::VectorXd gather_critic_input(int agent, std::span<const Eigen::VectorXd> observations,
                                    std::span<const Eigen::VectorXd> actions,
                                    std::span<const int> neighbors, SlotOrder order,
                                    Eigen::Index slot_obs_width) {
  const int n = static_cast<int>(observations.size());
  if (static_cast<int>(actions.size()) != n) {
    throw ContractViolation("gather_critic_input: observation/action count mismatch");
  }
  if (agent < 0 || agent >= n) throw ContractViolation("gather_critic_input: agent out of range");
  const std::vector<int> slots = critic_slots(agent, neighbors, order);
  Eigen::Index obs_width = slot_obs_width;
  Eigen::Index action_width = actions[static_cast<std::size_t>(agent)].size();
  for (int j : slots) {
    if (j < 0 || j >= n) throw ContractViolation("gather_critic_input: neighbor out of range");
    const auto& o = observations[static_cast<std::size_t>(j)];
    if (slot_obs_width < 0) {
      if (obs_width < 0) obs_width = o.size();
      if (o.size() != obs_width) {
        throw ContractViolation("gather_critic_input: heterogeneous observation sizes need a slot width");
      }
    } else if (o.size() > slot_obs_width) {
      throw ContractViolation("gather_critic_input: observation wider than its slot");
    }
    if (actions[static_cast<std::size_t>(j)].size() != action_width) {
      throw ContractViolation("gather_critic_input: heterogeneous action sizes");
    }
  }
  {
    std::vector<int> sorted = slots;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      throw ContractViolation("gather_critic_input: index set repeats an agent or contains itself");
    }
  }

  const Eigen::Index slot_width = obs_width + action_width;
  Eigen::VectorXd input = Eigen::VectorXd::Zero(slot_width * static_cast<Eigen::Index>(slots.size()));
  Eigen::Index offset = 0;
  for (int j : slots) {
    const auto& o = observations[static_cast<std::size_t>(j)];
    input.segment(offset, o.size()) = o;
    input.segment(offset + obs_width, action_width) = actions[static_cast<std::size_t>(j)];
    offset += slot_width;
  }
  return input;
}

}  // namespace maddpgk
