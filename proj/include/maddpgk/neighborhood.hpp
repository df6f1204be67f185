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

#ifndef MADDPGK_NEIGHBORHOOD_HPP_
#define MADDPGK_NEIGHBORHOOD_HPP_

#include <Eigen/Dense>

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace maddpgk {

using Position = Eigen::Vector2d;

// Per-agent neighbor lists. Entry i holds the indices of agent i's nearest
// other agents, nearest first, ties broken by ascending index.
using IndexSets = std::vector<std::vector<int>>;

struct MetricSpec {
  // "euclidean" or "custom"; a custom spec must carry `custom`.
  std::string id = "euclidean";
  std::function<double(const Position&, const Position&)> custom;

  static MetricSpec euclidean() { return {}; }
  static MetricSpec from_function(std::function<double(const Position&, const Position&)> fn) {
    return {"custom", std::move(fn)};
  }

  double operator()(const Position& a, const Position& b) const;
};

MetricSpec metric_from_name(const std::string& name);

// Brute-force K-nearest-neighbor sets over all agents. K_i above n-1 is
// clamped (with a one-time warning).
IndexSets compute_index_sets(std::span<const Position> positions, std::span<const int> k_per_agent,
                             const MetricSpec& metric = {});

// Order of agent slots in a neighborhood critic input.
enum class SlotOrder {
  kSelfFirst,   // [self, nearest, ..., K-th nearest]
  kAgentIndex,  // self and its neighbors merged in ascending agent index
};

// Agent index occupying each slot of agent `agent`'s critic input.
std::vector<int> critic_slots(int agent, std::span<const int> neighbors,
                              SlotOrder order = SlotOrder::kSelfFirst);

// Concatenates [o_agent, a_agent, o_j1, a_j1, ...] following `critic_slots`.
// Observations shorter than `slot_obs_width` are zero-padded; pass a
// negative width to require that all participating observations share one
// size.
Eigen::VectorXd gather_critic_input(int agent, std::span<const Eigen::VectorXd> observations,
                                    std::span<const Eigen::VectorXd> actions,
                                    std::span<const int> neighbors,
                                    SlotOrder order = SlotOrder::kSelfFirst,
                                    Eigen::Index slot_obs_width = -1);

}  // namespace maddpgk

#endif  // MADDPGK_NEIGHBORHOOD_HPP_
