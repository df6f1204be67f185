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

#ifndef MADDPGK_REPLAY_HPP_
#define MADDPGK_REPLAY_HPP_

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <random>
#include <vector>

#include "maddpgk/neighborhood.hpp"

namespace maddpgk {

// One joint environment step for all n agents. The index sets are empty when
// the run does not store them.
struct Transition {
  std::vector<Eigen::VectorXd> observations;
  std::vector<Eigen::VectorXd> actions;
  Eigen::VectorXd rewards;
  std::vector<Eigen::VectorXd> next_observations;
  IndexSets index_sets;
  IndexSets next_index_sets;

  std::size_t agent_count() const { return observations.size(); }
  bool has_index_sets() const { return !index_sets.empty(); }
};

// Number of stored neighbor indices, summed over both sets.
std::size_t index_entry_count(const Transition& transition);

// Throws ContractViolation when per-agent containers disagree in length or
// an index set is malformed.
void validate(const Transition& transition);

using Batch = std::vector<const Transition*>;

// Fixed-capacity FIFO store with uniform sampling with replacement.
class ReplayBuffer {
 public:
  static constexpr std::size_t kDefaultCapacity = 100000;

  explicit ReplayBuffer(std::size_t capacity = kDefaultCapacity);

  void push(Transition transition);

  // `batch_size` uniform draws with replacement, or nullopt while fewer than
  // `batch_size` transitions are stored.
  std::optional<Batch> sample(std::size_t batch_size, std::mt19937_64& rng) const;

  // i = 0 is the oldest stored transition.
  const Transition& at(std::size_t i) const;

  std::size_t size() const { return storage_.size(); }
  std::size_t capacity() const { return capacity_; }
  std::size_t total_pushed() const { return pushed_; }
  bool empty() const { return storage_.empty(); }

 private:
  std::size_t capacity_;
  std::vector<Transition> storage_;
  std::size_t oldest_ = 0;
  std::size_t pushed_ = 0;
};

}  // namespace maddpgk

#endif  // MADDPGK_REPLAY_HPP_
