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

#include "maddpgk/replay.hpp"

#include <algorithm>
#include <utility>

#include "maddpgk/errors.hpp"

namespace maddpgk {

std::size_t index_entry_count(const Transition& transition) {
  std::size_t count = 0;
  for (const auto& set : transition.index_sets) count += set.size();
  for (const auto& set : transition.next_index_sets) count += set.size();
  return count;
}

namespace {

void validate_sets(const IndexSets& sets, std::size_t n) {
  if (sets.size() != n) throw ContractViolation("transition: index sets must cover every agent");
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<int> seen = sets[i];
    std::sort(seen.begin(), seen.end());
    if (std::adjacent_find(seen.begin(), seen.end()) != seen.end()) {
      throw ContractViolation("transition: duplicate neighbor index");
    }
    for (int j : seen) {
      if (j < 0 || static_cast<std::size_t>(j) >= n || static_cast<std::size_t>(j) == i) {
        throw ContractViolation("transition: invalid neighbor index");
      }
    }
  }
}

}  // namespace

void validate(const Transition& transition) {
  const std::size_t n = transition.observations.size();
  if (transition.actions.size() != n || transition.next_observations.size() != n ||
      static_cast<std::size_t>(transition.rewards.size()) != n) {
    throw ContractViolation("transition: per-agent containers differ in length");
  }
  if (transition.index_sets.empty() != transition.next_index_sets.empty()) {
    throw ContractViolation("transition: index sets must be stored for both states or neither");
  }
  if (!transition.index_sets.empty()) {
    validate_sets(transition.index_sets, n);
    validate_sets(transition.next_index_sets, n);
  }
}

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw ConfigError("replay capacity must be positive");
}

void ReplayBuffer::push(Transition transition) {
  if (storage_.size() < capacity_) {
    storage_.push_back(std::move(transition));
  } else {
    storage_[oldest_] = std::move(transition);
    oldest_ = (oldest_ + 1) % capacity_;
  }
  ++pushed_;
}

std::optional<Batch> ReplayBuffer::sample(std::size_t batch_size, std::mt19937_64& rng) const {
  if (batch_size == 0 || storage_.size() < batch_size) return std::nullopt;
  std::uniform_int_distribution<std::size_t> pick(0, storage_.size() - 1);
  Batch batch;
  batch.reserve(batch_size);
  for (std::size_t i = 0; i < batch_size; ++i) batch.push_back(&storage_[pick(rng)]);
  return batch;
}

const Transition& ReplayBuffer::at(std::size_t i) const {
  if (i >= storage_.size()) throw ContractViolation("replay: index out of range");
  return storage_[(oldest_ + i) % storage_.size()];
}

}  // namespace maddpgk
