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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>
#include <random>

#include "maddpgk/errors.hpp"
#include "maddpgk/replay.hpp"

namespace maddpgk {
namespace {

// Transition whose reward of agent 0 records `tag`.
Transition make_transition(double tag, int n = 2, int k = 1) {
  Transition t;
  for (int i = 0; i < n; ++i) {
    t.observations.push_back(Eigen::VectorXd::Constant(3, tag + i));
    t.actions.push_back(Eigen::VectorXd::Constant(5, 0.5));
    t.next_observations.push_back(Eigen::VectorXd::Constant(3, tag - i));
  }
  t.rewards = Eigen::VectorXd::Constant(n, tag);
  if (k > 0) {
    for (int i = 0; i < n; ++i) {
      std::vector<int> set;
      for (int j = 0; j < n && static_cast<int>(set.size()) < k; ++j) if (j != i) set.push_back(j);
      t.index_sets.push_back(set);
      t.next_index_sets.push_back(set);
    }
  }
  return t;
}

TEST_CASE("pushing capacity + 1 items evicts the first") {
  ReplayBuffer buffer(4);
  for (int i = 0; i < 5; ++i) buffer.push(make_transition(i));
  CHECK(buffer.size() == 4);
  CHECK(buffer.total_pushed() == 5);
  for (std::size_t i = 0; i < buffer.size(); ++i) CHECK(buffer.at(i).rewards(0) == doctest::Approx(i + 1.0));
}

TEST_CASE("eviction order equals insertion order") {
  ReplayBuffer buffer(7);
  for (int i = 0; i < 30; ++i) {
    buffer.push(make_transition(i));
    const std::size_t size = buffer.size();
    for (std::size_t j = 0; j < size; ++j) CHECK(buffer.at(j).rewards(0) == doctest::Approx(i + 1 - static_cast<double>(size) + j));
  }
}

TEST_CASE("stored index entries are 2 * n * K per transition") {
  const Transition t = make_transition(0.0, 4, 2);
  CHECK(index_entry_count(t) == 16);
  CHECK_NOTHROW(validate(t));
  CHECK(index_entry_count(make_transition(0.0, 4, 0)) == 0);
}

TEST_CASE("pushed transition is retrievable bit-identical") {
  ReplayBuffer buffer(3);
  Transition t = make_transition(0.1234567890123, 3, 2);
  t.observations[1](2) = std::nextafter(1.0, 2.0);
  const Transition copy = t;
  buffer.push(std::move(t));
  const Transition& stored = buffer.at(0);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(stored.observations[i] == copy.observations[i]);
    CHECK(stored.next_observations[i] == copy.next_observations[i]);
    CHECK(stored.actions[i] == copy.actions[i]);
  }
  CHECK(stored.rewards == copy.rewards);
  CHECK(stored.index_sets == copy.index_sets);
  CHECK(stored.next_index_sets == copy.next_index_sets);
}

TEST_CASE("sample readiness and determinism") {
  ReplayBuffer buffer(10);
  std::mt19937_64 rng(1);
  CHECK_FALSE(buffer.sample(1, rng).has_value());
  buffer.push(make_transition(5.0));
  const auto one = buffer.sample(1, rng);
  REQUIRE(one.has_value());
  CHECK((*one)[0] == &buffer.at(0));
  CHECK_FALSE(buffer.sample(2, rng).has_value());

  for (int i = 0; i < 9; ++i) buffer.push(make_transition(i));
  std::mt19937_64 a(42);
  std::mt19937_64 b(42);
  CHECK(*buffer.sample(8, a) == *buffer.sample(8, b));
}

TEST_CASE("sampling is uniform within 5 sigma") {
  ReplayBuffer buffer(10);
  for (int i = 0; i < 10; ++i) buffer.push(make_transition(i));
  std::map<const Transition*, int> counts;
  std::mt19937_64 rng(2024);
  constexpr int kDraws = 100000;
  for (int draw = 0; draw < kDraws / 10; ++draw) {
    const auto batch = buffer.sample(10, rng);
    for (const Transition* t : *batch) ++counts[t];
  }
  // Binomial(1e5, 0.1): mean 1e4, sigma sqrt(9000) ~ 94.9.
  const double sigma = std::sqrt(kDraws * 0.1 * 0.9);
  CHECK(counts.size() == 10);
  for (const auto& [t, count] : counts) CHECK(std::abs(count - kDraws * 0.1) < 5 * sigma);
}

TEST_CASE("validation catches malformed transitions") {
  Transition t = make_transition(0.0, 3, 1);
  t.rewards = Eigen::VectorXd::Zero(2);
  CHECK_THROWS_AS(validate(t), ContractViolation);
  Transition self_ref = make_transition(0.0, 3, 1);
  self_ref.index_sets[0] = {0};
  CHECK_THROWS_AS(validate(self_ref), ContractViolation);
  Transition one_sided = make_transition(0.0, 3, 1);
  one_sided.next_index_sets.clear();
  CHECK_THROWS_AS(validate(one_sided), ContractViolation);
  CHECK_THROWS_AS(ReplayBuffer(0), ConfigError);
}

}  // namespace
}  // namespace maddpgk
