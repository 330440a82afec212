// Copyright 2026 The cosmo-evo Authors
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

#pragma once

#include <compare>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "cosmo_evo/rng.hpp"

namespace cosmo_evo::env {

// A toy "program": a fixed-length sequence of small integer action ids.
struct ActionSequence {
  std::vector<int> actions;

  ActionSequence() = default;
  explicit ActionSequence(std::vector<int> a) : actions(std::move(a)) {}
  ActionSequence(std::initializer_list<int> a) : actions(a) {}

  std::size_t size() const noexcept { return actions.size(); }
  int operator[](std::size_t i) const { return actions[i]; }
  long sum() const noexcept;

  auto operator<=>(const ActionSequence&) const = default;
};

struct EnvConfig {
  int length = 5;
  int action_max = 5;
  int target = 15;
  double reward_base = 10.0;

  int num_actions() const noexcept { return action_max + 1; }
  void validate() const;

  bool operator==(const EnvConfig&) const = default;
};

struct ShiftEntry {
  std::int64_t activation_step = 0;
  int new_target = 0;

  bool operator==(const ShiftEntry&) const = default;
};

// Ordered target changes. Activation steps must be strictly increasing.
struct ShiftSchedule {
  std::vector<ShiftEntry> entries;

  bool empty() const noexcept { return entries.empty(); }
  void validate() const;

  bool operator==(const ShiftSchedule&) const = default;
};

struct OracleReport {
  double expected_random_reward = 0.0;
  double optimal_reward = 0.0;
  std::uint64_t optimal_count = 0;
  std::uint64_t total_sequences = 0;
};

inline constexpr std::uint64_t kEnumerationLimit = 10'000'000;

// Throws InvalidInput when seq has the wrong length or an action out of range.
void validate(const ActionSequence& seq, const EnvConfig& cfg);

// reward_base - |sum(seq) - target|
double reward(const ActionSequence& seq, const EnvConfig& cfg);

ActionSequence sample_random(Rng& rng, const EnvConfig& cfg);

// (A_max+1)^L, or 0 when that exceeds kEnumerationLimit.
std::uint64_t sequence_count(const EnvConfig& cfg);

// Sequence with the given mixed-radix index (position 0 is most significant).
ActionSequence sequence_at(std::uint64_t index, const EnvConfig& cfg);

// Exhaustive enumeration. The OpenMP version splits the index range; the
// serial version walks an odometer and is kept as the reference.
OracleReport oracle_enumerate(const EnvConfig& cfg);
OracleReport oracle_enumerate_serial(const EnvConfig& cfg);

struct MonteCarloEstimate {
  double mean = 0.0;
  double standard_error = 0.0;
  std::uint64_t samples = 0;
};

MonteCarloEstimate monte_carlo_random_reward(const EnvConfig& cfg, std::uint64_t n, Rng& rng);

EnvConfig apply_shift(const EnvConfig& cfg, std::int64_t step, const ShiftSchedule& schedule);

}  // namespace cosmo_evo::env
