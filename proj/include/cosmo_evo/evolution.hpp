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

#include <cstdint>
#include <optional>
#include <vector>

#include "cosmo_evo/affect.hpp"
#include "cosmo_evo/env.hpp"
#include "cosmo_evo/replay.hpp"
#include "cosmo_evo/rng.hpp"

namespace cosmo_evo::evolution {

struct FitnessWeights {
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;

  bool all_zero() const noexcept { return alpha == 0.0 && beta == 0.0 && gamma == 0.0; }
  bool operator==(const FitnessWeights&) const = default;
};

// Toy stand-ins for efficiency (e), compliance (c) and scalability (s).
struct EnterpriseSignals {
  double efficiency = 0.0;   // [0, 1]
  double compliance = 0.0;   // {0, 1}
  double scalability = 0.0;  // [0, 1]
};

struct EvoConfig {
  std::int64_t period = 10;
  double mutation_rate = 0.2;
  double parent_fraction = 0.5;
  FitnessWeights weights;
  std::optional<int> forbidden_action = 0;

  void validate() const;
  bool operator==(const EvoConfig&) const = default;
};

// r + alpha*e + beta*c + gamma*s
double fitness(double reward, const EnterpriseSignals& signals, const FitnessWeights& w);

// e = 1 - (distinct values - 1) / A_max, c = forbidden action absent,
// s = fraction of adjacent pairs that are non-decreasing.
EnterpriseSignals enterprise_signals(const env::ActionSequence& seq, const EvoConfig& cfg,
                                     const env::EnvConfig& env);

// Orders items by fitness descending, then priority descending, then id.
void sort_by_fitness(std::vector<replay::BufferItem>& items);

// Top ceil(parent_fraction * |buffer|) items. Throws BufferTooSmall when the
// buffer holds one item or fewer.
std::vector<replay::BufferItem> select_parents(const replay::ReplayBuffer& buffer,
                                               double parent_fraction);

// Each position is resampled with probability `rate` to a uniformly chosen
// different action.
env::ActionSequence mutate(const env::ActionSequence& seq, double rate, Rng& rng,
                           const env::EnvConfig& env);

struct EvoStats {
  std::int64_t step = 0;
  std::size_t parents = 0;
  std::size_t offspring = 0;
  std::size_t pruned = 0;
  std::size_t evicted = 0;
  double best_offspring_reward = 0.0;
  double max_fitness_before = 0.0;
  double max_fitness_after = 0.0;
  std::size_t size_after = 0;
  // Every offspring produced, in parent order, before pruning.
  std::vector<env::ActionSequence> offspring_trajectories;
  std::vector<double> offspring_rewards;
};

struct UpdateContext {
  double baseline = 0.0;            // TD reference for offspring
  std::uint64_t stream_seed = 0;    // run seed; offspring streams derive from it
  std::int64_t step = 0;
  double novelty_mu = 0.0;          // for capacity enforcement
  bool parallel = true;             // evaluate offspring with OpenMP
};

// Item whose fitness is highest under the ordering of sort_by_fitness.
std::optional<std::uint64_t> fittest_id(std::span<const replay::BufferItem> items);

/// One evolutionary update of the buffer.
///
/// Refreshes rewards under the current environment and recomputes fitness,
/// keeps the fittest parent_fraction as parents, adds one mutated and
/// re-evaluated offspring per parent, then prunes and enforces capacity. The
/// fittest item is protected from pruning and eviction.
///
/// Each offspring draws from its own stream derived from (stream_seed, step,
/// parent id), so the parallel and serial paths give identical buffers.
EvoStats evolutionary_update(replay::ReplayBuffer& buffer, const env::EnvConfig& env,
                             const EvoConfig& evo, const affect::AffectConfig& affect_cfg,
                             const UpdateContext& ctx);

}  // namespace cosmo_evo::evolution
