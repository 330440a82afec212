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

#include "cosmo_evo/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "cosmo_evo/errors.hpp"

namespace cosmo_evo::evolution {

void EvoConfig::validate() const {
  if (period < 1) throw ConfigError("evo.period", "must be >= 1");
  if (!(mutation_rate >= 0.0 && mutation_rate <= 1.0))
    throw ConfigError("evo.mutation_rate", "must be in [0, 1]");
  if (!(parent_fraction > 0.0 && parent_fraction <= 1.0))
    throw ConfigError("evo.parent_fraction", "must be in (0, 1]");
  if (!(weights.alpha >= 0.0)) throw ConfigError("evo.alpha", "must be >= 0");
  if (!(weights.beta >= 0.0)) throw ConfigError("evo.beta", "must be >= 0");
  if (!(weights.gamma >= 0.0)) throw ConfigError("evo.gamma", "must be >= 0");
}

double fitness(double reward, const EnterpriseSignals& s, const FitnessWeights& w) {
  return reward + w.alpha * s.efficiency + w.beta * s.compliance + w.gamma * s.scalability;
}

EnterpriseSignals enterprise_signals(const env::ActionSequence& seq, const EvoConfig& cfg,
                                     const env::EnvConfig& env) {
  EnterpriseSignals out;
  const std::set<int> distinct(seq.actions.begin(), seq.actions.end());
  out.efficiency = env.action_max == 0
                       ? 1.0
                       : 1.0 - static_cast<double>(distinct.size() - 1) /
                                   static_cast<double>(env.action_max);
  out.efficiency = std::clamp(out.efficiency, 0.0, 1.0);
  out.compliance =
      (cfg.forbidden_action && distinct.contains(*cfg.forbidden_action)) ? 0.0 : 1.0;
  if (seq.size() < 2) {
    out.scalability = 1.0;
  } else {
    std::size_t rising = 0;
    for (std::size_t i = 1; i < seq.size(); ++i) rising += seq[i - 1] <= seq[i];
    out.scalability = static_cast<double>(rising) / static_cast<double>(seq.size() - 1);
  }
  return out;
}

namespace {

bool fitter(const replay::BufferItem& a, const replay::BufferItem& b) {
  if (a.fitness != b.fitness) return a.fitness > b.fitness;
  if (a.priority != b.priority) return a.priority > b.priority;
  return a.id < b.id;
}

}  // namespace

void sort_by_fitness(std::vector<replay::BufferItem>& items) {
  std::sort(items.begin(), items.end(), fitter);
}

std::optional<std::uint64_t> fittest_id(std::span<const replay::BufferItem> items) {
  if (items.empty()) return std::nullopt;
  return std::min_element(items.begin(), items.end(), fitter)->id;
}

std::vector<replay::BufferItem> select_parents(const replay::ReplayBuffer& buffer,
                                               double parent_fraction) {
  if (buffer.size() <= 1) {
    throw BufferTooSmall("parent selection needs more than one buffer item, have " +
                         std::to_string(buffer.size()));
  }
  std::vector<replay::BufferItem> sorted(buffer.items().begin(), buffer.items().end());
  sort_by_fitness(sorted);
  const std::size_t count =
      std::clamp<std::size_t>(replay::fraction_count(parent_fraction, sorted.size()), 1,
                              sorted.size());
  sorted.resize(count);
  return sorted;
}

env::ActionSequence mutate(const env::ActionSequence& seq, double rate, Rng& rng,
                           const env::EnvConfig& env) {
  env::ActionSequence out = seq;
  if (rate <= 0.0 || env.action_max == 0) return out;
  for (auto& a : out.actions) {
    if (!rng.bernoulli(rate)) continue;
    const int pick = rng.uniform_int(0, env.action_max - 1);
    a = pick < a ? pick : pick + 1;
  }
  return out;
}

EvoStats evolutionary_update(replay::ReplayBuffer& buffer, const env::EnvConfig& env,
                             const EvoConfig& evo, const affect::AffectConfig& affect_cfg,
                             const UpdateContext& ctx) {
  if (buffer.size() <= 1) {
    throw BufferTooSmall("evolutionary update needs more than one buffer item, have " +
                         std::to_string(buffer.size()));
  }
  EvoStats stats;
  stats.step = ctx.step;

  // Rewards are re-evaluated so a shifted environment is reflected in
  // selection; without a shift this leaves every item untouched.
  for (auto& item : buffer.mutable_items()) {
    const double r = env::reward(item.trajectory, env);
    if (r != item.reward) {
      item = [&] {
        auto refreshed = replay::make_item(item.trajectory, r, r - ctx.baseline, affect_cfg,
                                           item.birth_step, item.generation);
        refreshed.id = item.id;
        return refreshed;
      }();
    }
    item.fitness = fitness(item.reward, enterprise_signals(item.trajectory, evo, env), evo.weights);
  }
  stats.max_fitness_before = -std::numeric_limits<double>::infinity();
  for (const auto& item : buffer.items())
    stats.max_fitness_before = std::max(stats.max_fitness_before, item.fitness);

  auto parents = select_parents(buffer, evo.parent_fraction);
  stats.parents = parents.size();

  std::vector<replay::BufferItem> offspring(parents.size());
  const auto count = static_cast<std::int64_t>(parents.size());
#pragma omp parallel for schedule(static) if (ctx.parallel)
  for (std::int64_t k = 0; k < count; ++k) {
    const auto& parent = parents[static_cast<std::size_t>(k)];
    Rng rng(derive_seed({ctx.stream_seed, static_cast<std::uint64_t>(ctx.step), parent.id}));
    auto child = mutate(parent.trajectory, evo.mutation_rate, rng, env);
    const double r = env::reward(child, env);
    auto item = replay::make_item(std::move(child), r, r - ctx.baseline, affect_cfg, ctx.step,
                                  parent.generation + 1);
    item.fitness = fitness(r, enterprise_signals(item.trajectory, evo, env), evo.weights);
    offspring[static_cast<std::size_t>(k)] = std::move(item);
  }
  stats.offspring = offspring.size();
  stats.best_offspring_reward = -std::numeric_limits<double>::infinity();
  stats.offspring_trajectories.reserve(offspring.size());
  stats.offspring_rewards.reserve(offspring.size());
  for (const auto& child : offspring) {
    stats.best_offspring_reward = std::max(stats.best_offspring_reward, child.reward);
    stats.offspring_trajectories.push_back(child.trajectory);
    stats.offspring_rewards.push_back(child.reward);
  }

  std::vector<replay::BufferItem> next = std::move(parents);
  next.insert(next.end(), std::make_move_iterator(offspring.begin()),
              std::make_move_iterator(offspring.end()));
  buffer.replace(std::move(next));  // offspring receive ids in parent order

  const auto elite = fittest_id(buffer.items());
  stats.pruned = buffer.prune(affect_cfg, elite);
  stats.evicted = buffer.enforce_capacity(ctx.novelty_mu, elite);

  stats.max_fitness_after = -std::numeric_limits<double>::infinity();
  for (const auto& item : buffer.items())
    stats.max_fitness_after = std::max(stats.max_fitness_after, item.fitness);
  stats.size_after = buffer.size();
  return stats;
}

}  // namespace cosmo_evo::evolution
