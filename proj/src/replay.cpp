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

#include "cosmo_evo/replay.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cosmo_evo/errors.hpp"

namespace cosmo_evo::replay {

BufferItem make_item(env::ActionSequence trajectory, double reward, double td,
                     const affect::AffectConfig& cfg, std::int64_t birth_step,
                     std::uint32_t generation) {
  BufferItem item;
  item.trajectory = std::move(trajectory);
  item.reward = reward;
  item.td = td;
  item.tag = affect::tag(reward, td, cfg);
  item.priority = affect::priority(td, item.tag, cfg.lambda);
  item.fitness = reward;
  item.birth_step = birth_step;
  item.generation = generation;
  return item;
}

void SampleSpec::validate() const {
  if (batch_size == 0) throw ConfigError("sample.batch_size", "must be positive");
  if (!(high_fraction >= 0.0 && high_fraction <= 1.0))
    throw ConfigError("sample.high_fraction", "must be in [0, 1]");
  if (!(top_fraction > 0.0 && top_fraction <= 1.0))
    throw ConfigError("sample.top_fraction", "must be in (0, 1]");
  if (!(novelty_mu >= 0.0)) throw ConfigError("sample.novelty_mu", "must be >= 0");
}

std::size_t fraction_count(double fraction, std::size_t n) {
  const double x = fraction * static_cast<double>(n);
  return static_cast<std::size_t>(std::ceil(x - 1e-9));
}

double novelty_in_pool(std::span<const BufferItem> pool, std::size_t index) {
  const std::size_t others = pool.size() - 1;
  if (others == 0) return 1.0;
  const BufferItem& self = pool[index];
  const auto length = self.trajectory.size();
  if (length == 0) return 0.0;

  auto hamming = [&](const BufferItem& other) {
    std::size_t d = 0;
    for (std::size_t i = 0; i < length; ++i) d += self.trajectory[i] != other.trajectory[i];
    return d;
  };

  std::size_t nearest = length;
  if (others <= kNoveltySample) {
    for (std::size_t j = 0; j < pool.size() && nearest > 0; ++j) {
      if (j != index) nearest = std::min(nearest, hamming(pool[j]));
    }
  } else {
    // Floyd's sampling of kNoveltySample distinct other indices, seeded by
    // the item id so the neighbour sample is reproducible without an
    // external stream. Index `others` stands in for `index` itself.
    SplitMix64 rng(derive_seed({self.id, pool.size()}));
    std::size_t chosen[kNoveltySample];
    std::size_t n_chosen = 0;
    for (std::size_t j = others - kNoveltySample; j < others && nearest > 0; ++j) {
      std::size_t t = rng.uniform_index(j + 1);
      if (std::find(chosen, chosen + n_chosen, t) != chosen + n_chosen) t = j;
      chosen[n_chosen++] = t;
      const std::size_t pick = t == index ? others : t;
      nearest = std::min(nearest, hamming(pool[pick]));
    }
  }
  return static_cast<double>(nearest) / static_cast<double>(length);
}

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity_ == 0) throw ConfigError("buffer.capacity", "must be positive");
  items_.reserve(capacity_ + 1);
}

namespace {

// Index of the lowest effective priority in `pool`, oldest on ties.
std::size_t lowest_index(std::span<const BufferItem> pool, double novelty_mu,
                         std::optional<std::uint64_t> keep = {}) {
  std::size_t worst = pool.size();
  double worst_p = 0.0;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    if (pool[i].id == keep) continue;
    double p = pool[i].priority;
    if (novelty_mu != 0.0) p += novelty_mu * novelty_in_pool(pool, i);
    if (worst == pool.size() || p < worst_p || (p == worst_p && pool[i].id < pool[worst].id)) {
      worst = i;
      worst_p = p;
    }
  }
  return worst;
}

}  // namespace

InsertOutcome ReplayBuffer::insert(BufferItem item, double novelty_mu) {
  InsertOutcome outcome;
  item.id = next_id_++;
  outcome.id = item.id;
  items_.push_back(std::move(item));
  if (items_.size() > capacity_) {
    const std::size_t worst = lowest_index(items_, novelty_mu);
    const std::uint64_t evicted = items_[worst].id;
    items_.erase(items_.begin() + static_cast<std::ptrdiff_t>(worst));
    if (evicted == outcome.id) {
      outcome.stored = false;
    } else {
      outcome.evicted_id = evicted;
    }
  }
  return outcome;
}

std::size_t ReplayBuffer::prune(const affect::AffectConfig& cfg, std::optional<std::uint64_t> keep) {
  if (items_.empty()) return 0;
  std::size_t top = 0;
  for (std::size_t i = 1; i < items_.size(); ++i) {
    const auto& a = items_[i];
    const auto& b = items_[top];
    if (a.priority > b.priority || (a.priority == b.priority && a.id < b.id)) top = i;
  }
  const std::uint64_t guard_id = items_[top].id;
  const auto before = items_.size();
  std::erase_if(items_, [&](const BufferItem& it) {
    return it.id != guard_id && it.id != keep && affect::is_prunable(it.tag, cfg);
  });
  return before - items_.size();
}

double ReplayBuffer::novelty(const BufferItem& item) const {
  for (std::size_t i = 0; i < items_.size(); ++i) {
    if (items_[i].id == item.id) return novelty_in_pool(items_, i);
  }
  // Not resident: measure against the whole buffer.
  std::vector<BufferItem> pool(items_.begin(), items_.end());
  pool.push_back(item);
  return novelty_in_pool(pool, pool.size() - 1);
}

double ReplayBuffer::effective_priority(const BufferItem& item, double novelty_mu) const {
  if (novelty_mu == 0.0) return item.priority;
  return item.priority + novelty_mu * novelty(item);
}

std::vector<std::size_t> ReplayBuffer::priority_order(double novelty_mu) const {
  std::vector<double> eff(items_.size());
  for (std::size_t i = 0; i < items_.size(); ++i) {
    eff[i] = items_[i].priority;
    if (novelty_mu != 0.0) eff[i] += novelty_mu * novelty_in_pool(items_, i);
  }
  std::vector<std::size_t> order(items_.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (eff[a] != eff[b]) return eff[a] > eff[b];
    return items_[a].id < items_[b].id;
  });
  return order;
}

std::vector<BufferItem> ReplayBuffer::sample_minibatch(const SampleSpec& spec, Rng& rng) const {
  if (items_.empty()) throw EmptyBuffer("cannot sample a minibatch from an empty buffer");
  const std::size_t high = std::min(fraction_count(spec.high_fraction, spec.batch_size),
                                    spec.batch_size);
  std::vector<BufferItem> batch;
  batch.reserve(spec.batch_size);
  if (high > 0) {
    const auto order = priority_order(spec.novelty_mu);
    const std::size_t top = std::clamp<std::size_t>(
        fraction_count(spec.top_fraction, items_.size()), 1, items_.size());
    for (std::size_t k = 0; k < high; ++k) batch.push_back(items_[order[rng.uniform_index(top)]]);
  }
  for (std::size_t k = high; k < spec.batch_size; ++k) {
    batch.push_back(items_[rng.uniform_index(items_.size())]);
  }
  return batch;
}

void ReplayBuffer::replace(std::vector<BufferItem> items) {
  for (auto& it : items) {
    if (it.id == 0) it.id = next_id_++;
  }
  items_ = std::move(items);
}

std::size_t ReplayBuffer::enforce_capacity(double novelty_mu, std::optional<std::uint64_t> keep) {
  if (items_.size() <= capacity_) return 0;
  if (novelty_mu == 0.0) {
    // Priorities do not depend on buffer contents: drop the lowest in one
    // pass, oldest first among equal priorities.
    std::vector<std::size_t> order(items_.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      const bool ka = items_[a].id == keep;
      const bool kb = items_[b].id == keep;
      if (ka != kb) return kb;
      if (items_[a].priority != items_[b].priority) return items_[a].priority < items_[b].priority;
      return items_[a].id < items_[b].id;
    });
    const std::size_t excess = items_.size() - capacity_;
    std::vector<bool> keep(items_.size(), true);
    for (std::size_t k = 0; k < excess; ++k) keep[order[k]] = false;
    std::vector<BufferItem> kept;
    kept.reserve(capacity_);
    for (std::size_t i = 0; i < items_.size(); ++i) {
      if (keep[i]) kept.push_back(std::move(items_[i]));
    }
    items_ = std::move(kept);
    return excess;
  }
  std::size_t dropped = 0;
  while (items_.size() > capacity_) {
    items_.erase(items_.begin() +
                 static_cast<std::ptrdiff_t>(lowest_index(items_, novelty_mu, keep)));
    ++dropped;
  }
  return dropped;
}

}  // namespace cosmo_evo::replay
