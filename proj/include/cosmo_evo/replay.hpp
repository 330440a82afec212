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
#include <span>
#include <vector>

#include "cosmo_evo/affect.hpp"
#include "cosmo_evo/env.hpp"
#include "cosmo_evo/rng.hpp"

namespace cosmo_evo::replay {

struct BufferItem {
  std::uint64_t id = 0;
  env::ActionSequence trajectory;
  double reward = 0.0;
  double td = 0.0;
  affect::AffectTag tag;
  double priority = 0.0;
  double fitness = 0.0;
  std::int64_t birth_step = 0;
  std::uint32_t generation = 0;  // 0 = collected, k = k-th mutation generation
};

// Builds an item with tag and priority filled in from reward and td.
BufferItem make_item(env::ActionSequence trajectory, double reward, double td,
                     const affect::AffectConfig& cfg, std::int64_t birth_step,
                     std::uint32_t generation = 0);

struct SampleSpec {
  std::size_t batch_size = 32;
  double high_fraction = 0.8;
  double top_fraction = 0.2;
  double novelty_mu = 0.0;

  void validate() const;
  bool operator==(const SampleSpec&) const = default;
};

struct InsertOutcome {
  std::uint64_t id = 0;  // id assigned to the incoming item
  bool stored = true;    // false when the incoming item itself was evicted
  std::optional<std::uint64_t> evicted_id;
};

// ceil(fraction * n) with a small tolerance so 0.8 * 5 gives 4, not 5.
std::size_t fraction_count(double fraction, std::size_t n);

// Nearest-neighbour novelty sample size.
inline constexpr std::size_t kNoveltySample = 64;

/// Capacity-bounded experience buffer.
///
/// Items are kept in insertion order; every scan is linear, which is fine at
/// the sizes used here (capacity ~1e3). A buffer has a single writer.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity = 1000);

  std::size_t capacity() const noexcept { return capacity_; }
  std::size_t size() const noexcept { return items_.size(); }
  bool empty() const noexcept { return items_.empty(); }
  std::span<const BufferItem> items() const noexcept { return items_; }
  std::uint64_t next_id() const noexcept { return next_id_; }

  // Stores `item` under a fresh id. At capacity, the item with the lowest
  // effective priority among residents plus the incoming item is dropped,
  // oldest first on ties.
  InsertOutcome insert(BufferItem item, double novelty_mu = 0.0);

  // Removes every prunable item except the single highest-priority one and,
  // if given, the item with id `keep`.
  std::size_t prune(const affect::AffectConfig& cfg, std::optional<std::uint64_t> keep = {});

  std::vector<BufferItem> sample_minibatch(const SampleSpec& spec, Rng& rng) const;

  // Normalized Hamming distance from `item` to its nearest neighbour among up
  // to 64 other items. 1 when there are no other items.
  double novelty(const BufferItem& item) const;
  double effective_priority(const BufferItem& item, double novelty_mu) const;

  // Items ordered by effective priority, highest first, ties by smaller id.
  std::vector<std::size_t> priority_order(double novelty_mu) const;

  // Wholesale replacement used by the evolutionary update. Ids are kept;
  // items without an id (0) get a fresh one.
  void replace(std::vector<BufferItem> items);

  // Drops lowest-effective-priority items until size <= capacity. Returns
  // how many were dropped. The item with id `keep` is never dropped.
  std::size_t enforce_capacity(double novelty_mu = 0.0, std::optional<std::uint64_t> keep = {});

  std::uint64_t allocate_id() noexcept { return next_id_++; }

  // Mutable access for in-place fitness recomputation.
  std::span<BufferItem> mutable_items() noexcept { return items_; }

 private:
  std::size_t capacity_;
  std::uint64_t next_id_ = 1;
  std::vector<BufferItem> items_;
};

// Novelty of pool[index] against the rest of `pool`.
double novelty_in_pool(std::span<const BufferItem> pool, std::size_t index);

}  // namespace cosmo_evo::replay
