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

#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <set>

#include "cosmo_evo/errors.hpp"
#include "cosmo_evo/replay.hpp"

namespace cosmo_evo::replay {
namespace {

// An item with a given priority and tag; reward and td are not used by the
// buffer itself.
BufferItem item(double p, double v = 0.9, double a = 0.9, env::ActionSequence traj = {3, 3, 3, 3, 3}) {
  BufferItem it;
  it.trajectory = std::move(traj);
  it.priority = p;
  it.tag = affect::AffectTag(v, a);
  return it;
}

std::multiset<double> priorities(const ReplayBuffer& b) {
  std::multiset<double> out;
  for (const auto& it : b.items()) out.insert(it.priority);
  return out;
}

TEST(Insert, EmptyBuffer) {
  ReplayBuffer b(3);
  const auto out = b.insert(item(0.4));
  EXPECT_EQ(b.size(), 1u);
  EXPECT_TRUE(out.stored);
  EXPECT_EQ(out.id, 1u);
}

TEST(Insert, EvictsLowestAtCapacity) {
  ReplayBuffer b(3);
  for (double p : {0.1, 0.5, 0.9}) b.insert(item(p));
  const auto out = b.insert(item(0.7));
  EXPECT_TRUE(out.stored);
  ASSERT_TRUE(out.evicted_id.has_value());
  EXPECT_EQ(*out.evicted_id, 1u);
  EXPECT_EQ(priorities(b), (std::multiset<double>{0.5, 0.7, 0.9}));
}

TEST(Insert, IncomingItemCanBeTheEvictee) {
  // Both insertion orders of a two-item union at capacity 1 keep the larger.
  for (const auto& [first, second] : {std::pair{0.9, 0.1}, std::pair{0.1, 0.9}}) {
    ReplayBuffer b(1);
    b.insert(item(first));
    const auto out = b.insert(item(second));
    ASSERT_EQ(b.size(), 1u);
    EXPECT_DOUBLE_EQ(b.items()[0].priority, 0.9);
    EXPECT_EQ(out.stored, second == 0.9);
  }
}

TEST(Insert, TiesEvictOldest) {
  ReplayBuffer b(2);
  b.insert(item(0.5));
  b.insert(item(0.5));
  const auto out = b.insert(item(0.5));
  EXPECT_EQ(*out.evicted_id, 1u);
  EXPECT_TRUE(out.stored);
}

TEST(Prune, EverythingButGuard) {
  ReplayBuffer b(10);
  for (double p : {0.3, 0.1, 0.7, 0.2}) b.insert(item(p, 0.0, 0.0));
  EXPECT_EQ(b.prune(affect::AffectConfig{}), 3u);
  ASSERT_EQ(b.size(), 1u);
  EXPECT_DOUBLE_EQ(b.items()[0].priority, 0.7);
}

TEST(Prune, NothingPrunable) {
  ReplayBuffer b(10);
  for (double p : {0.3, 0.1}) b.insert(item(p));
  std::vector<std::uint64_t> before;
  for (const auto& it : b.items()) before.push_back(it.id);
  EXPECT_EQ(b.prune(affect::AffectConfig{}), 0u);
  std::vector<std::uint64_t> after;
  for (const auto& it : b.items()) after.push_back(it.id);
  EXPECT_EQ(before, after);
}

TEST(Prune, MixedBuffer) {
  ReplayBuffer b(10);
  b.insert(item(0.2, 0.1, 0.1));
  b.insert(item(1.0, 0.9, 0.9));
  EXPECT_EQ(b.prune(affect::AffectConfig{}), 1u);
  EXPECT_EQ(b.prune(affect::AffectConfig{}), 0u);
}

TEST(Prune, KeepIdSurvives) {
  ReplayBuffer b(10);
  const auto keep = b.insert(item(0.1, 0.0, 0.0)).id;
  b.insert(item(0.9, 0.0, 0.0));
  b.insert(item(0.5, 0.0, 0.0));
  EXPECT_EQ(b.prune(affect::AffectConfig{}, keep), 1u);
  EXPECT_EQ(b.size(), 2u);
}

TEST(Sample, SplitBetweenTopAndWhole) {
  ReplayBuffer b(100);
  for (int i = 0; i < 10; ++i) b.insert(item(i));
  Rng rng(1);
  SampleSpec spec;
  spec.batch_size = 5;
  // Top ceil(0.2 * 10) = 2 items have priorities 9 and 8.
  for (int t = 0; t < 200; ++t) {
    const auto batch = b.sample_minibatch(spec, rng);
    ASSERT_EQ(batch.size(), 5u);
    for (int k = 0; k < 4; ++k) EXPECT_GE(batch[static_cast<std::size_t>(k)].priority, 8.0);
  }
}

TEST(Sample, UniformWhenHighFractionZero) {
  ReplayBuffer b(100);
  for (int i = 0; i < 10; ++i) b.insert(item(i));
  Rng rng(2);
  SampleSpec spec;
  spec.batch_size = 5;
  spec.high_fraction = 0.0;
  std::map<double, int> counts;
  for (int t = 0; t < 20000; ++t) {
    for (const auto& it : b.sample_minibatch(spec, rng)) counts[it.priority]++;
  }
  ASSERT_EQ(counts.size(), 10u);
  for (const auto& [p, c] : counts) EXPECT_NEAR(c / 100000.0, 0.1, 0.006);
}

TEST(Sample, SingleItemRepeated) {
  ReplayBuffer b(5);
  b.insert(item(0.3));
  Rng rng(3);
  SampleSpec spec;
  spec.batch_size = 3;
  const auto batch = b.sample_minibatch(spec, rng);
  ASSERT_EQ(batch.size(), 3u);
  for (const auto& it : batch) EXPECT_EQ(it.id, b.items()[0].id);
}

TEST(Sample, EmptyBufferThrows) {
  ReplayBuffer b(5);
  Rng rng(4);
  EXPECT_THROW(b.sample_minibatch(SampleSpec{}, rng), EmptyBuffer);
}

TEST(Sample, GreedyLimit) {
  ReplayBuffer b(100);
  for (int i = 0; i < 50; ++i) b.insert(item((i * 37) % 50));
  SampleSpec spec;
  spec.high_fraction = 1.0;
  spec.top_fraction = 1e-6;
  Rng rng(5);
  for (const auto& it : b.sample_minibatch(spec, rng)) EXPECT_DOUBLE_EQ(it.priority, 49.0);
}

TEST(Sample, Deterministic) {
  ReplayBuffer b(100);
  for (int i = 0; i < 30; ++i) b.insert(item(i % 7));
  Rng r1(9), r2(9);
  for (int t = 0; t < 10; ++t) {
    const auto x = b.sample_minibatch(SampleSpec{}, r1);
    const auto y = b.sample_minibatch(SampleSpec{}, r2);
    ASSERT_EQ(x.size(), y.size());
    for (std::size_t k = 0; k < x.size(); ++k) EXPECT_EQ(x[k].id, y[k].id);
  }
}

TEST(EffectivePriority, NoveltyBonus) {
  ReplayBuffer one(5);
  one.insert(item(0.5));
  EXPECT_DOUBLE_EQ(one.effective_priority(one.items()[0], 0.0), 0.5);
  EXPECT_DOUBLE_EQ(one.effective_priority(one.items()[0], 0.1), 0.6);

  ReplayBuffer twins(5);
  twins.insert(item(0.5));
  twins.insert(item(0.7));
  for (const auto& it : twins.items()) EXPECT_DOUBLE_EQ(twins.effective_priority(it, 0.1), it.priority);

  ReplayBuffer pair(5);
  pair.insert(item(0.5, 0.9, 0.9, {0, 0, 0, 0, 0}));
  pair.insert(item(0.5, 0.9, 0.9, {0, 0, 1, 1, 1}));
  EXPECT_DOUBLE_EQ(pair.novelty(pair.items()[0]), 3.0 / 5.0);
}

TEST(Novelty, ExactNearestNeighbourForSmallBuffers) {
  ReplayBuffer b(100);
  Rng rng(6);
  const env::EnvConfig cfg;
  for (int i = 0; i < 40; ++i) b.insert(item(0.5, 0.9, 0.9, env::sample_random(rng, cfg)));
  // Fewer than 64 others: every other item is compared, so brute force agrees.
  for (const auto& it : b.items()) {
    int best = 5;
    for (const auto& o : b.items()) {
      if (o.id == it.id) continue;
      int d = 0;
      for (std::size_t k = 0; k < 5; ++k) d += it.trajectory[k] != o.trajectory[k];
      best = std::min(best, d);
    }
    EXPECT_DOUBLE_EQ(b.novelty(it), best / 5.0);
  }
}

TEST(Capacity, EnforceDropsLowestAndKeepsProtected) {
  ReplayBuffer b(3);
  std::vector<BufferItem> items;
  for (double p : {0.1, 0.4, 0.2, 0.9, 0.3}) items.push_back(item(p));
  b.replace(items);
  const auto keep = b.items()[0].id;
  EXPECT_EQ(b.enforce_capacity(0.0, keep), 2u);
  EXPECT_EQ(priorities(b), (std::multiset<double>{0.1, 0.4, 0.9}));
}

TEST(Capacity, RandomOperationSequences) {
  const affect::AffectConfig cfg;
  Rng rng(77);
  for (int seq = 0; seq < 10000; ++seq) {
    const std::size_t cap = 1 + rng.uniform_index(8);
    ReplayBuffer b(cap);
    const double mu = rng.bernoulli(0.3) ? 0.5 : 0.0;
    const int ops = 1 + static_cast<int>(rng.uniform_index(20));
    for (int k = 0; k < ops; ++k) {
      const auto op = rng.uniform_index(4);
      if (op <= 1) {
        b.insert(item(rng.uniform01(), rng.uniform01() * 2 - 1, rng.uniform01(),
                      env::sample_random(rng, env::EnvConfig{})),
                 mu);
      } else if (op == 2) {
        const std::size_t before = b.size();
        double top = -1;
        for (const auto& it : b.items()) top = std::max(top, it.priority);
        const auto removed = b.prune(cfg);
        ASSERT_EQ(b.size() + removed, before);
        if (before > 0) {
          ASSERT_GE(b.size(), 1u);
          double after_top = -1;
          for (const auto& it : b.items()) after_top = std::max(after_top, it.priority);
          ASSERT_EQ(after_top, top);
        }
        std::size_t prunable = 0;
        for (const auto& it : b.items()) prunable += affect::is_prunable(it.tag, cfg) ? 1 : 0;
        ASSERT_LE(prunable, 1u);
        ASSERT_EQ(b.prune(cfg), 0u);
      } else {
        std::vector<BufferItem> grown(b.items().begin(), b.items().end());
        const auto extra = rng.uniform_index(cap + 2);
        for (std::size_t e = 0; e < extra; ++e) grown.push_back(item(rng.uniform01()));
        b.replace(grown);
        b.enforce_capacity(mu);
      }
      ASSERT_LE(b.size(), b.capacity());
      std::set<std::uint64_t> ids;
      for (const auto& it : b.items()) {
        ASSERT_GT(it.id, 0u);
        ASSERT_LT(it.id, b.next_id());
        ASSERT_GE(it.priority, 0.0);
        ids.insert(it.id);
      }
      ASSERT_EQ(ids.size(), b.size());
    }
  }
}

TEST(FractionCount, RoundsUpWithTolerance) {
  EXPECT_EQ(fraction_count(0.8, 5), 4u);
  EXPECT_EQ(fraction_count(0.8, 32), 26u);
  EXPECT_EQ(fraction_count(0.5, 3), 2u);
  EXPECT_EQ(fraction_count(0.2, 10), 2u);
  EXPECT_EQ(fraction_count(0.0, 10), 0u);
}

TEST(SampleSpec, Validation) {
  SampleSpec s;
  s.top_fraction = 0.0;
  EXPECT_THROW(s.validate(), ConfigError);
  s = SampleSpec{};
  s.high_fraction = 1.1;
  EXPECT_THROW(s.validate(), ConfigError);
  s = SampleSpec{};
  s.novelty_mu = -1;
  EXPECT_THROW(s.validate(), ConfigError);
}

}  // namespace
}  // namespace cosmo_evo::replay
