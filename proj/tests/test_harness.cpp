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

#include <cmath>

#include "cosmo_evo/errors.hpp"
#include "cosmo_evo/harness.hpp"

namespace cosmo_evo::harness {
namespace {

RunConfig small(Variant v, std::uint64_t seed = 0) {
  auto cfg = make_config(v);
  cfg.seed = seed;
  cfg.n_collect = 200;
  cfg.n_batches = 40;
  cfg.eval_samples = 128;
  cfg.final_eval_samples = 256;
  return cfg;
}

void expect_same(const RunRecord& a, const RunRecord& b) {
  EXPECT_EQ(a.curve, b.curve);
  EXPECT_EQ(a.final_mean_reward, b.final_mean_reward);
  EXPECT_EQ(a.final_std_reward, b.final_std_reward);
  EXPECT_EQ(a.distinct_near_optimal, b.distinct_near_optimal);
}

TEST(RunSingle, DegenerateRunIsEmpty) {
  auto cfg = small(Variant::kCosmoCoreEvo);
  cfg.n_collect = 0;
  cfg.n_batches = 0;
  const auto r = run_single(cfg);
  EXPECT_TRUE(r.curve.empty());
  EXPECT_TRUE(r.events.empty());
  EXPECT_EQ(r.total_steps, 0);
}

TEST(RunSingle, Deterministic) {
  for (auto v : {Variant::kUniformBaseline, Variant::kCosmoCore, Variant::kCosmoCoreEvo}) {
    const auto cfg = small(v, 3);
    expect_same(run_single(cfg), run_single(cfg));
  }
}

TEST(RunSingle, CurveOrderedAndEveryEvalStep) {
  const auto cfg = small(Variant::kCosmoCoreEvo, 1);
  const auto r = run_single(cfg);
  ASSERT_FALSE(r.curve.empty());
  for (std::size_t k = 0; k < r.curve.size(); ++k) {
    EXPECT_EQ(r.curve[k].step, static_cast<std::int64_t>(k + 1) * cfg.eval_every);
    EXPECT_LE(r.curve[k].buffer_size, cfg.capacity);
  }
  EXPECT_EQ(r.total_steps, cfg.n_collect + cfg.n_batches);
}

TEST(RunSingle, EventScheduleAndRunningMax) {
  const auto cfg = small(Variant::kCosmoCoreEvo, 2);
  const auto r = run_single(cfg);
  std::size_t prunes = 0, evolves = 0;
  double running = -INFINITY;
  for (const auto& e : r.events) {
    if (e.kind == EventKind::kPrune) {
      EXPECT_EQ(e.step % cfg.prune_period, 0);
      ++prunes;
    } else {
      EXPECT_EQ(e.step % cfg.evo.period, 0);
      EXPECT_GT(e.parents, 0u);
      ++evolves;
    }
    EXPECT_LE(e.step, cfg.n_collect);
    EXPECT_GE(e.running_max_reward, running);
    running = e.running_max_reward;
  }
  EXPECT_EQ(prunes, static_cast<std::size_t>(cfg.n_collect / cfg.prune_period));
  EXPECT_EQ(evolves, static_cast<std::size_t>(cfg.n_collect / cfg.evo.period));
}

TEST(RunSingle, NoEvolutionEventsWithoutEvo) {
  const auto r = run_single(small(Variant::kCosmoCore, 2));
  for (const auto& e : r.events) EXPECT_EQ(e.kind, EventKind::kPrune);
}

TEST(FlagAlgebra, EvoWithEverythingOffIsCosmocore) {
  for (std::uint64_t seed : {0u, 1u, 2u}) {
    auto evo = small(Variant::kCosmoCoreEvo, seed);
    evo.mutation_enabled = false;
    evo.enterprise_fitness_enabled = false;
    evo.novelty_bonus_enabled = false;
    evo.evo_enabled = false;
    expect_same(run_single(evo), run_single(small(Variant::kCosmoCore, seed)));
  }
}

TEST(FlagAlgebra, CosmocoreWithoutAffectIsBaseline) {
  for (std::uint64_t seed : {0u, 1u, 2u}) {
    auto cosmo = small(Variant::kCosmoCore, seed);
    cosmo.affect.lambda = 0.0;
    cosmo.sample.high_fraction = 0.0;
    expect_same(run_single(cosmo), run_single(small(Variant::kUniformBaseline, seed)));
  }
}

TEST(FlagAlgebra, ZeroMutationRateMatchesMutationAblation) {
  auto a = small(Variant::kCosmoCoreEvo, 4);
  a.evo.mutation_rate = 0.0;
  auto b = small(Variant::kCosmoCoreEvo, 4);
  b.mutation_enabled = false;
  expect_same(run_single(a), run_single(b));
}

TEST(VariantDefaults, Settings) {
  const auto base = make_config(Variant::kUniformBaseline);
  EXPECT_EQ(base.sample.high_fraction, 0.0);
  EXPECT_FALSE(base.evo_enabled);
  const auto cosmo = make_config(Variant::kCosmoCore);
  EXPECT_EQ(cosmo.sample.high_fraction, 0.8);
  EXPECT_EQ(cosmo.affect.lambda, 0.6);
  EXPECT_FALSE(cosmo.evo_enabled);
  EXPECT_TRUE(make_config(Variant::kCosmoCoreEvo).evo_enabled);
  EXPECT_EQ(parse_variant("cosmocore-evo"), Variant::kCosmoCoreEvo);
  EXPECT_THROW(parse_variant("ppo"), ConfigError);
}

TEST(RunVariant, JobsDoNotChangeResults) {
  const auto cfg = small(Variant::kCosmoCoreEvo);
  const std::vector<std::uint64_t> seeds = {0, 1, 2, 3};
  const auto a = run_variant(cfg, seeds, 1);
  const auto b = run_variant(cfg, seeds, 3);
  EXPECT_EQ(a.finals, b.finals);
  EXPECT_EQ(a.mean, b.mean);
  EXPECT_EQ(a.std, b.std);
  ASSERT_EQ(a.records.size(), b.records.size());
  for (std::size_t k = 0; k < a.records.size(); ++k) expect_same(a.records[k], b.records[k]);
  EXPECT_GE(a.std, 0.0);
}

TEST(RunVariant, HookSeesEverySeedInOrder) {
  const auto cfg = small(Variant::kCosmoCore);
  std::vector<std::uint64_t> seen;
  run_variant(cfg, {5, 2, 9}, 2, [&](const RunConfig& c, const RunArtifacts& a) {
    seen.push_back(c.seed);
    EXPECT_EQ(a.record.seed, c.seed);
  });
  EXPECT_EQ(seen, (std::vector<std::uint64_t>{5, 2, 9}));
}

TEST(Ablations, RowsAndDegenerateFlag) {
  auto cfg = small(Variant::kCosmoCoreEvo);
  const auto table = run_ablations(cfg, {0, 1}, 1);
  ASSERT_EQ(table.rows.size(), 4u);
  EXPECT_EQ(table.rows[0].label, "full");
  EXPECT_EQ(table.rows[1].label, "w/o mutation");
  EXPECT_EQ(table.rows[2].label, "w/o enterprise fitness");
  EXPECT_EQ(table.rows[3].label, "w/o novelty priority bonus");
  // Default weights and novelty_mu are zero, so those ablations change nothing.
  EXPECT_FALSE(table.rows[1].degenerate);
  EXPECT_TRUE(table.rows[2].degenerate);
  EXPECT_TRUE(table.rows[3].degenerate);
  EXPECT_EQ(table.rows[2].stats.finals, table.rows[0].stats.finals);
  for (const auto& r : table.rows) EXPECT_EQ(r.stats.seeds, (std::vector<std::uint64_t>{0, 1}));
  EXPECT_THROW(run_ablations(small(Variant::kCosmoCore), {0, 1}), InvalidInput);
}

TEST(Sweep, ZeroRateMatchesMutationAblation) {
  auto cfg = small(Variant::kCosmoCoreEvo);
  cfg.evo.weights = {0.3, 0.3, 0.3};
  const std::vector<std::uint64_t> seeds = {0, 1};
  const auto sweep = run_mutation_sweep(cfg, seeds, {0.0, 0.1, 0.2, 0.4, 0.8});
  ASSERT_EQ(sweep.rows.size(), 5u);
  const auto table = run_ablations(cfg, seeds);
  for (std::size_t k = 0; k < seeds.size(); ++k)
    EXPECT_NEAR(sweep.rows[0].stats.finals[k], table.rows[1].stats.finals[k], 1e-9);
  for (std::size_t i = 0; i < sweep.rows.size(); ++i) {
    EXPECT_GE(sweep.rows[i].stats.std, 0.0);
    EXPECT_LE(sweep.rows[i].stats.mean, sweep.rows[sweep.best_index].stats.mean);
  }
  EXPECT_THROW(run_mutation_sweep(cfg, seeds, {}), InvalidInput);
  EXPECT_THROW(run_mutation_sweep(cfg, seeds, {1.5}), ConfigError);
}

TEST(Adaptation, PlateauWindowAndCensoring) {
  RunRecord r;
  r.total_steps = 100;
  for (int s = 10; s <= 100; s += 10) {
    CurvePoint p;
    p.step = s;
    p.mean_reward = s < 50 ? 8.0 : (s < 80 ? 5.0 : 7.5);
    r.curve.push_back(p);
  }
  // Plateau 8, threshold 7.2, first reached at step 80.
  auto a = adaptation_steps(r, 50);
  EXPECT_FALSE(a.censored);
  EXPECT_EQ(a.steps, 30);
  EXPECT_DOUBLE_EQ(a.plateau, 8.0);

  for (auto& p : r.curve)
    if (p.step >= 50) p.mean_reward = 1.0;
  a = adaptation_steps(r, 50);
  EXPECT_TRUE(a.censored);
  EXPECT_EQ(a.steps, 50);

  a = adaptation_steps(r, 0);
  EXPECT_TRUE(a.censored);
}

TEST(Shift, EmptyScheduleRejected) {
  EXPECT_THROW(run_shift(small(Variant::kCosmoCoreEvo), {0, 1}, env::ShiftSchedule{}), InvalidInput);
}

TEST(Shift, ReportsThreeVariants) {
  auto cfg = small(Variant::kCosmoCoreEvo);
  const auto report = run_shift(cfg, {0, 1}, env::ShiftSchedule{{{100, 10}}});
  ASSERT_EQ(report.rows.size(), 3u);
  EXPECT_EQ(report.rows[0].variant, Variant::kUniformBaseline);
  EXPECT_EQ(report.rows[1].variant, Variant::kCosmoCore);
  EXPECT_EQ(report.rows[2].variant, Variant::kCosmoCoreEvo);
  EXPECT_EQ(report.shift_step, 100);
  for (const auto& row : report.rows) EXPECT_EQ(row.per_seed.size(), 2u);
}

TEST(Novelty, Score) {
  RunRecord r;
  r.distinct_near_optimal = 1;
  EXPECT_DOUBLE_EQ(novelty_score(r, env::EnvConfig{}), 1.0 / 651.0);
  r.distinct_near_optimal = 0;
  EXPECT_DOUBLE_EQ(novelty_score(r, env::EnvConfig{}), 0.0);
}

TEST(MeanStd, SampleStd) {
  const auto m = mean_std({1.0, 2.0, 3.0, 4.0});
  EXPECT_DOUBLE_EQ(m.mean, 2.5);
  EXPECT_NEAR(m.std, std::sqrt(5.0 / 3.0), 1e-12);
  EXPECT_EQ(mean_std({7.0}).std, 0.0);
}

TEST(ConfigHash, StableAndSensitive) {
  const auto a = make_config(Variant::kCosmoCoreEvo);
  auto b = a;
  EXPECT_EQ(config_hash(a), config_hash(b));
  b.evo.mutation_rate = 0.3;
  EXPECT_NE(config_hash(a), config_hash(b));
  b = a;
  b.seed = 1;
  EXPECT_NE(config_hash(a), config_hash(b));
}

TEST(RunConfig, Validation) {
  auto cfg = make_config(Variant::kCosmoCoreEvo);
  cfg.eval_every = 0;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = make_config(Variant::kCosmoCoreEvo);
  cfg.capacity = 0;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = make_config(Variant::kCosmoCoreEvo);
  cfg.n_collect = -1;
  EXPECT_THROW(cfg.validate(), ConfigError);
}

}  // namespace
}  // namespace cosmo_evo::harness
