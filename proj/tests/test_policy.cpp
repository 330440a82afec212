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
#include <numeric>

#include "cosmo_evo/errors.hpp"
#include "cosmo_evo/policy.hpp"

namespace cosmo_evo::policy {
namespace {

using replay::BufferItem;

BufferItem traj(env::ActionSequence s, double r) {
  BufferItem it;
  it.trajectory = std::move(s);
  it.reward = r;
  return it;
}

TEST(Sample, UniformLogitsChiSquare) {
  const CategoricalPolicy p(5, 6);
  Rng rng(1);
  std::vector<std::vector<int>> counts(5, std::vector<int>(6, 0));
  const int n = 100000;
  for (int t = 0; t < n; ++t) {
    const auto s = p.sample(rng);
    for (int i = 0; i < 5; ++i) counts[static_cast<std::size_t>(i)][static_cast<std::size_t>(s[static_cast<std::size_t>(i)])]++;
  }
  for (const auto& row : counts) {
    double chi2 = 0.0;
    for (int c : row) chi2 += (c - n / 6.0) * (c - n / 6.0) / (n / 6.0);
    // 5 degrees of freedom, 0.999 quantile.
    EXPECT_LT(chi2, 20.52);
  }
}

TEST(Sample, SaturatedLogit) {
  CategoricalPolicy p(5, 6);
  for (int i = 0; i < 5; ++i) p.logit(i, 4) = 1000.0;
  Rng rng(2);
  for (int t = 0; t < 100; ++t) EXPECT_EQ(p.sample(rng), (env::ActionSequence{4, 4, 4, 4, 4}));
  for (int i = 0; i < 5; ++i) {
    const auto probs = p.probabilities(i);
    EXPECT_DOUBLE_EQ(probs[4], 1.0);
  }
}

TEST(Sample, Deterministic) {
  CategoricalPolicy p(5, 6);
  p.logit(2, 1) = 0.7;
  Rng a(3), b(3);
  for (int t = 0; t < 20; ++t) EXPECT_EQ(p.sample(a), p.sample(b));
}

TEST(Sample, TableMatchesPolicy) {
  CategoricalPolicy p(4, 3);
  Rng init(4);
  for (auto& x : p.mutable_logits()) x = init.uniform01() * 4 - 2;
  const auto table = p.probability_table();
  Rng a(5), b(5);
  for (int t = 0; t < 50; ++t) EXPECT_EQ(p.sample(a), sample_from_table(table, 4, 3, b));
}

TEST(TdError, KnownValues) {
  EXPECT_DOUBLE_EQ(td_error(10, Baseline::with_prior(6)), 4.0);
  EXPECT_DOUBLE_EQ(td_error(7.25, Baseline::with_prior(7.25)), 0.0);
  EXPECT_DOUBLE_EQ(td_error(5, Baseline::with_prior(5.0)), 0.0);
  EXPECT_DOUBLE_EQ(td_error(9, Baseline{}), 0.0);
}

TEST(UpdateBaseline, KnownValues) {
  EXPECT_NEAR(update_baseline(Baseline::with_prior(6, 0.99), 10).value, 6.04, 1e-12);
  Baseline b = Baseline::with_prior(0, 0.9);
  for (int i = 0; i < 2000; ++i) b = update_baseline(b, 3.5);
  EXPECT_NEAR(b.value, 3.5, 1e-9);
  b = Baseline::with_prior(6, 0.0);
  b = update_baseline(b, 8);
  b = update_baseline(b, 2);
  EXPECT_DOUBLE_EQ(b.value, 2.0);
  Baseline fresh;
  fresh = update_baseline(fresh, 4.5);
  EXPECT_TRUE(fresh.initialized);
  EXPECT_DOUBLE_EQ(fresh.value, 4.5);
}

TEST(Update, ZeroAdvantageIsIdentity) {
  CategoricalPolicy p(5, 6);
  Rng rng(6);
  for (auto& x : p.mutable_logits()) x = rng.uniform01();
  const std::vector<double> before(p.logits().begin(), p.logits().end());
  const std::vector<BufferItem> batch = {traj({1, 2, 3, 4, 5}, 4.0), traj({3, 3, 3, 3, 3}, 6.0)};
  const double loss = update(p, batch, Baseline::with_prior(6.0), LearnConfig{});
  EXPECT_EQ(loss, 0.0);
  EXPECT_EQ(std::vector<double>(p.logits().begin(), p.logits().end()), before);
}

TEST(Update, EmptyBatchThrows) {
  CategoricalPolicy p(5, 6);
  EXPECT_THROW(update(p, std::vector<BufferItem>{}, Baseline::with_prior(6), LearnConfig{}), EmptyMinibatch);
}

TEST(Update, SingleModeAscent) {
  CategoricalPolicy p(5, 6);
  const std::vector<BufferItem> batch(8, traj({3, 3, 3, 3, 3}, 10.0));
  const auto base = Baseline::with_prior(6.0);
  double last = 1.0 / 6.0;
  double last_seq = std::exp(p.log_prob({3, 3, 3, 3, 3}));
  for (int step = 0; step < 200; ++step) {
    update(p, batch, base, LearnConfig{});
    for (int i = 0; i < 5; ++i) EXPECT_GT(p.probabilities(i)[3], last - 1e-15);
    const double now = p.probabilities(0)[3];
    EXPECT_GT(now, last);
    last = now;
    const double seq = std::exp(p.log_prob({3, 3, 3, 3, 3}));
    EXPECT_GT(seq, last_seq);
    last_seq = seq;
  }
}

TEST(Update, DisjointActionsBothIncrease) {
  CategoricalPolicy p(5, 6);
  const std::vector<BufferItem> batch = {traj({0, 0, 0, 0, 0}, 9.0), traj({5, 5, 5, 5, 5}, 9.0)};
  update(p, batch, Baseline::with_prior(6.0), LearnConfig{});
  for (int i = 0; i < 5; ++i) {
    EXPECT_GT(p.probabilities(i)[0], 1.0 / 6.0);
    EXPECT_GT(p.probabilities(i)[5], 1.0 / 6.0);
  }
}

TEST(Update, RowsStayNormalized) {
  CategoricalPolicy p(5, 6);
  Rng rng(7);
  const env::EnvConfig env;
  for (int step = 0; step < 3000; ++step) {
    std::vector<BufferItem> batch;
    for (int k = 0; k < 8; ++k) {
      auto s = env::sample_random(rng, env);
      batch.push_back(traj(s, env::reward(s, env)));
    }
    LearnConfig cfg;
    cfg.learning_rate = 0.5;
    update(p, batch, Baseline::with_prior(6.0), cfg);
  }
  for (int i = 0; i < 5; ++i) {
    const auto probs = p.probabilities(i);
    EXPECT_NEAR(std::accumulate(probs.begin(), probs.end(), 0.0), 1.0, 1e-9);
    for (double x : probs) EXPECT_TRUE(std::isfinite(x));
  }
}

TEST(Update, MatchesGradientStep) {
  CategoricalPolicy p(3, 3);
  Rng rng(8);
  for (auto& x : p.mutable_logits()) x = rng.uniform01() * 2 - 1;
  const std::vector<BufferItem> batch = {traj({0, 1, 2}, 9.0), traj({2, 2, 1}, 7.0), traj({1, 0, 0}, 2.0)};
  const auto base = Baseline::with_prior(6.0);
  const LearnConfig cfg;
  const auto w = normalized_weights(batch, base, cfg);
  EXPECT_NEAR(w[0], 3.0 / (4.0 + 1e-8), 1e-15);
  EXPECT_NEAR(w[1], 1.0 / (4.0 + 1e-8), 1e-15);
  EXPECT_EQ(w[2], 0.0);
  const auto g = weighted_log_likelihood_gradient(p, batch, w);
  const std::vector<double> before(p.logits().begin(), p.logits().end());
  const double expected_loss = -weighted_log_likelihood(p, batch, w);
  EXPECT_NEAR(update(p, batch, base, cfg), expected_loss, 1e-12);
  for (std::size_t k = 0; k < before.size(); ++k) EXPECT_NEAR(p.logits()[k], before[k] + cfg.learning_rate * g[k], 1e-15);
}

TEST(Gradient, MatchesFiniteDifferences) {
  Rng rng(9);
  for (int instance = 0; instance < 50; ++instance) {
    CategoricalPolicy p(3, 3);
    for (auto& x : p.mutable_logits()) x = rng.uniform01() * 4 - 2;
    std::vector<BufferItem> batch;
    std::vector<double> w;
    for (int k = 0; k < 4; ++k) {
      batch.push_back(traj({static_cast<int>(rng.uniform_index(3)), static_cast<int>(rng.uniform_index(3)),
                            static_cast<int>(rng.uniform_index(3))},
                           0));
      w.push_back(rng.uniform01());
    }
    const auto g = weighted_log_likelihood_gradient(p, batch, w);
    const double h = 1e-6;
    for (std::size_t k = 0; k < g.size(); ++k) {
      CategoricalPolicy plus = p, minus = p;
      plus.mutable_logits()[k] += h;
      minus.mutable_logits()[k] -= h;
      const double fd =
          (weighted_log_likelihood(plus, batch, w) - weighted_log_likelihood(minus, batch, w)) / (2 * h);
      EXPECT_LE(std::abs(fd - g[k]), 1e-4 * std::max(1.0, std::abs(g[k]))) << "instance " << instance;
    }
  }
}

TEST(AdvantageWeight, FloorActsAsThreshold) {
  LearnConfig cfg;
  const auto b = Baseline::with_prior(6.0);
  EXPECT_DOUBLE_EQ(advantage_weight(9, b, cfg), 3.0);
  EXPECT_DOUBLE_EQ(advantage_weight(5, b, cfg), 0.0);
  cfg.advantage_floor = 2.0;
  EXPECT_DOUBLE_EQ(advantage_weight(7, b, cfg), 0.0);
  EXPECT_DOUBLE_EQ(advantage_weight(9, b, cfg), 3.0);
}

TEST(Evaluate, PointMassAtOptimum) {
  CategoricalPolicy p(5, 6);
  for (int i = 0; i < 5; ++i) p.logit(i, 3) = 1000.0;
  Rng rng(10);
  const auto e = evaluate_policy(p, env::EnvConfig{}, 1000, rng);
  EXPECT_DOUBLE_EQ(e.mean, 10.0);
  EXPECT_DOUBLE_EQ(e.std, 0.0);
}

TEST(Evaluate, UniformMatchesOracle) {
  const CategoricalPolicy p(5, 6);
  Rng rng(11);
  const int n = 100000;
  const auto e = evaluate_policy(p, env::EnvConfig{}, n, rng);
  const auto exact = env::oracle_enumerate(env::EnvConfig{});
  EXPECT_LE(std::abs(e.mean - exact.expected_random_reward), 3.0 * e.std / std::sqrt(n));
}

TEST(Evaluate, SingleSampleHasZeroStd) {
  const CategoricalPolicy p(5, 6);
  Rng rng(12);
  EXPECT_EQ(evaluate_policy(p, env::EnvConfig{}, 1, rng).std, 0.0);
  EXPECT_THROW(evaluate_policy(p, env::EnvConfig{}, 0, rng), InvalidInput);
}

TEST(LearnConfig, Validation) {
  LearnConfig c;
  c.learning_rate = 0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = LearnConfig{};
  c.batch_size = 0;
  EXPECT_THROW(c.validate(), ConfigError);
}

}  // namespace
}  // namespace cosmo_evo::policy
