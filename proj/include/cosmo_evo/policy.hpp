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

#include <span>
#include <vector>

#include "cosmo_evo/env.hpp"
#include "cosmo_evo/replay.hpp"
#include "cosmo_evo/rng.hpp"

namespace cosmo_evo::policy {

/// Per-position independent categorical policy over action ids.
///
/// Logits are stored row-major, one row per sequence position; the action
/// distribution at a position is the softmax of its row.
class CategoricalPolicy {
 public:
  CategoricalPolicy(int length, int num_actions);
  explicit CategoricalPolicy(const env::EnvConfig& env)
      : CategoricalPolicy(env.length, env.num_actions()) {}

  int length() const noexcept { return length_; }
  int num_actions() const noexcept { return num_actions_; }

  double logit(int position, int action) const { return logits_[index(position, action)]; }
  double& logit(int position, int action) { return logits_[index(position, action)]; }
  std::span<const double> logits() const noexcept { return logits_; }
  std::span<double> mutable_logits() noexcept { return logits_; }

  std::vector<double> probabilities(int position) const;
  // Full L x (A_max+1) probability table, row-major.
  std::vector<double> probability_table() const;
  double log_prob(const env::ActionSequence& seq) const;

  env::ActionSequence sample(Rng& rng) const;

 private:
  std::size_t index(int position, int action) const {
    return static_cast<std::size_t>(position) * static_cast<std::size_t>(num_actions_) +
           static_cast<std::size_t>(action);
  }

  int length_;
  int num_actions_;
  std::vector<double> logits_;
};

// Draws one sequence from a precomputed probability table.
env::ActionSequence sample_from_table(std::span<const double> table, int length, int num_actions,
                                      Rng& rng);

// Running-mean reward estimate used as the TD reference.
struct Baseline {
  double value = 0.0;
  double decay = 0.99;
  bool initialized = false;

  static Baseline with_prior(double prior, double decay = 0.99) {
    return Baseline{prior, decay, true};
  }
};

// reward - baseline.value; 0 before the baseline has seen anything.
double td_error(double reward, const Baseline& baseline);

Baseline update_baseline(Baseline baseline, double reward);

struct LearnConfig {
  double learning_rate = 0.05;
  std::size_t batch_size = 32;
  // Samples whose advantage does not exceed this contribute zero weight.
  double advantage_floor = 0.0;

  void validate() const;
  bool operator==(const LearnConfig&) const = default;
};

// max(reward - baseline, 0) if that exceeds the floor, else 0.
double advantage_weight(double reward, const Baseline& baseline, const LearnConfig& cfg);

// Normalized advantage weights w / (sum w + 1e-8) for a minibatch. All zeros
// when no item has positive advantage.
std::vector<double> normalized_weights(std::span<const replay::BufferItem> batch,
                                       const Baseline& baseline, const LearnConfig& cfg);

// sum_j weights[j] * log pi(batch[j].trajectory)
double weighted_log_likelihood(const CategoricalPolicy& policy,
                               std::span<const replay::BufferItem> batch,
                               std::span<const double> weights);

// Analytic gradient of weighted_log_likelihood with respect to the logits,
// row-major like the logits.
std::vector<double> weighted_log_likelihood_gradient(const CategoricalPolicy& policy,
                                                     std::span<const replay::BufferItem> batch,
                                                     std::span<const double> weights);

// One ascent step on the advantage-weighted log-likelihood. Returns the
// negative weighted log-likelihood before the step.
double update(CategoricalPolicy& policy, std::span<const replay::BufferItem> batch,
              const Baseline& baseline, const LearnConfig& cfg);

struct Evaluation {
  double mean = 0.0;
  double std = 0.0;
};

// Monte Carlo reward of n fresh samples. std is 0 for n == 1.
Evaluation evaluate_policy(const CategoricalPolicy& policy, const env::EnvConfig& env,
                           std::size_t n, Rng& rng);

}  // namespace cosmo_evo::policy
