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

#include "cosmo_evo/policy.hpp"

#include <algorithm>
#include <cmath>

#include "cosmo_evo/errors.hpp"

namespace cosmo_evo::policy {

namespace {

constexpr double kWeightEps = 1e-8;

void softmax_row(std::span<const double> row, std::span<double> out) {
  const double peak = *std::max_element(row.begin(), row.end());
  double total = 0.0;
  for (std::size_t a = 0; a < row.size(); ++a) {
    out[a] = std::exp(row[a] - peak);
    total += out[a];
  }
  for (auto& p : out) p /= total;
}

int draw(std::span<const double> probs, Rng& rng) {
  const double u = rng.uniform01();
  double cumulative = 0.0;
  for (std::size_t a = 0; a < probs.size(); ++a) {
    cumulative += probs[a];
    if (u < cumulative) return static_cast<int>(a);
  }
  // Rounding left u above the last cumulative value: take the last action
  // that has any mass.
  for (std::size_t a = probs.size(); a-- > 0;) {
    if (probs[a] > 0.0) return static_cast<int>(a);
  }
  return 0;
}

}  // namespace

CategoricalPolicy::CategoricalPolicy(int length, int num_actions)
    : length_(length), num_actions_(num_actions) {
  if (length < 1 || num_actions < 1) throw InvalidInput("policy shape must be positive");
  logits_.assign(static_cast<std::size_t>(length) * static_cast<std::size_t>(num_actions), 0.0);
}

std::vector<double> CategoricalPolicy::probabilities(int position) const {
  std::vector<double> out(static_cast<std::size_t>(num_actions_));
  softmax_row(std::span(logits_).subspan(index(position, 0), out.size()), out);
  return out;
}

std::vector<double> CategoricalPolicy::probability_table() const {
  std::vector<double> table(logits_.size());
  const auto width = static_cast<std::size_t>(num_actions_);
  for (int i = 0; i < length_; ++i) {
    softmax_row(std::span(logits_).subspan(index(i, 0), width),
                std::span(table).subspan(index(i, 0), width));
  }
  return table;
}

double CategoricalPolicy::log_prob(const env::ActionSequence& seq) const {
  if (seq.size() != static_cast<std::size_t>(length_))
    throw InvalidInput("sequence length does not match policy");
  double total = 0.0;
  for (int i = 0; i < length_; ++i) {
    const auto row = std::span(logits_).subspan(index(i, 0), static_cast<std::size_t>(num_actions_));
    const double peak = *std::max_element(row.begin(), row.end());
    double z = 0.0;
    for (double l : row) z += std::exp(l - peak);
    total += row[static_cast<std::size_t>(seq[static_cast<std::size_t>(i)])] - peak - std::log(z);
  }
  return total;
}

env::ActionSequence CategoricalPolicy::sample(Rng& rng) const {
  return sample_from_table(probability_table(), length_, num_actions_, rng);
}

env::ActionSequence sample_from_table(std::span<const double> table, int length, int num_actions,
                                      Rng& rng) {
  env::ActionSequence seq;
  seq.actions.resize(static_cast<std::size_t>(length));
  const auto width = static_cast<std::size_t>(num_actions);
  for (std::size_t i = 0; i < seq.actions.size(); ++i) {
    seq.actions[i] = draw(table.subspan(i * width, width), rng);
  }
  return seq;
}

double td_error(double reward, const Baseline& baseline) {
  return baseline.initialized ? reward - baseline.value : 0.0;
}

Baseline update_baseline(Baseline baseline, double reward) {
  if (!baseline.initialized) {
    baseline.value = reward;
    baseline.initialized = true;
  } else {
    baseline.value = baseline.decay * baseline.value + (1.0 - baseline.decay) * reward;
  }
  return baseline;
}

void LearnConfig::validate() const {
  if (!(learning_rate > 0.0)) throw ConfigError("learn.learning_rate", "must be > 0");
  if (batch_size == 0) throw ConfigError("learn.batch_size", "must be positive");
  if (!std::isfinite(advantage_floor)) throw ConfigError("learn.advantage_floor", "must be finite");
}

double advantage_weight(double reward, const Baseline& baseline, const LearnConfig& cfg) {
  const double advantage = reward - baseline.value;
  if (!(advantage > cfg.advantage_floor)) return 0.0;
  return std::max(advantage, 0.0);
}

std::vector<double> normalized_weights(std::span<const replay::BufferItem> batch,
                                       const Baseline& baseline, const LearnConfig& cfg) {
  std::vector<double> w(batch.size());
  double total = 0.0;
  for (std::size_t j = 0; j < batch.size(); ++j) {
    w[j] = advantage_weight(batch[j].reward, baseline, cfg);
    total += w[j];
  }
  if (total == 0.0) return w;
  for (auto& x : w) x /= total + kWeightEps;
  return w;
}

double weighted_log_likelihood(const CategoricalPolicy& policy,
                               std::span<const replay::BufferItem> batch,
                               std::span<const double> weights) {
  double total = 0.0;
  for (std::size_t j = 0; j < batch.size(); ++j) {
    if (weights[j] != 0.0) total += weights[j] * policy.log_prob(batch[j].trajectory);
  }
  return total;
}

std::vector<double> weighted_log_likelihood_gradient(const CategoricalPolicy& policy,
                                                     std::span<const replay::BufferItem> batch,
                                                     std::span<const double> weights) {
  const auto table = policy.probability_table();
  const auto width = static_cast<std::size_t>(policy.num_actions());
  std::vector<double> grad(table.size(), 0.0);
  double weight_sum = 0.0;
  for (std::size_t j = 0; j < batch.size(); ++j) {
    if (weights[j] == 0.0) continue;
    weight_sum += weights[j];
    const auto& seq = batch[j].trajectory;
    for (std::size_t i = 0; i < static_cast<std::size_t>(policy.length()); ++i) {
      grad[i * width + static_cast<std::size_t>(seq[i])] += weights[j];
    }
  }
  for (std::size_t k = 0; k < grad.size(); ++k) grad[k] -= weight_sum * table[k];
  return grad;
}

double update(CategoricalPolicy& policy, std::span<const replay::BufferItem> batch,
              const Baseline& baseline, const LearnConfig& cfg) {
  if (batch.empty()) throw EmptyMinibatch("policy update needs a non-empty minibatch");
  for (const auto& item : batch) {
    if (item.trajectory.size() != static_cast<std::size_t>(policy.length()))
      throw InvalidInput("minibatch trajectory length does not match policy");
  }
  const auto weights = normalized_weights(batch, baseline, cfg);
  if (std::all_of(weights.begin(), weights.end(), [](double w) { return w == 0.0; })) return 0.0;

  const double loss = -weighted_log_likelihood(policy, batch, weights);
  const auto grad = weighted_log_likelihood_gradient(policy, batch, weights);
  auto logits = policy.mutable_logits();
  for (std::size_t k = 0; k < logits.size(); ++k) logits[k] += cfg.learning_rate * grad[k];
  return loss;
}

Evaluation evaluate_policy(const CategoricalPolicy& policy, const env::EnvConfig& env,
                           std::size_t n, Rng& rng) {
  if (n == 0) throw InvalidInput("evaluate_policy needs n >= 1");
  const auto table = policy.probability_table();
  double mean = 0.0;
  double m2 = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double r =
        env::reward(sample_from_table(table, policy.length(), policy.num_actions(), rng), env);
    const double delta = r - mean;
    mean += delta / static_cast<double>(k + 1);
    m2 += delta * (r - mean);
  }
  Evaluation out;
  out.mean = mean;
  out.std = n > 1 ? std::sqrt(m2 / static_cast<double>(n - 1)) : 0.0;
  return out;
}

}  // namespace cosmo_evo::policy
