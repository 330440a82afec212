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

#include "cosmo_evo/env.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "cosmo_evo/errors.hpp"

namespace cosmo_evo::env {

long ActionSequence::sum() const noexcept {
  return std::accumulate(actions.begin(), actions.end(), 0L);
}

void EnvConfig::validate() const {
  if (length < 1) throw ConfigError("env.length", "must be >= 1");
  if (action_max < 0) throw ConfigError("env.action_max", "must be >= 0");
  if (!std::isfinite(reward_base)) throw ConfigError("env.reward_base", "must be finite");
}

void ShiftSchedule::validate() const {
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (entries[i].activation_step < 0)
      throw ConfigError("shift", "activation steps must be non-negative");
    if (i > 0 && entries[i].activation_step <= entries[i - 1].activation_step)
      throw ConfigError("shift", "activation steps must be strictly increasing");
  }
}

void validate(const ActionSequence& seq, const EnvConfig& cfg) {
  if (seq.size() != static_cast<std::size_t>(cfg.length)) {
    throw InvalidInput("action sequence has length " + std::to_string(seq.size()) +
                       ", expected " + std::to_string(cfg.length));
  }
  for (int a : seq.actions) {
    if (a < 0 || a > cfg.action_max) {
      throw InvalidInput("action " + std::to_string(a) + " outside [0, " +
                         std::to_string(cfg.action_max) + "]");
    }
  }
}

double reward(const ActionSequence& seq, const EnvConfig& cfg) {
  validate(seq, cfg);
  const long deviation = seq.sum() - cfg.target;
  return cfg.reward_base - static_cast<double>(deviation < 0 ? -deviation : deviation);
}

ActionSequence sample_random(Rng& rng, const EnvConfig& cfg) {
  ActionSequence seq;
  seq.actions.resize(static_cast<std::size_t>(cfg.length));
  for (auto& a : seq.actions) a = rng.uniform_int(0, cfg.action_max);
  return seq;
}

std::uint64_t sequence_count(const EnvConfig& cfg) {
  const auto base = static_cast<std::uint64_t>(cfg.num_actions());
  std::uint64_t total = 1;
  for (int i = 0; i < cfg.length; ++i) {
    if (base != 0 && total > kEnumerationLimit / base) return 0;
    total *= base;
  }
  return total;
}

ActionSequence sequence_at(std::uint64_t index, const EnvConfig& cfg) {
  const auto base = static_cast<std::uint64_t>(cfg.num_actions());
  ActionSequence seq;
  seq.actions.assign(static_cast<std::size_t>(cfg.length), 0);
  for (int i = cfg.length - 1; i >= 0; --i) {
    seq.actions[static_cast<std::size_t>(i)] = static_cast<int>(index % base);
    index /= base;
  }
  return seq;
}

namespace {

std::uint64_t checked_count(const EnvConfig& cfg) {
  cfg.validate();
  const std::uint64_t total = sequence_count(cfg);
  if (total == 0) {
    throw EnumerationTooLarge("(action_max+1)^length = " + std::to_string(cfg.num_actions()) +
                              "^" + std::to_string(cfg.length) + " exceeds the " +
                              std::to_string(kEnumerationLimit) + " enumeration limit");
  }
  return total;
}

// Rewards are reward_base minus an integer, so the maximum is tracked as the
// minimum absolute deviation. This keeps the parallel reduction exact.
OracleReport finish(const EnvConfig& cfg, std::uint64_t total, long double deviation_sum,
                    long best_deviation, std::uint64_t best_count) {
  OracleReport report;
  report.total_sequences = total;
  report.expected_random_reward =
      cfg.reward_base - static_cast<double>(deviation_sum / static_cast<long double>(total));
  report.optimal_reward = cfg.reward_base - static_cast<double>(best_deviation);
  report.optimal_count = best_count;
  return report;
}

}  // namespace

OracleReport oracle_enumerate(const EnvConfig& cfg) {
  const std::uint64_t total = checked_count(cfg);
  const int base = cfg.num_actions();
  const int length = cfg.length;
  const std::size_t max_sum = static_cast<std::size_t>(length) * static_cast<std::size_t>(cfg.action_max);

  // Each thread walks a contiguous block of the index range with an odometer
  // and counts sequences per sum. Integer counts merge exactly, so the result
  // does not depend on the thread count.
  std::vector<std::uint64_t> per_sum(max_sum + 1, 0);
#pragma omp parallel
  {
    std::vector<std::uint64_t> local(max_sum + 1, 0);
#ifdef _OPENMP
    const auto threads = static_cast<std::uint64_t>(omp_get_num_threads());
    const auto me = static_cast<std::uint64_t>(omp_get_thread_num());
#else
    const std::uint64_t threads = 1, me = 0;
#endif
    const std::uint64_t begin = total * me / threads;
    const std::uint64_t end = total * (me + 1) / threads;
    if (begin < end) {
      std::vector<int> digits(static_cast<std::size_t>(length), 0);
      std::size_t sum = 0;
      std::uint64_t index = begin;
      for (int i = 0; i < length; ++i) {
        digits[static_cast<std::size_t>(i)] = static_cast<int>(index % static_cast<std::uint64_t>(base));
        sum += static_cast<std::size_t>(digits[static_cast<std::size_t>(i)]);
        index /= static_cast<std::uint64_t>(base);
      }
      for (std::uint64_t k = begin; k < end; ++k) {
        ++local[sum];
        for (int i = 0; i < length; ++i) {
          auto& d = digits[static_cast<std::size_t>(i)];
          if (++d < base) {
            ++sum;
            break;
          }
          sum -= static_cast<std::size_t>(base - 1);
          d = 0;
        }
      }
    }
#pragma omp critical
    for (std::size_t t = 0; t <= max_sum; ++t) per_sum[t] += local[t];
  }

  unsigned long long deviation_sum = 0;
  long best = std::numeric_limits<long>::max();
  std::uint64_t best_count = 0;
  for (std::size_t t = 0; t <= max_sum; ++t) {
    if (per_sum[t] == 0) continue;
    const long dev = std::labs(static_cast<long>(t) - static_cast<long>(cfg.target));
    deviation_sum += static_cast<unsigned long long>(dev) * per_sum[t];
    if (dev < best) {
      best = dev;
      best_count = per_sum[t];
    } else if (dev == best) {
      best_count += per_sum[t];
    }
  }
  return finish(cfg, total, static_cast<long double>(deviation_sum), best, best_count);
}

OracleReport oracle_enumerate_serial(const EnvConfig& cfg) {
  const std::uint64_t total = checked_count(cfg);
  ActionSequence seq;
  seq.actions.assign(static_cast<std::size_t>(cfg.length), 0);

  long double deviation_sum = 0;
  long best = std::numeric_limits<long>::max();
  std::uint64_t best_count = 0;
  for (std::uint64_t visited = 0; visited < total; ++visited) {
    const double r = reward(seq, cfg);
    const auto dev = static_cast<long>(std::lround(cfg.reward_base - r));
    deviation_sum += dev;
    if (dev < best) {
      best = dev;
      best_count = 1;
    } else if (dev == best) {
      ++best_count;
    }
    // odometer increment
    for (int i = cfg.length - 1; i >= 0; --i) {
      auto& digit = seq.actions[static_cast<std::size_t>(i)];
      if (++digit <= cfg.action_max) break;
      digit = 0;
    }
  }
  return finish(cfg, total, deviation_sum, best, best_count);
}

MonteCarloEstimate monte_carlo_random_reward(const EnvConfig& cfg, std::uint64_t n, Rng& rng) {
  cfg.validate();
  MonteCarloEstimate est;
  est.samples = n;
  if (n == 0) return est;
  double mean = 0.0;
  double m2 = 0.0;
  for (std::uint64_t i = 0; i < n; ++i) {
    const double r = reward(sample_random(rng, cfg), cfg);
    const double delta = r - mean;
    mean += delta / static_cast<double>(i + 1);
    m2 += delta * (r - mean);
  }
  est.mean = mean;
  if (n > 1) {
    const double variance = m2 / static_cast<double>(n - 1);
    est.standard_error = std::sqrt(variance / static_cast<double>(n));
  }
  return est;
}

EnvConfig apply_shift(const EnvConfig& cfg, std::int64_t step, const ShiftSchedule& schedule) {
  EnvConfig out = cfg;
  for (const auto& entry : schedule.entries) {
    if (entry.activation_step <= step) {
      out.target = entry.new_target;
    } else {
      break;
    }
  }
  return out;
}

}  // namespace cosmo_evo::env
