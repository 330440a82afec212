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
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cosmo_evo/affect.hpp"
#include "cosmo_evo/env.hpp"
#include "cosmo_evo/evolution.hpp"
#include "cosmo_evo/policy.hpp"
#include "cosmo_evo/replay.hpp"

namespace cosmo_evo::harness {

enum class Variant { kUniformBaseline, kCosmoCore, kCosmoCoreEvo };

std::string_view to_string(Variant v);
// Throws ConfigError("variant", ...) for unknown names.
Variant parse_variant(std::string_view name);

struct RunConfig {
  std::string name = "run";
  Variant variant = Variant::kCosmoCoreEvo;
  std::uint64_t seed = 0;

  std::int64_t n_collect = 1000;
  std::int64_t n_batches = 300;
  std::int64_t prune_period = 50;
  std::int64_t eval_every = 10;
  std::size_t eval_samples = 512;
  std::size_t final_eval_samples = 4096;

  env::EnvConfig env;
  affect::AffectConfig affect;
  evolution::EvoConfig evo;
  policy::LearnConfig learn;
  replay::SampleSpec sample;  // batch_size is taken from learn.batch_size
  std::size_t capacity = 1000;
  env::ShiftSchedule shift;

  // Baseline prior; unset means the oracle's exact expected random reward.
  std::optional<double> baseline_prior;
  double baseline_decay = 0.99;

  bool evo_enabled = true;
  bool mutation_enabled = true;
  bool enterprise_fitness_enabled = true;
  bool novelty_bonus_enabled = true;

  // Offspring evaluation may use OpenMP threads; results do not depend on it.
  bool parallel_offspring = true;

  void validate() const;
};

// Defaults for a variant: uniform-baseline turns off prioritized sampling,
// the affective term and evolution; cosmocore turns off evolution.
RunConfig make_config(Variant v);
void apply_variant_defaults(RunConfig& cfg, Variant v);

// Settings actually used by the loop once ablation flags are folded in.
double effective_mutation_rate(const RunConfig& cfg);
evolution::FitnessWeights effective_weights(const RunConfig& cfg);
double effective_novelty_mu(const RunConfig& cfg);

// Stable text rendering of every field that influences a run, and its hash.
std::string canonical_text(const RunConfig& cfg);
std::uint64_t config_hash(const RunConfig& cfg);

struct CurvePoint {
  std::int64_t step = 0;
  double mean_reward = 0.0;
  double std_reward = 0.0;
  std::size_t buffer_size = 0;
  double mean_priority = 0.0;
  std::size_t distinct_near_optimal = 0;

  bool operator==(const CurvePoint&) const = default;
};

enum class EventKind { kPrune, kEvolve };

struct EventRow {
  std::int64_t step = 0;
  EventKind kind = EventKind::kPrune;
  std::size_t parents = 0;
  std::size_t offspring = 0;
  std::size_t pruned = 0;
  std::size_t evicted = 0;
  double best_offspring_reward = 0.0;
  double max_fitness_before = 0.0;
  double max_fitness_after = 0.0;
  std::size_t size_after = 0;
  double running_max_reward = 0.0;
};

struct RunRecord {
  std::string name;
  Variant variant = Variant::kCosmoCoreEvo;
  std::uint64_t seed = 0;
  std::uint64_t config_hash = 0;
  std::vector<CurvePoint> curve;
  std::vector<EventRow> events;
  double final_mean_reward = 0.0;
  double final_std_reward = 0.0;
  std::size_t distinct_near_optimal = 0;
  std::int64_t total_steps = 0;
  double duration_seconds = 0.0;
};

struct RunArtifacts {
  RunRecord record;
  replay::ReplayBuffer buffer;
  policy::CategoricalPolicy policy;
};

// Runs the full loop and also hands back the final buffer and policy.
// `stop_after` truncates the run after that many total steps.
RunArtifacts run_single_with_state(const RunConfig& cfg,
                                   std::optional<std::int64_t> stop_after = std::nullopt);

RunRecord run_single(const RunConfig& cfg);

// Distinct near-optimal trajectories seen during the run over the number of
// optimal sequences of the unshifted environment.
double novelty_score(const RunRecord& record, const env::EnvConfig& env);

struct SummaryStats {
  std::string name;
  Variant variant = Variant::kCosmoCoreEvo;
  std::vector<std::uint64_t> seeds;
  std::vector<double> finals;  // per seed, in seed order
  std::vector<double> novelty;  // per seed
  double mean = 0.0;
  double std = 0.0;
  double novelty_mean = 0.0;
  std::vector<RunRecord> records;
};

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;
};

// Sample standard deviation (n - 1); 0 for a single value.
MeanStd mean_std(const std::vector<double>& xs);

// Receives the final buffer and policy of each seed, in seed order.
using RunHook = std::function<void(const RunConfig&, const RunArtifacts&)>;

// Runs each seed (in parallel on `jobs` threads) and aggregates.
SummaryStats run_variant(const RunConfig& cfg, const std::vector<std::uint64_t>& seeds,
                         int jobs = 1, const RunHook& hook = {});

struct AblationRow {
  std::string label;
  SummaryStats stats;
  bool degenerate = false;  // the ablation changes nothing relative to the full run
};

struct AblationTable {
  std::vector<AblationRow> rows;  // full, w/o mutation, w/o enterprise fitness, w/o novelty bonus
};

AblationTable run_ablations(const RunConfig& base, const std::vector<std::uint64_t>& seeds,
                            int jobs = 1, const RunHook& hook = {});

struct Adaptation {
  std::int64_t steps = 0;
  bool censored = false;
  double plateau = 0.0;
};

// Post-shift steps until an evaluation reaches 90% of the pre-shift plateau
// (mean of the last 10 pre-shift points). Unreached: run length, censored.
Adaptation adaptation_steps(const RunRecord& record, std::int64_t shift_step);

struct ShiftRow {
  Variant variant = Variant::kCosmoCoreEvo;
  std::vector<Adaptation> per_seed;
  double mean_steps = 0.0;
  std::size_t censored = 0;
  SummaryStats stats;
};

struct ShiftReport {
  std::int64_t shift_step = 0;
  std::vector<ShiftRow> rows;  // baseline, cosmocore, evo
};

// Runs all three variants on `cfg` with `schedule` applied. Throws
// InvalidInput for an empty schedule.
ShiftReport run_shift(const RunConfig& cfg, const std::vector<std::uint64_t>& seeds,
                      const env::ShiftSchedule& schedule, int jobs = 1,
                      const RunHook& hook = {});

struct SweepRow {
  double rate = 0.0;
  SummaryStats stats;
};

struct SweepReport {
  std::vector<SweepRow> rows;
  std::size_t best_index = 0;
};

SweepReport run_mutation_sweep(const RunConfig& cfg, const std::vector<std::uint64_t>& seeds,
                               const std::vector<double>& rates, int jobs = 1,
                               const RunHook& hook = {});

}  // namespace cosmo_evo::harness
