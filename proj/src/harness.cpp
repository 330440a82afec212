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

#include "cosmo_evo/harness.hpp"

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include "cosmo_evo/errors.hpp"

namespace cosmo_evo::harness {

std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::kUniformBaseline:
      return "uniform-baseline";
    case Variant::kCosmoCore:
      return "cosmocore";
    case Variant::kCosmoCoreEvo:
      return "cosmocore-evo";
  }
  return "unknown";
}

Variant parse_variant(std::string_view name) {
  if (name == "uniform-baseline") return Variant::kUniformBaseline;
  if (name == "cosmocore") return Variant::kCosmoCore;
  if (name == "cosmocore-evo") return Variant::kCosmoCoreEvo;
  throw ConfigError("variant", "unknown variant '" + std::string(name) +
                                   "' (expected uniform-baseline, cosmocore or cosmocore-evo)");
}

void RunConfig::validate() const {
  env.validate();
  affect.validate();
  evo.validate();
  learn.validate();
  replay::SampleSpec s = sample;
  s.batch_size = learn.batch_size;
  s.validate();
  shift.validate();
  if (n_collect < 0) throw ConfigError("n_collect", "must be >= 0");
  if (n_batches < 0) throw ConfigError("n_batches", "must be >= 0");
  if (prune_period < 1) throw ConfigError("prune_period", "must be >= 1");
  if (eval_every < 1) throw ConfigError("eval_every", "must be >= 1");
  if (eval_samples < 1) throw ConfigError("eval_samples", "must be >= 1");
  if (final_eval_samples < 1) throw ConfigError("final_eval_samples", "must be >= 1");
  if (capacity < 1) throw ConfigError("capacity", "must be >= 1");
  if (!(baseline_decay > 0.0 && baseline_decay < 1.0))
    throw ConfigError("baseline.decay", "must be in (0, 1)");
  if (baseline_prior && !std::isfinite(*baseline_prior))
    throw ConfigError("baseline.prior", "must be finite");
}

void apply_variant_defaults(RunConfig& cfg, Variant v) {
  cfg.variant = v;
  const RunConfig fresh;
  switch (v) {
    case Variant::kUniformBaseline:
      cfg.sample.high_fraction = 0.0;
      cfg.affect.lambda = 0.0;
      cfg.evo_enabled = false;
      break;
    case Variant::kCosmoCore:
      cfg.sample.high_fraction = fresh.sample.high_fraction;
      cfg.affect.lambda = fresh.affect.lambda;
      cfg.evo_enabled = false;
      break;
    case Variant::kCosmoCoreEvo:
      cfg.sample.high_fraction = fresh.sample.high_fraction;
      cfg.affect.lambda = fresh.affect.lambda;
      cfg.evo_enabled = true;
      break;
  }
}

RunConfig make_config(Variant v) {
  RunConfig cfg;
  apply_variant_defaults(cfg, v);
  return cfg;
}

double effective_mutation_rate(const RunConfig& cfg) {
  return cfg.mutation_enabled ? cfg.evo.mutation_rate : 0.0;
}

evolution::FitnessWeights effective_weights(const RunConfig& cfg) {
  return cfg.enterprise_fitness_enabled ? cfg.evo.weights : evolution::FitnessWeights{};
}

double effective_novelty_mu(const RunConfig& cfg) {
  return cfg.novelty_bonus_enabled ? cfg.sample.novelty_mu : 0.0;
}

std::string canonical_text(const RunConfig& c) {
  std::ostringstream os;
  os.precision(17);
  os << "variant=" << to_string(c.variant) << "\nseed=" << c.seed << "\nn_collect=" << c.n_collect
     << "\nn_batches=" << c.n_batches << "\nprune_period=" << c.prune_period
     << "\neval_every=" << c.eval_every << "\neval_samples=" << c.eval_samples
     << "\nfinal_eval_samples=" << c.final_eval_samples << "\nenv.length=" << c.env.length
     << "\nenv.action_max=" << c.env.action_max << "\nenv.target=" << c.env.target
     << "\nenv.reward_base=" << c.env.reward_base << "\naffect.lambda=" << c.affect.lambda
     << "\naffect.valence_mid=" << c.affect.valence_mid
     << "\naffect.valence_scale=" << c.affect.valence_scale
     << "\naffect.arousal_scale=" << c.affect.arousal_scale
     << "\naffect.prune_v_max=" << c.affect.prune_v_max
     << "\naffect.prune_a_max=" << c.affect.prune_a_max << "\nevo.period=" << c.evo.period
     << "\nevo.mutation_rate=" << effective_mutation_rate(c)
     << "\nevo.parent_fraction=" << c.evo.parent_fraction;
  const auto w = effective_weights(c);
  os << "\nevo.alpha=" << w.alpha << "\nevo.beta=" << w.beta << "\nevo.gamma=" << w.gamma
     << "\nevo.forbidden_action="
     << (c.evo.forbidden_action ? std::to_string(*c.evo.forbidden_action) : "none")
     << "\nevo.enabled=" << c.evo_enabled << "\nlearn.learning_rate=" << c.learn.learning_rate
     << "\nlearn.batch_size=" << c.learn.batch_size
     << "\nlearn.advantage_floor=" << c.learn.advantage_floor
     << "\nsample.high_fraction=" << c.sample.high_fraction
     << "\nsample.top_fraction=" << c.sample.top_fraction
     << "\nsample.novelty_mu=" << effective_novelty_mu(c) << "\ncapacity=" << c.capacity
     << "\nbaseline.prior=" << (c.baseline_prior ? std::to_string(*c.baseline_prior) : "oracle")
     << "\nbaseline.decay=" << c.baseline_decay << "\nshift=";
  for (const auto& e : c.shift.entries) os << e.activation_step << ":" << e.new_target << ";";
  os << "\n";
  return os.str();
}

std::uint64_t config_hash(const RunConfig& cfg) {
  // FNV-1a over the canonical text.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : canonical_text(cfg)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

namespace {

double default_prior(const env::EnvConfig& env) {
  try {
    return env::oracle_enumerate_serial(env).expected_random_reward;
  } catch (const EnumerationTooLarge&) {
    Rng rng(derive_seed({0x0a11ce, static_cast<std::uint64_t>(env.length)}));
    return env::monte_carlo_random_reward(env, 100'000, rng).mean;
  }
}

// Tracks trajectories observed during a run for the novelty score and the
// running-max capability log.
class Observer {
 public:
  void observe(const env::ActionSequence& seq, double reward, const env::EnvConfig& env) {
    running_max_ = std::max(running_max_, reward);
    if (reward >= env.reward_base - 1.0) near_optimal_.insert(seq.actions);
  }
  std::size_t distinct_near_optimal() const { return near_optimal_.size(); }
  double running_max() const { return running_max_; }

 private:
  std::set<std::vector<int>> near_optimal_;
  double running_max_ = -INFINITY;
};

double mean_priority(const replay::ReplayBuffer& buffer) {
  if (buffer.empty()) return 0.0;
  double total = 0.0;
  for (const auto& it : buffer.items()) total += it.priority;
  return total / static_cast<double>(buffer.size());
}

}  // namespace

RunArtifacts run_single_with_state(const RunConfig& cfg, std::optional<std::int64_t> stop_after) {
  cfg.validate();
  const auto started = std::chrono::steady_clock::now();

  RunArtifacts out{RunRecord{}, replay::ReplayBuffer(cfg.capacity),
                   policy::CategoricalPolicy(cfg.env)};
  RunRecord& record = out.record;
  record.name = cfg.name;
  record.variant = cfg.variant;
  record.seed = cfg.seed;
  record.config_hash = config_hash(cfg);

  auto& buffer = out.buffer;
  auto& pol = out.policy;
  Rng rng(derive_seed({cfg.seed, 1}));
  auto baseline = policy::Baseline::with_prior(
      cfg.baseline_prior ? *cfg.baseline_prior : default_prior(cfg.env), cfg.baseline_decay);

  replay::SampleSpec spec = cfg.sample;
  spec.batch_size = cfg.learn.batch_size;
  spec.novelty_mu = effective_novelty_mu(cfg);

  evolution::EvoConfig evo = cfg.evo;
  evo.mutation_rate = effective_mutation_rate(cfg);
  evo.weights = effective_weights(cfg);

  Observer observer;
  const std::int64_t total = cfg.n_collect + cfg.n_batches;
  const std::int64_t last = stop_after ? std::min(*stop_after, total) : total;

  auto learn = [&] {
    if (buffer.size() < spec.batch_size) return;
    const auto batch = buffer.sample_minibatch(spec, rng);
    for (const auto& item : batch) observer.observe(item.trajectory, item.reward, cfg.env);
    policy::update(pol, batch, baseline, cfg.learn);
  };

  for (std::int64_t step = 1; step <= last; ++step) {
    const auto env_now = env::apply_shift(cfg.env, step, cfg.shift);

    if (step <= cfg.n_collect) {
      auto seq = pol.sample(rng);
      const double r = env::reward(seq, env_now);
      const double td = policy::td_error(r, baseline);
      observer.observe(seq, r, env_now);
      buffer.insert(replay::make_item(std::move(seq), r, td, cfg.affect, step), spec.novelty_mu);
      baseline = policy::update_baseline(baseline, r);

      if (step % cfg.prune_period == 0) {
        EventRow row;
        row.step = step;
        row.kind = EventKind::kPrune;
        row.pruned = buffer.prune(cfg.affect);
        row.size_after = buffer.size();
        row.running_max_reward = observer.running_max();
        record.events.push_back(row);
      }

      if (cfg.evo_enabled && step % evo.period == 0 && buffer.size() > 1) {
        evolution::UpdateContext ctx;
        ctx.baseline = baseline.value;
        ctx.stream_seed = cfg.seed;
        ctx.step = step;
        ctx.novelty_mu = spec.novelty_mu;
        ctx.parallel = cfg.parallel_offspring;
        const auto stats = evolution::evolutionary_update(buffer, env_now, evo, cfg.affect, ctx);
        for (std::size_t k = 0; k < stats.offspring_trajectories.size(); ++k)
          observer.observe(stats.offspring_trajectories[k], stats.offspring_rewards[k], env_now);
        EventRow row;
        row.step = step;
        row.kind = EventKind::kEvolve;
        row.parents = stats.parents;
        row.offspring = stats.offspring;
        row.pruned = stats.pruned;
        row.evicted = stats.evicted;
        row.best_offspring_reward = stats.best_offspring_reward;
        row.max_fitness_before = stats.max_fitness_before;
        row.max_fitness_after = stats.max_fitness_after;
        row.size_after = stats.size_after;
        row.running_max_reward = observer.running_max();
        record.events.push_back(row);
      }
    }

    learn();

    if (step % cfg.eval_every == 0) {
      Rng eval_rng(derive_seed({cfg.seed, 2, static_cast<std::uint64_t>(step)}));
      const auto ev = policy::evaluate_policy(pol, env_now, cfg.eval_samples, eval_rng);
      record.curve.push_back(CurvePoint{step, ev.mean, ev.std, buffer.size(), mean_priority(buffer),
                                        observer.distinct_near_optimal()});
    }
  }

  Rng final_rng(derive_seed({cfg.seed, 3}));
  const auto final_env = env::apply_shift(cfg.env, last, cfg.shift);
  const auto final_eval = policy::evaluate_policy(pol, final_env, cfg.final_eval_samples, final_rng);
  record.final_mean_reward = final_eval.mean;
  record.final_std_reward = final_eval.std;
  record.distinct_near_optimal = observer.distinct_near_optimal();
  record.total_steps = last;
  record.duration_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return out;
}

RunRecord run_single(const RunConfig& cfg) { return run_single_with_state(cfg).record; }

double novelty_score(const RunRecord& record, const env::EnvConfig& env) {
  const auto oracle = env::oracle_enumerate(env);
  if (oracle.optimal_count == 0) return 0.0;
  return static_cast<double>(record.distinct_near_optimal) /
         static_cast<double>(oracle.optimal_count);
}

MeanStd mean_std(const std::vector<double>& xs) {
  MeanStd out;
  if (xs.empty()) return out;
  double total = 0.0;
  for (double x : xs) total += x;
  out.mean = total / static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - out.mean) * (x - out.mean);
    out.std = std::sqrt(ss / static_cast<double>(xs.size() - 1));
  }
  return out;
}

SummaryStats run_variant(const RunConfig& cfg, const std::vector<std::uint64_t>& seeds, int jobs,
                         const RunHook& hook) {
  if (seeds.empty()) throw InvalidInput("run_variant needs at least one seed");
  cfg.validate();
  const auto oracle = env::oracle_enumerate(cfg.env);

  std::vector<RunRecord> records(seeds.size());
  std::vector<std::optional<RunArtifacts>> artifacts(hook ? seeds.size() : 0);
  std::vector<std::string> errors(seeds.size());
  const auto n = static_cast<std::int64_t>(seeds.size());
  const int threads = std::max(1, jobs);
#pragma omp parallel for schedule(dynamic) num_threads(threads) if (threads > 1)
  for (std::int64_t k = 0; k < n; ++k) {
    RunConfig c = cfg;
    c.seed = seeds[static_cast<std::size_t>(k)];
    // Seeds already occupy the threads.
    if (threads > 1) c.parallel_offspring = false;
    try {
      auto result = run_single_with_state(c);
      records[static_cast<std::size_t>(k)] = result.record;
      if (hook) artifacts[static_cast<std::size_t>(k)].emplace(std::move(result));
    } catch (const std::exception& e) {
      errors[static_cast<std::size_t>(k)] = e.what();
    }
  }
  for (const auto& e : errors) {
    if (!e.empty()) throw std::runtime_error(e);
  }
  for (std::size_t k = 0; k < artifacts.size(); ++k) {
    RunConfig c = cfg;
    c.seed = seeds[k];
    hook(c, *artifacts[k]);
  }

  SummaryStats stats;
  stats.name = cfg.name;
  stats.variant = cfg.variant;
  stats.seeds = seeds;
  for (const auto& r : records) {
    stats.finals.push_back(r.final_mean_reward);
    stats.novelty.push_back(oracle.optimal_count == 0
                                ? 0.0
                                : static_cast<double>(r.distinct_near_optimal) /
                                      static_cast<double>(oracle.optimal_count));
  }
  const auto ms = mean_std(stats.finals);
  stats.mean = ms.mean;
  stats.std = ms.std;
  stats.novelty_mean = mean_std(stats.novelty).mean;
  stats.records = std::move(records);
  return stats;
}

AblationTable run_ablations(const RunConfig& base, const std::vector<std::uint64_t>& seeds,
                            int jobs, const RunHook& hook) {
  if (base.variant != Variant::kCosmoCoreEvo)
    throw InvalidInput("ablations start from the cosmocore-evo variant");
  AblationTable table;

  auto add = [&](std::string label, RunConfig cfg, bool degenerate) {
    cfg.name = base.name + "/" + label;
    table.rows.push_back(AblationRow{label, run_variant(cfg, seeds, jobs, hook), degenerate});
  };

  add("full", base, false);

  RunConfig no_mutation = base;
  no_mutation.mutation_enabled = false;
  add("w/o mutation", no_mutation, effective_mutation_rate(base) == 0.0);

  RunConfig no_fitness = base;
  no_fitness.enterprise_fitness_enabled = false;
  add("w/o enterprise fitness", no_fitness, effective_weights(base).all_zero());

  RunConfig no_novelty = base;
  no_novelty.novelty_bonus_enabled = false;
  add("w/o novelty priority bonus", no_novelty, effective_novelty_mu(base) == 0.0);
  return table;
}

Adaptation adaptation_steps(const RunRecord& record, std::int64_t shift_step) {
  Adaptation out;
  const std::int64_t run_length = std::max<std::int64_t>(record.total_steps - shift_step, 0);
  std::vector<double> pre;
  for (const auto& p : record.curve) {
    if (p.step < shift_step) pre.push_back(p.mean_reward);
  }
  if (pre.empty()) {
    out.steps = run_length;
    out.censored = true;
    out.plateau = NAN;
    return out;
  }
  const std::size_t window = std::min<std::size_t>(10, pre.size());
  double total = 0.0;
  for (std::size_t k = pre.size() - window; k < pre.size(); ++k) total += pre[k];
  out.plateau = total / static_cast<double>(window);
  const double threshold = 0.9 * out.plateau;
  for (const auto& p : record.curve) {
    if (p.step >= shift_step && p.mean_reward >= threshold) {
      out.steps = p.step - shift_step;
      return out;
    }
  }
  out.steps = run_length;
  out.censored = true;
  return out;
}

ShiftReport run_shift(const RunConfig& cfg, const std::vector<std::uint64_t>& seeds,
                      const env::ShiftSchedule& schedule, int jobs,
                      const RunHook& hook) {
  if (schedule.empty()) throw InvalidInput("run_shift needs a non-empty shift schedule");
  schedule.validate();
  ShiftReport report;
  report.shift_step = schedule.entries.front().activation_step;
  for (Variant v : {Variant::kUniformBaseline, Variant::kCosmoCore, Variant::kCosmoCoreEvo}) {
    RunConfig c = cfg;
    apply_variant_defaults(c, v);
    c.shift = schedule;
    c.name = cfg.name + "/" + std::string(to_string(v));
    ShiftRow row;
    row.variant = v;
    row.stats = run_variant(c, seeds, jobs, hook);
    std::vector<double> steps;
    for (const auto& rec : row.stats.records) {
      const auto a = adaptation_steps(rec, report.shift_step);
      row.per_seed.push_back(a);
      steps.push_back(static_cast<double>(a.steps));
      row.censored += a.censored ? 1 : 0;
    }
    row.mean_steps = mean_std(steps).mean;
    report.rows.push_back(std::move(row));
  }
  return report;
}

SweepReport run_mutation_sweep(const RunConfig& cfg, const std::vector<std::uint64_t>& seeds,
                               const std::vector<double>& rates, int jobs,
                               const RunHook& hook) {
  if (rates.empty()) throw InvalidInput("mutation sweep needs at least one rate");
  SweepReport report;
  for (double rate : rates) {
    if (!(rate >= 0.0 && rate <= 1.0)) throw ConfigError("evo.mutation_rate", "must be in [0, 1]");
    RunConfig c = cfg;
    c.evo.mutation_rate = rate;
    char label[32];
    std::snprintf(label, sizeof label, "/rate=%.3f", rate);
    c.name = cfg.name + label;
    report.rows.push_back(SweepRow{rate, run_variant(c, seeds, jobs, hook)});
  }
  for (std::size_t k = 1; k < report.rows.size(); ++k) {
    if (report.rows[k].stats.mean > report.rows[report.best_index].stats.mean) report.best_index = k;
  }
  return report;
}

}  // namespace cosmo_evo::harness
