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

#include "cosmo_evo/acceptance.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>

#include "cosmo_evo/errors.hpp"

#ifndef COSMO_EVO_DATA_DIR
#define COSMO_EVO_DATA_DIR "data"
#endif

namespace cosmo_evo::acceptance {

namespace {

std::string fmt(double x, int digits = 3) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}

std::string mean_pm(const harness::SummaryStats& s) { return fmt(s.mean) + " +- " + fmt(s.std); }

double threshold(const nlohmann::json& refs, const char* experiment, const char* key) {
  try {
    return refs.at(experiment).at("thresholds").at(key).get<double>();
  } catch (const nlohmann::json::exception&) {
    throw InvalidInput(std::string("reference values lack ") + experiment + ".thresholds." + key);
  }
}

double published(const nlohmann::json& refs, const char* experiment, const char* key) {
  try {
    return refs.at(experiment).at("published").at(key).get<double>();
  } catch (const nlohmann::json::exception&) {
    throw InvalidInput(std::string("reference values lack ") + experiment + ".published." + key);
  }
}

}  // namespace

nlohmann::json load_references(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot read reference values " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidInput(path.string() + ": " + e.what());
  }
}

std::filesystem::path data_dir() {
  if (const char* env = std::getenv("COSMO_EVO_DATA"); env != nullptr && *env != '\0') return env;
  return COSMO_EVO_DATA_DIR;
}

std::vector<Check> check_toy_table(const harness::SummaryStats& baseline,
                                   const harness::SummaryStats& cosmocore,
                                   const harness::SummaryStats& evo, const nlohmann::json& refs) {
  const double lo = threshold(refs, "toy-table", "baseline_min");
  const double hi = threshold(refs, "toy-table", "baseline_max");
  const double gap = threshold(refs, "toy-table", "cosmocore_gap_min");
  const double evo_min = threshold(refs, "toy-table", "evo_min");
  const double evo_gap = threshold(refs, "toy-table", "evo_gap_min");

  std::vector<Check> out;
  out.push_back({"1a", "uniform-baseline mean in [" + fmt(lo, 1) + ", " + fmt(hi, 1) + "]",
                 baseline.mean >= lo && baseline.mean <= hi, false, "mean " + mean_pm(baseline)});
  const double d1 = cosmocore.mean - baseline.mean;
  out.push_back({"1b", "cosmocore exceeds baseline by >= " + fmt(gap, 1), d1 >= gap, false,
                 "gap " + fmt(d1) + " (" + mean_pm(cosmocore) + " vs " + mean_pm(baseline) + ")"});
  out.push_back({"1c", "cosmocore-evo mean >= " + fmt(evo_min, 1), evo.mean >= evo_min, false,
                 "mean " + mean_pm(evo)});
  const double d2 = evo.mean - cosmocore.mean;
  out.push_back({"1d", "cosmocore-evo exceeds cosmocore by >= " + fmt(evo_gap, 1), d2 >= evo_gap, false,
                 "gap " + fmt(d2)});
  return out;
}

std::vector<std::size_t> largest_drop_per_seed(const harness::AblationTable& table) {
  if (table.rows.size() != 4) throw InvalidInput("ablation table must have four rows");
  const auto& full = table.rows[0].stats.finals;
  std::vector<std::size_t> out;
  for (std::size_t s = 0; s < full.size(); ++s) {
    std::size_t best = 1;
    double best_drop = full[s] - table.rows[1].stats.finals.at(s);
    for (std::size_t r = 2; r < 4; ++r) {
      const double drop = full[s] - table.rows[r].stats.finals.at(s);
      if (drop > best_drop) {
        best_drop = drop;
        best = r;
      }
    }
    out.push_back(best);
  }
  return out;
}

std::vector<Check> check_ablations(const harness::AblationTable& table, const nlohmann::json& refs) {
  const auto paired_min = static_cast<std::size_t>(threshold(refs, "ablations", "paired_min"));
  const auto& full = table.rows.at(0).stats;
  const auto& no_mut = table.rows.at(1).stats;

  std::vector<Check> out;
  out.push_back({"2a", "full beats w/o mutation on mean final reward", full.mean > no_mut.mean, false,
                 "full " + mean_pm(full) + ", w/o mutation " + mean_pm(no_mut)});

  const auto largest = largest_drop_per_seed(table);
  std::size_t count = 0;
  for (auto r : largest) count += r == 1 ? 1 : 0;
  std::string who;
  for (std::size_t s = 0; s < largest.size(); ++s) {
    if (s > 0) who += ", ";
    who += "seed " + std::to_string(full.seeds.at(s)) + ": " + table.rows[largest[s]].label;
  }
  out.push_back({"2b",
                 "w/o mutation is the largest drop in >= " + std::to_string(paired_min) + " of " +
                     std::to_string(largest.size()) + " paired seeds",
                 count >= paired_min, false, std::to_string(count) + " seeds (" + who + ")"});
  return out;
}

std::vector<Check> check_shift(const harness::ShiftReport& report) {
  if (report.rows.size() != 3) throw InvalidInput("shift report must have three rows");
  const auto& base = report.rows[0];
  const auto& cosmo = report.rows[1];
  const auto& evo = report.rows[2];
  auto describe = [](const harness::ShiftRow& r) {
    return std::string(harness::to_string(r.variant)) + " " + fmt(r.mean_steps, 1) + " (" +
           std::to_string(r.censored) + " censored)";
  };
  const std::string detail = describe(evo) + ", " + describe(cosmo) + ", " + describe(base);
  std::vector<Check> out;
  out.push_back({"3a", "adaptation steps evo <= cosmocore <= baseline",
                 evo.mean_steps <= cosmo.mean_steps && cosmo.mean_steps <= base.mean_steps, false, detail});
  out.push_back({"3b", "adaptation steps evo < baseline", evo.mean_steps < base.mean_steps, false,
                 fmt(evo.mean_steps, 1) + " vs " + fmt(base.mean_steps, 1)});
  return out;
}

std::vector<Check> check_sweep(const harness::SweepReport& report, const nlohmann::json& refs) {
  const double stable = published(refs, "sweep", "stable_rate");
  std::string rows;
  for (const auto& r : report.rows) {
    if (!rows.empty()) rows += ", ";
    rows += fmt(r.rate, 2) + ": " + mean_pm(r.stats);
  }
  const double best = report.rows.at(report.best_index).rate;
  return {{"sweep", "best mutation rate near " + fmt(stable, 1), std::abs(best - stable) <= 0.1 + 1e-12, true,
           "best " + fmt(best, 2) + " [" + rows + "]"}};
}

std::uint64_t count_compositions(int length, int action_max, int target) {
  if (length < 0 || action_max < 0) throw InvalidInput("length and action_max must be non-negative");
  if (target < 0) return 0;
  if (length == 0) return target == 0 ? 1 : 0;
  auto binom = [](std::int64_t n, std::int64_t k) -> std::int64_t {
    if (k < 0 || n < k) return 0;
    std::int64_t r = 1;
    for (std::int64_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
  };
  // Solutions of x_1 + ... + x_L = target with 0 <= x_i <= A.
  std::int64_t total = 0;
  for (int k = 0; k <= length; ++k) {
    const std::int64_t rest = static_cast<std::int64_t>(target) - static_cast<std::int64_t>(k) * (action_max + 1);
    if (rest < 0) break;
    const std::int64_t term = binom(length, k) * binom(rest + length - 1, length - 1);
    total += (k % 2 == 0) ? term : -term;
  }
  return static_cast<std::uint64_t>(total);
}

std::vector<Check> check_oracle(const env::EnvConfig& cfg, const env::OracleReport& exact,
                                const env::MonteCarloEstimate& mc, const nlohmann::json& refs) {
  const double opt = published(refs, "oracle", "optimal_reward");
  const double lo = published(refs, "oracle", "random_min");
  const double hi = published(refs, "oracle", "random_max");
  const auto independent = count_compositions(cfg.length, cfg.action_max, cfg.target);
  const double z = mc.standard_error > 0 ? std::abs(mc.mean - exact.expected_random_reward) / mc.standard_error
                                         : (mc.mean == exact.expected_random_reward ? 0.0 : INFINITY);
  std::vector<Check> out;
  out.push_back({"4a", "optimal reward is exactly " + fmt(opt, 1), exact.optimal_reward == opt, false,
                 "optimal " + fmt(exact.optimal_reward, 6)});
  out.push_back({"4b", "expected random reward in [" + fmt(lo, 1) + ", " + fmt(hi, 1) + "]",
                 exact.expected_random_reward >= lo && exact.expected_random_reward <= hi, false,
                 "expected " + fmt(exact.expected_random_reward, 6)});
  out.push_back({"4c", "Monte Carlo mean within 3 standard errors", z <= 3.0, false,
                 "mc " + fmt(mc.mean, 6) + " se " + fmt(mc.standard_error, 6) + " over " +
                     std::to_string(mc.samples) + " samples, z = " + fmt(z, 2)});
  out.push_back({"4d", "optimal count matches inclusion-exclusion", exact.optimal_count == independent, false,
                 std::to_string(exact.optimal_count) + " vs " + std::to_string(independent)});
  return out;
}

bool all_passed(const std::vector<Check>& checks) {
  for (const auto& c : checks) {
    if (!c.passed && !c.informational) return false;
  }
  return true;
}

std::string format_checks(const std::vector<Check>& checks) {
  std::string out;
  for (const auto& c : checks) {
    const char* tag = c.informational ? "INFO" : (c.passed ? "PASS" : "FAIL");
    out += std::string(tag) + " [" + c.id + "] " + c.description + ": " + c.detail + "\n";
  }
  return out;
}

}  // namespace cosmo_evo::acceptance
