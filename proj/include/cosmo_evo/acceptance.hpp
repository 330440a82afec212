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

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "cosmo_evo/env.hpp"
#include "cosmo_evo/harness.hpp"

namespace cosmo_evo::acceptance {

struct Check {
  std::string id;           // e.g. "1a"
  std::string description;
  bool passed = false;
  bool informational = false;  // reported but never fails
  std::string detail;
};

// Bundled reference values and thresholds (data/reference_values.json).
nlohmann::json load_references(const std::filesystem::path& path);

// Directory holding the bundled configs and reference values. The
// COSMO_EVO_DATA environment variable overrides the compiled-in location.
std::filesystem::path data_dir();

// Criterion 1 over the three variants, in baseline/cosmocore/evo order.
std::vector<Check> check_toy_table(const harness::SummaryStats& baseline,
                                   const harness::SummaryStats& cosmocore,
                                   const harness::SummaryStats& evo, const nlohmann::json& refs);

// Per seed, the ablation whose final reward falls furthest below the full
// run's. Index into rows 1..3 of the table.
std::vector<std::size_t> largest_drop_per_seed(const harness::AblationTable& table);

std::vector<Check> check_ablations(const harness::AblationTable& table, const nlohmann::json& refs);

std::vector<Check> check_shift(const harness::ShiftReport& report);

// Informational: the sweep's best rate against the published stable rate.
std::vector<Check> check_sweep(const harness::SweepReport& report, const nlohmann::json& refs);

// Number of length-L sequences over [0, A] summing to `target`, by
// inclusion-exclusion. Independent of enumeration.
std::uint64_t count_compositions(int length, int action_max, int target);

std::vector<Check> check_oracle(const env::EnvConfig& cfg, const env::OracleReport& exact,
                                const env::MonteCarloEstimate& mc, const nlohmann::json& refs);

bool all_passed(const std::vector<Check>& checks);

// "PASS [1a] description: detail" per check.
std::string format_checks(const std::vector<Check>& checks);

}  // namespace cosmo_evo::acceptance
