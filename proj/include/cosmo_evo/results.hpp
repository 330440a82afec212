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
#include <string_view>
#include <vector>

#include <json.hpp>

#include "cosmo_evo/env.hpp"
#include "cosmo_evo/harness.hpp"
#include "cosmo_evo/policy.hpp"
#include "cosmo_evo/replay.hpp"

namespace cosmo_evo::io {

inline constexpr std::string_view kCurveHeader =
    "step,mean_reward,std_reward,buffer_size,mean_priority,distinct_near_optimal";
inline constexpr std::string_view kEventsHeader =
    "step,kind,parents,offspring,pruned,evicted,best_offspring_reward,max_fitness_before,"
    "max_fitness_after,size_after,running_max_reward";
inline constexpr int kSchemaVersion = 1;

std::string curve_csv(const std::vector<harness::CurvePoint>& curve);
// Throws InvalidInput with "origin:line" in the message on malformed input.
std::vector<harness::CurvePoint> parse_curve_csv(std::string_view text,
                                                 std::string_view origin = "<csv>");
std::vector<harness::CurvePoint> load_curve_csv(const std::filesystem::path& path);

std::string events_csv(const std::vector<harness::EventRow>& events);

nlohmann::json record_json(const harness::RunRecord& record, const harness::RunConfig& cfg);
nlohmann::json summary_json(const harness::SummaryStats& stats);
nlohmann::json oracle_json(const env::EnvConfig& cfg, const env::OracleReport& exact,
                           const env::MonteCarloEstimate& mc);
nlohmann::json buffer_json(const replay::ReplayBuffer& buffer);
nlohmann::json logits_json(const policy::CategoricalPolicy& policy);

// Sixteen lowercase hex digits.
std::string hash_hex(std::uint64_t hash);

// Replaces non-alphanumeric characters so a run name can be used in a path.
std::string file_stem(std::string_view name);

void write_text(const std::filesystem::path& path, std::string_view text);
void write_json(const std::filesystem::path& path, const nlohmann::json& value);

struct PlotSeries {
  std::string label;
  std::vector<harness::CurvePoint> curve;
};

// Line plot of mean reward against step with a +-std band per series.
std::string render_svg(const std::vector<PlotSeries>& series, std::string_view title = "");

}  // namespace cosmo_evo::io
