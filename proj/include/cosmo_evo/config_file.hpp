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
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cosmo_evo/harness.hpp"

namespace cosmo_evo::io {

// What a manifest asks the runner to do with its runs.
enum class ExperimentKind { kVariants, kAblations, kShift, kSweep };

std::string_view to_string(ExperimentKind k);

/// Parsed experiment manifest.
///
/// The file format is line oriented:
///
///     # comment
///     name = toy-table
///     schema_version = 1
///     kind = variants
///     seeds = 0..19
///
///     [defaults]
///     evo.alpha = 0.3
///
///     [run evo]
///     variant = cosmocore-evo
///
/// Keys in `[defaults]` apply to every run; keys in a `[run NAME]` section
/// apply to that run only. A section's `variant` is applied before any other
/// key so explicit overrides win. Run keys placed before any section count
/// as defaults, so a single-run file needs no sections. Unknown keys are
/// errors.
struct ExperimentManifest {
  std::string name;
  int schema_version = 1;
  ExperimentKind kind = ExperimentKind::kVariants;
  std::string output_dir;
  std::vector<std::uint64_t> seeds{0};
  std::vector<double> sweep_rates;  // kind = sweep
  std::vector<harness::RunConfig> runs;
};

// Parses "0..19", "3", or "1,5,9" (ranges allowed inside lists).
std::vector<std::uint64_t> parse_seed_list(std::string_view text);

// Sets one dotted key on a run config. Throws ConfigError naming the key.
void apply_key(harness::RunConfig& cfg, std::string_view key, std::string_view value);

// Every key accepted inside a run or defaults section.
const std::vector<std::string>& run_keys();

// Throws ConfigError; line numbers are included in the message.
ExperimentManifest parse_manifest(std::string_view text, std::string_view origin = "<config>");
ExperimentManifest load_manifest(const std::filesystem::path& path);

std::string read_file(const std::filesystem::path& path);

}  // namespace cosmo_evo::io
