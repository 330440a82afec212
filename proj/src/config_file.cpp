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

#include "cosmo_evo/config_file.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "cosmo_evo/errors.hpp"

namespace cosmo_evo::io {

std::string_view to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::kVariants:
      return "variants";
    case ExperimentKind::kAblations:
      return "ablations";
    case ExperimentKind::kShift:
      return "shift";
    case ExperimentKind::kSweep:
      return "sweep";
  }
  return "unknown";
}

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    parts.push_back(trim(s.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

double to_double(std::string_view key, std::string_view v) {
  double out = 0.0;
  const auto* end = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end || v.empty())
    throw ConfigError(std::string(key), "expected a number, got '" + std::string(v) + "'");
  return out;
}

std::int64_t to_int(std::string_view key, std::string_view v) {
  std::int64_t out = 0;
  const auto* end = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end || v.empty())
    throw ConfigError(std::string(key), "expected an integer, got '" + std::string(v) + "'");
  return out;
}

std::size_t to_count(std::string_view key, std::string_view v) {
  const auto x = to_int(key, v);
  if (x < 0) throw ConfigError(std::string(key), "must be non-negative");
  return static_cast<std::size_t>(x);
}

bool to_bool(std::string_view key, std::string_view v) {
  if (v == "true" || v == "on" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "off" || v == "0" || v == "no") return false;
  throw ConfigError(std::string(key), "expected true or false, got '" + std::string(v) + "'");
}

// "500:10, 900:12"
env::ShiftSchedule to_shift(std::string_view key, std::string_view v) {
  env::ShiftSchedule schedule;
  if (v.empty() || v == "none") return schedule;
  for (auto entry : split(v, ',')) {
    const auto colon = entry.find(':');
    if (colon == std::string_view::npos)
      throw ConfigError(std::string(key), "entries must look like STEP:TARGET");
    schedule.entries.push_back(
        {to_int(key, trim(entry.substr(0, colon))),
         static_cast<int>(to_int(key, trim(entry.substr(colon + 1))))});
  }
  schedule.validate();
  return schedule;
}

using Setter = void (*)(harness::RunConfig&, std::string_view, std::string_view);

const std::map<std::string, Setter, std::less<>>& setters() {
  using harness::RunConfig;
  static const std::map<std::string, Setter, std::less<>> table = {
      {"variant",
       [](RunConfig& c, std::string_view, std::string_view v) {
         harness::apply_variant_defaults(c, harness::parse_variant(v));
       }},
      {"seed",
       [](RunConfig& c, std::string_view k, std::string_view v) {
         c.seed = static_cast<std::uint64_t>(to_count(k, v));
       }},
      {"n_collect", [](RunConfig& c, std::string_view k, std::string_view v) { c.n_collect = to_int(k, v); }},
      {"n_batches", [](RunConfig& c, std::string_view k, std::string_view v) { c.n_batches = to_int(k, v); }},
      {"prune_period",
       [](RunConfig& c, std::string_view k, std::string_view v) { c.prune_period = to_int(k, v); }},
      {"eval_every", [](RunConfig& c, std::string_view k, std::string_view v) { c.eval_every = to_int(k, v); }},
      {"eval_samples",
       [](RunConfig& c, std::string_view k, std::string_view v) { c.eval_samples = to_count(k, v); }},
      {"final_eval_samples",
       [](RunConfig& c, std::string_view k, std::string_view v) { c.final_eval_samples = to_count(k, v); }},
      {"capacity", [](RunConfig& c, std::string_view k, std::string_view v) { c.capacity = to_count(k, v); }},
      {"env.length",
       [](RunConfig& c, std::string_view k, std::string_view v) { c.env.length = static_cast<int>(to_int(k, v)); }},
      {"env.action_max",
       [](RunConfig& c, std::string_view k, std::string_view v) {
         c.env.action_max = static_cast<int>(to_int(k, v));
       }},
      {"env.target",
       [](RunConfig& c, std::string_view k, std::string_view v) { c.env.target = static_cast<int>(to_int(k, v)); }},
      {"env.reward_base",
       [](RunConfig& c, std::string_view k, std::string_view v) { c.env.reward_base = to_double(k, v); }},
      {"affect.lambda",
       [](RunConfig& c, std::string_view k, std::string_view v) { c.affect.lambda = to_double(k, v); }},
      {"affect.valence_mid",
       [](RunConfig& c, std::string_view k, std::string_view v) { c.affect.valence_mid = to_double(k, v); }},
      {"affect.valence_scale",
       [](RunConfig& c, std::string_view k, std::string_view v) { c.affect.valence_scale = to_double(k, v); }},
      {"affect.arousal_scale",
       [](RunConfig& c, std::string_view k, std::string_view v) { c.affect.arousal_scale = to_double(k, v); }},
      {"affect.prune_v_max",
       [](RunConfig& c, std::string_view k, std::string_view v) { c.affect.prune_v_max = to_double(k, v); }},
      {"affect.prune_a_max",
       [](RunConfig& c, std::string_view k, std::string_view v) { c.affect.prune_a_max = to_double(k, v); }},
      {"evo.enabled", [](RunConfig& c, std::string_view k, std::string_view v) { c.evo_enabled = to_bool(k, v); }},
      {"evo.period", [](RunConfig& c, std::string_view k, std::string_view v) { c.evo.period = to_int(k, v); }},
      {"evo.mutation_rate",
       [](RunConfig& c, std::string_view k, std::string_view v) { c.evo.mutation_rate = to_double(k, v); }},
      {"evo.parent_fraction",
       [](RunConfig& c, std::string_view k, std::string_view v) { c.evo.parent_fraction = to_double(k, v); }},
      {"evo.alpha",
       [](RunConfig& c, std::string_view k, std::string_view v) { c.evo.weights.alpha = to_double(k, v); }},
      {"evo.beta",
       [](RunConfig& c, std::string_view k, std::string_view v) { c.evo.weights.beta = to_double(k, v); }},
      {"evo.gamma",
       [](RunConfig& c, std::string_view k, std::string_view v) { c.evo.weights.gamma = to_double(k, v); }},
      {"evo.forbidden_action",
       [](RunConfig& c, std::string_view k, std::string_view v) {
         if (v == "none") {
           c.evo.forbidden_action.reset();
         } else {
           c.evo.forbidden_action = static_cast<int>(to_int(k, v));
         }
       }},
      {"learn.learning_rate",
       [](RunConfig& c, std::string_view k, std::string_view v) { c.learn.learning_rate = to_double(k, v); }},
      {"learn.batch_size",
       [](RunConfig& c, std::string_view k, std::string_view v) { c.learn.batch_size = to_count(k, v); }},
      {"learn.advantage_floor",
       [](RunConfig& c, std::string_view k, std::string_view v) { c.learn.advantage_floor = to_double(k, v); }},
      {"sample.high_fraction",
       [](RunConfig& c, std::string_view k, std::string_view v) { c.sample.high_fraction = to_double(k, v); }},
      {"sample.top_fraction",
       [](RunConfig& c, std::string_view k, std::string_view v) { c.sample.top_fraction = to_double(k, v); }},
      {"sample.novelty_mu",
       [](RunConfig& c, std::string_view k, std::string_view v) { c.sample.novelty_mu = to_double(k, v); }},
      {"baseline.prior",
       [](RunConfig& c, std::string_view k, std::string_view v) {
         if (v == "oracle") {
           c.baseline_prior.reset();
         } else {
           c.baseline_prior = to_double(k, v);
         }
       }},
      {"baseline.decay",
       [](RunConfig& c, std::string_view k, std::string_view v) { c.baseline_decay = to_double(k, v); }},
      {"shift", [](RunConfig& c, std::string_view k, std::string_view v) { c.shift = to_shift(k, v); }},
      {"ablation.mutation",
       [](RunConfig& c, std::string_view k, std::string_view v) { c.mutation_enabled = to_bool(k, v); }},
      {"ablation.enterprise_fitness",
       [](RunConfig& c, std::string_view k, std::string_view v) {
         c.enterprise_fitness_enabled = to_bool(k, v);
       }},
      {"ablation.novelty_bonus",
       [](RunConfig& c, std::string_view k, std::string_view v) { c.novelty_bonus_enabled = to_bool(k, v); }},
  };
  return table;
}

struct Line {
  std::size_t number = 0;
  std::string key;
  std::string value;
};

struct Section {
  std::string run_name;  // empty for [defaults]
  std::vector<Line> lines;
};

[[noreturn]] void fail_at(std::string_view origin, std::size_t line, const std::string& key,
                          const std::string& message) {
  throw ConfigError(key, message + " (" + std::string(origin) + ":" + std::to_string(line) + ")");
}

// ConfigError::what() already carries the key; keep only the message.
std::string bare_message(const ConfigError& e) {
  std::string_view what = e.what();
  const std::string prefix = e.key() + ": ";
  if (what.starts_with(prefix)) what.remove_prefix(prefix.size());
  return std::string(what);
}

void apply_section(harness::RunConfig& cfg, const Section& section, bool variant_only,
                   std::string_view origin) {
  for (const auto& line : section.lines) {
    const bool is_variant = line.key == "variant";
    if (is_variant != variant_only) continue;
    try {
      apply_key(cfg, line.key, line.value);
    } catch (const ConfigError& e) {
      fail_at(origin, line.number, e.key(), bare_message(e));
    }
  }
}

}  // namespace

const std::vector<std::string>& run_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> out;
    for (const auto& [k, _] : setters()) out.push_back(k);
    return out;
  }();
  return keys;
}

void apply_key(harness::RunConfig& cfg, std::string_view key, std::string_view value) {
  const auto it = setters().find(key);
  if (it == setters().end()) throw ConfigError(std::string(key), "unknown key");
  it->second(cfg, key, value);
}

std::vector<std::uint64_t> parse_seed_list(std::string_view text) {
  std::vector<std::uint64_t> seeds;
  for (auto part : split(text, ',')) {
    const auto dots = part.find("..");
    if (dots != std::string_view::npos) {
      const auto lo = to_count("seeds", trim(part.substr(0, dots)));
      const auto hi = to_count("seeds", trim(part.substr(dots + 2)));
      if (hi < lo) throw ConfigError("seeds", "range end is below its start");
      for (auto s = lo; s <= hi; ++s) seeds.push_back(s);
    } else {
      seeds.push_back(to_count("seeds", part));
    }
  }
  if (seeds.empty()) throw ConfigError("seeds", "no seeds given");
  return seeds;
}

ExperimentManifest parse_manifest(std::string_view text, std::string_view origin) {
  ExperimentManifest manifest;
  Section defaults;
  std::vector<Section> runs;
  Section* current = nullptr;
  std::set<std::string> seen_top;

  std::size_t number = 0;
  std::istringstream in{std::string(text)};
  for (std::string raw; std::getline(in, raw);) {
    ++number;
    auto line = trim(raw);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = trim(line.substr(0, hash));
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') fail_at(origin, number, "section", "unterminated section header");
      const auto inner = trim(line.substr(1, line.size() - 2));
      if (inner == "defaults") {
        current = &defaults;
      } else if (inner.starts_with("run ") || inner == "run") {
        const auto name = trim(inner.substr(3));
        if (name.empty()) fail_at(origin, number, "run", "run section needs a name");
        for (const auto& r : runs) {
          if (r.run_name == name)
            fail_at(origin, number, "run", "duplicate run name '" + std::string(name) + "'");
        }
        runs.push_back(Section{std::string(name), {}});
        current = &runs.back();
      } else {
        fail_at(origin, number, "section", "unknown section [" + std::string(inner) + "]");
      }
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) fail_at(origin, number, std::string(line), "expected KEY = VALUE");
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));

    if (current != nullptr) {
      if (!setters().contains(key)) fail_at(origin, number, key, "unknown key");
      current->lines.push_back(Line{number, key, value});
      continue;
    }

    if (setters().contains(key)) {
      defaults.lines.push_back(Line{number, key, value});
      continue;
    }
    if (!seen_top.insert(key).second) fail_at(origin, number, key, "duplicate key");
    try {
      if (key == "name") {
        manifest.name = value;
      } else if (key == "schema_version") {
        manifest.schema_version = static_cast<int>(to_int(key, value));
        if (manifest.schema_version != 1) throw ConfigError(key, "only schema_version 1 is supported");
      } else if (key == "kind") {
        if (value == "variants") {
          manifest.kind = ExperimentKind::kVariants;
        } else if (value == "ablations") {
          manifest.kind = ExperimentKind::kAblations;
        } else if (value == "shift") {
          manifest.kind = ExperimentKind::kShift;
        } else if (value == "sweep") {
          manifest.kind = ExperimentKind::kSweep;
        } else {
          throw ConfigError(key, "expected variants, ablations, shift or sweep");
        }
      } else if (key == "output_dir") {
        manifest.output_dir = value;
      } else if (key == "seeds") {
        manifest.seeds = parse_seed_list(value);
      } else if (key == "sweep.rates") {
        manifest.sweep_rates.clear();
        for (auto r : split(value, ',')) manifest.sweep_rates.push_back(to_double(key, r));
      } else {
        throw ConfigError(key, "unknown key");
      }
    } catch (const ConfigError& e) {
      fail_at(origin, number, e.key(), bare_message(e));
    }
  }

  if (manifest.name.empty()) manifest.name = "experiment";
  if (runs.empty()) runs.push_back(Section{"run", {}});

  for (const auto& section : runs) {
    harness::RunConfig cfg;
    cfg.name = section.run_name;
    apply_section(cfg, defaults, true, origin);
    apply_section(cfg, section, true, origin);
    apply_section(cfg, defaults, false, origin);
    apply_section(cfg, section, false, origin);
    cfg.validate();
    manifest.runs.push_back(std::move(cfg));
  }

  if (manifest.kind == ExperimentKind::kSweep) {
    if (manifest.sweep_rates.empty()) throw ConfigError("sweep.rates", "a sweep needs at least one rate");
    for (double r : manifest.sweep_rates) {
      if (!(r >= 0.0 && r <= 1.0)) throw ConfigError("sweep.rates", "rates must be in [0, 1]");
    }
  }
  if (manifest.kind == ExperimentKind::kShift) {
    for (const auto& r : manifest.runs) {
      if (r.shift.empty()) throw ConfigError("shift", "a shift experiment needs a shift schedule");
    }
  }
  return manifest;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ExperimentManifest load_manifest(const std::filesystem::path& path) {
  return parse_manifest(read_file(path), path.string());
}

}  // namespace cosmo_evo::io
