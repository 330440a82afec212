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

// Command-line entry point: run experiments, reproduce the bundled tables,
// plot curves, report the oracle and dump buffers.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cosmo_evo/acceptance.hpp"
#include "cosmo_evo/config_file.hpp"
#include "cosmo_evo/errors.hpp"
#include "cosmo_evo/harness.hpp"
#include "cosmo_evo/results.hpp"

namespace fs = std::filesystem;
using namespace cosmo_evo;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

struct Common {
  std::string config;
  std::string out;
  std::string seeds;
  int jobs = 1;
  bool dump_buffer = false;
  bool dump_logits = false;
  std::vector<std::string> overrides;
};

std::string fmt(double x, int digits = 3) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}

void apply_overrides(io::ExperimentManifest& m, const std::vector<std::string>& overrides) {
  for (const auto& kv : overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError(kv, "--set expects KEY=VALUE");
    const auto key = kv.substr(0, eq);
    const auto value = kv.substr(eq + 1);
    for (auto& run : m.runs) {
      io::apply_key(run, key, value);
      run.validate();
    }
  }
}

io::ExperimentManifest load(const std::string& path, const Common& opts) {
  auto m = path.empty() ? io::parse_manifest("", "<defaults>") : io::load_manifest(path);
  apply_overrides(m, opts.overrides);
  if (!opts.seeds.empty()) m.seeds = io::parse_seed_list(opts.seeds);
  return m;
}

fs::path output_root(const io::ExperimentManifest& m, const Common& opts) {
  if (!opts.out.empty()) return opts.out;
  if (!m.output_dir.empty()) return m.output_dir;
  return fs::path("results") / io::file_stem(m.name);
}

// Writes per-seed curves and events for every record of `stats`.
json write_records(const fs::path& root, const harness::RunConfig& cfg, const harness::SummaryStats& stats) {
  const fs::path dir = root / io::file_stem(stats.name);
  json records = json::array();
  for (const auto& r : stats.records) {
    const std::string stem = "seed-" + std::to_string(r.seed);
    io::write_text(dir / (stem + ".csv"), io::curve_csv(r.curve));
    io::write_text(dir / (stem + ".events.csv"), io::events_csv(r.events));
    records.push_back(io::record_json(r, cfg));
  }
  json s = io::summary_json(stats);
  s["records"] = std::move(records);
  return s;
}

harness::RunHook dump_hook(const fs::path& root, const Common& opts) {
  if (!opts.dump_buffer && !opts.dump_logits) return {};
  return [root, opts](const harness::RunConfig& cfg, const harness::RunArtifacts& a) {
    const fs::path dir = root / io::file_stem(cfg.name);
    const std::string stem = "seed-" + std::to_string(cfg.seed);
    if (opts.dump_buffer) io::write_json(dir / (stem + ".buffer.json"), io::buffer_json(a.buffer));
    if (opts.dump_logits) io::write_json(dir / (stem + ".logits.json"), io::logits_json(a.policy));
  };
}

struct Outcome {
  json summary;
  std::vector<acceptance::Check> checks;
  std::string table;
};

std::string row(const std::vector<std::string>& cells, const std::vector<int>& widths) {
  std::string out;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    std::string c = cells[i];
    if (c.size() < static_cast<std::size_t>(widths[i])) c.resize(static_cast<std::size_t>(widths[i]), ' ');
    out += c;
    if (i + 1 < cells.size()) out += "  ";
  }
  while (!out.empty() && out.back() == ' ') out.pop_back();
  return out + "\n";
}

std::string pm(double mean, double std) { return fmt(mean) + " +- " + fmt(std); }

Outcome run_variants(const io::ExperimentManifest& m, const fs::path& root, const Common& opts,
                     const json* refs) {
  Outcome o;
  o.summary["runs"] = json::array();
  std::map<harness::Variant, harness::SummaryStats> by_variant;
  const std::vector<int> w = {18, 18, 18, 8};
  o.table = row({"variant", "published", "measured", "novelty"}, w);
  for (const auto& cfg : m.runs) {
    auto stats = harness::run_variant(cfg, m.seeds, opts.jobs, dump_hook(root, opts));
    auto s = write_records(root, cfg, stats);
    s["config_hash"] = io::hash_hex(harness::config_hash(cfg));
    o.summary["runs"].push_back(std::move(s));
    std::string published = "-";
    if (refs != nullptr) {
      const auto& p = refs->at("toy-table").at("published");
      const std::string key(harness::to_string(cfg.variant));
      if (p.contains(key)) published = pm(p[key].at("mean").get<double>(), p[key].at("std").get<double>());
    }
    o.table += row({cfg.name, published, pm(stats.mean, stats.std), fmt(stats.novelty_mean)}, w);
    by_variant.emplace(cfg.variant, std::move(stats));
  }
  using V = harness::Variant;
  if (refs != nullptr && by_variant.size() == 3) {
    o.checks = acceptance::check_toy_table(by_variant.at(V::kUniformBaseline), by_variant.at(V::kCosmoCore),
                                           by_variant.at(V::kCosmoCoreEvo), *refs);
  }
  return o;
}

Outcome run_ablation_kind(const io::ExperimentManifest& m, const fs::path& root, const Common& opts,
                          const json* refs) {
  Outcome o;
  const auto& base = m.runs.front();
  const auto table = harness::run_ablations(base, m.seeds, opts.jobs, dump_hook(root, opts));
  const std::vector<int> w = {28, 10, 10, 18, 8, 10};
  o.table = row({"row", "pub pass1", "pub nov", "measured", "novelty", "degenerate"}, w);
  json rows = json::array();
  for (const auto& r : table.rows) {
    auto s = write_records(root, base, r.stats);
    s["label"] = r.label;
    s["degenerate"] = r.degenerate;
    rows.push_back(std::move(s));
    std::string pass1 = "-", nov = "-";
    if (refs != nullptr) {
      const auto& p = refs->at("ablations").at("published");
      if (p.contains(r.label)) {
        pass1 = fmt(p[r.label].at("pass_at_1").get<double>(), 1);
        nov = fmt(p[r.label].at("novelty").get<double>(), 1);
      }
    }
    o.table += row({r.label, pass1, nov, pm(r.stats.mean, r.stats.std), fmt(r.stats.novelty_mean),
                    r.degenerate ? "yes" : "no"},
                   w);
  }
  // Paired per-seed columns.
  json paired = json::array();
  const auto largest = acceptance::largest_drop_per_seed(table);
  for (std::size_t k = 0; k < m.seeds.size(); ++k) {
    json entry{{"seed", m.seeds[k]}, {"largest_drop", table.rows[largest[k]].label}};
    for (const auto& r : table.rows) entry[r.label] = r.stats.finals[k];
    paired.push_back(std::move(entry));
  }
  o.summary["ablations"] = std::move(rows);
  o.summary["paired"] = std::move(paired);
  if (refs != nullptr) o.checks = acceptance::check_ablations(table, *refs);
  return o;
}

Outcome run_shift_kind(const io::ExperimentManifest& m, const fs::path& root, const Common& opts,
                       const json* refs) {
  Outcome o;
  const auto& base = m.runs.front();
  const auto report = harness::run_shift(base, m.seeds, base.shift, opts.jobs, dump_hook(root, opts));
  const std::vector<int> w = {18, 12, 14, 9, 18};
  o.table = row({"variant", "published", "mean steps", "censored", "final reward"}, w);
  json rows = json::array();
  for (const auto& r : report.rows) {
    auto s = write_records(root, base, r.stats);
    json per_seed = json::array();
    for (const auto& a : r.per_seed) {
      per_seed.push_back({{"steps", a.steps},
                          {"censored", a.censored},
                          {"plateau", std::isfinite(a.plateau) ? json(a.plateau) : json(nullptr)}});
    }
    s["adaptation"] = std::move(per_seed);
    s["mean_adaptation_steps"] = r.mean_steps;
    s["censored"] = r.censored;
    rows.push_back(std::move(s));
    std::string published = "-";
    if (refs != nullptr) {
      const auto& p = refs->at("shift").at("published");
      const std::string key(harness::to_string(r.variant));
      if (p.contains(key)) published = fmt(p[key].at("adaptation_steps").get<double>(), 0);
    }
    o.table += row({std::string(harness::to_string(r.variant)), published, fmt(r.mean_steps, 1),
                    std::to_string(r.censored), pm(r.stats.mean, r.stats.std)},
                   w);
  }
  o.summary["shift_step"] = report.shift_step;
  o.summary["shift"] = std::move(rows);
  if (refs != nullptr) o.checks = acceptance::check_shift(report);
  return o;
}

Outcome run_sweep_kind(const io::ExperimentManifest& m, const fs::path& root, const Common& opts,
                       const json* refs) {
  Outcome o;
  const auto& base = m.runs.front();
  const auto report = harness::run_mutation_sweep(base, m.seeds, m.sweep_rates, opts.jobs, dump_hook(root, opts));
  const std::vector<int> w = {8, 10, 10, 8, 4};
  o.table = row({"rate", "mean", "std", "novelty", "best"}, w);
  json rows = json::array();
  for (std::size_t i = 0; i < report.rows.size(); ++i) {
    const auto& r = report.rows[i];
    auto stats = r.stats;
    stats.name = base.name + "/rate-" + fmt(r.rate, 2);
    auto s = write_records(root, base, stats);
    s["rate"] = r.rate;
    rows.push_back(std::move(s));
    o.table += row({fmt(r.rate, 2), fmt(r.stats.mean), fmt(r.stats.std), fmt(r.stats.novelty_mean),
                    i == report.best_index ? "*" : ""},
                   w);
  }
  o.summary["sweep"] = std::move(rows);
  o.summary["best_rate"] = report.rows.at(report.best_index).rate;
  if (refs != nullptr) o.checks = acceptance::check_sweep(report, *refs);
  return o;
}

Outcome execute(const io::ExperimentManifest& m, const fs::path& root, const Common& opts, const json* refs) {
  Outcome o;
  switch (m.kind) {
    case io::ExperimentKind::kVariants:
      o = run_variants(m, root, opts, refs);
      break;
    case io::ExperimentKind::kAblations:
      o = run_ablation_kind(m, root, opts, refs);
      break;
    case io::ExperimentKind::kShift:
      o = run_shift_kind(m, root, opts, refs);
      break;
    case io::ExperimentKind::kSweep:
      o = run_sweep_kind(m, root, opts, refs);
      break;
  }
  o.summary["schema_version"] = io::kSchemaVersion;
  o.summary["name"] = m.name;
  o.summary["kind"] = io::to_string(m.kind);
  o.summary["seeds"] = m.seeds;
  if (!o.checks.empty()) {
    json checks = json::array();
    for (const auto& c : o.checks) {
      checks.push_back({{"id", c.id},
                        {"description", c.description},
                        {"passed", c.passed},
                        {"informational", c.informational},
                        {"detail", c.detail}});
    }
    o.summary["checks"] = std::move(checks);
  }
  io::write_json(root / "summary.json", o.summary);
  return o;
}

int cmd_run(const Common& opts) {
  if (opts.config.empty()) throw ConfigError("--config", "a config file is required");
  const auto m = load(opts.config, opts);
  const auto root = output_root(m, opts);
  const auto o = execute(m, root, opts, nullptr);
  std::cout << o.table << "wrote " << (root / "summary.json").string() << "\n";
  return kExitOk;
}

int cmd_reproduce(const std::string& id, const Common& opts, bool strict) {
  static const std::vector<std::string> known = {"toy-table", "ablations", "shift", "sweep"};
  if (std::find(known.begin(), known.end(), id) == known.end()) {
    std::cerr << "error: unknown experiment '" << id
              << "'. Only the toy experiments are reproducible here (toy-table, ablations, shift, sweep); "
                 "LLM benchmarks are out of scope.\n";
    return kExitUsage;
  }
  const fs::path data = acceptance::data_dir();
  const auto refs = acceptance::load_references(data / "reference_values.json");
  const auto m = load((data / (id + ".cfg")).string(), opts);
  const auto root = output_root(m, opts);
  const auto o = execute(m, root, opts, &refs);
  std::cout << id << " over " << m.seeds.size() << " seeds\n\n" << o.table << "\n"
            << acceptance::format_checks(o.checks) << "wrote " << (root / "summary.json").string() << "\n";
  if (strict && !acceptance::all_passed(o.checks)) return kExitRuntime;
  return kExitOk;
}

int cmd_plot(const std::vector<std::string>& csvs, const std::string& out, const std::string& title) {
  std::vector<io::PlotSeries> series;
  for (const auto& path : csvs) {
    auto curve = io::load_curve_csv(path);
    if (curve.empty()) throw InvalidInput(path + ":2: no data rows");
    series.push_back({fs::path(path).stem().string(), std::move(curve)});
  }
  io::write_text(out, io::render_svg(series, title));
  std::cout << "wrote " << out << "\n";
  return kExitOk;
}

int cmd_oracle(const Common& opts, std::uint64_t mc_samples, std::uint64_t seed) {
  const auto m = load(opts.config, opts);
  const auto& env = m.runs.front().env;
  const auto exact = env::oracle_enumerate(env);
  Rng rng(seed);
  const auto mc = env::monte_carlo_random_reward(env, mc_samples, rng);
  std::cout << io::oracle_json(env, exact, mc).dump(2) << "\n";
  return kExitOk;
}

int cmd_dump_buffer(const Common& opts, const std::string& run_name, std::optional<std::int64_t> at_step) {
  if (opts.out.empty()) throw ConfigError("--out", "an output path is required");
  const auto m = load(opts.config, opts);
  const harness::RunConfig* chosen = &m.runs.front();
  if (!run_name.empty()) {
    chosen = nullptr;
    for (const auto& r : m.runs) {
      if (r.name == run_name) chosen = &r;
    }
    if (chosen == nullptr) throw ConfigError("--run", "no run named '" + run_name + "'");
  }
  harness::RunConfig cfg = *chosen;
  cfg.seed = m.seeds.front();
  const auto a = harness::run_single_with_state(cfg, at_step);
  json j = io::buffer_json(a.buffer);
  j["run"] = cfg.name;
  j["seed"] = cfg.seed;
  j["steps"] = a.record.total_steps;
  io::write_json(opts.out, j);
  std::cout << "wrote " << opts.out << " (" << a.buffer.size() << " items)\n";
  return kExitOk;
}

void add_common(CLI::App* cmd, Common& opts, bool with_dumps) {
  cmd->add_option("--config", opts.config, "Experiment config file");
  cmd->add_option("--seeds", opts.seeds, "Seed list, e.g. 0..19 or 1,2,3");
  cmd->add_option("--set", opts.overrides, "Override a run key, KEY=VALUE (repeatable)");
  if (with_dumps) {
    cmd->add_option("--out", opts.out, "Output directory");
    cmd->add_option("--jobs", opts.jobs, "Seeds run in parallel")->envname("COSMO_EVO_JOBS")->check(CLI::PositiveNumber);
    cmd->add_flag("--dump-buffer", opts.dump_buffer, "Write the final buffer of every seed as JSON");
    cmd->add_flag("--dump-logits", opts.dump_logits, "Write the final policy logits of every seed as JSON");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Affective replay with evolutionary buffer updates on a toy synthesis task"};
  app.require_subcommand(1);

  Common opts;
  auto* run = app.add_subcommand("run", "Run the experiment described by a config file");
  add_common(run, opts, true);

  std::string experiment;
  bool strict = false;
  auto* reproduce = app.add_subcommand("reproduce", "Run a bundled experiment and compare with reference values");
  reproduce->add_option("experiment", experiment, "toy-table, ablations, shift or sweep")->required();
  reproduce->add_flag("--strict", strict, "Exit 1 when a check fails");
  add_common(reproduce, opts, true);

  std::vector<std::string> csvs;
  std::string svg_out;
  std::string title;
  auto* plot = app.add_subcommand("plot", "Plot curve CSV files as an SVG");
  plot->add_option("csv", csvs, "Curve CSV files")->required();
  plot->add_option("--out", svg_out, "Output SVG path")->required();
  plot->add_option("--title", title, "Plot title");

  std::uint64_t mc_samples = 100000;
  std::uint64_t mc_seed = 0;
  auto* oracle = app.add_subcommand("oracle", "Print exact and Monte Carlo statistics of the environment");
  add_common(oracle, opts, false);
  oracle->add_option("--mc-samples", mc_samples, "Monte Carlo sample count");
  oracle->add_option("--mc-seed", mc_seed, "Monte Carlo seed");

  std::string run_name;
  std::optional<std::int64_t> at_step;
  auto* dump = app.add_subcommand("dump-buffer", "Run one seed and write its buffer as JSON");
  add_common(dump, opts, false);
  dump->add_option("--out", opts.out, "Output JSON path");
  dump->add_option("--run", run_name, "Run section to use (default: the first)");
  dump->add_option("--at-step", at_step, "Stop after this many steps");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*run) return cmd_run(opts);
    if (*reproduce) return cmd_reproduce(experiment, opts, strict);
    if (*plot) return cmd_plot(csvs, svg_out, title);
    if (*oracle) return cmd_oracle(opts, mc_samples, mc_seed);
    if (*dump) return cmd_dump_buffer(opts, run_name, at_step);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const InvalidInput& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const EnumerationTooLarge& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}
