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

#include "cosmo_evo/results.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "cosmo_evo/errors.hpp"

namespace cosmo_evo::io {

namespace {

std::string fixed6(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", x);
  return buf;
}

template <typename T>
T parse_field(std::string_view field, std::string_view origin, std::size_t line, std::string_view column) {
  T out{};
  const auto* end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(field.data(), end, out);
  if (field.empty() || ec != std::errc() || ptr != end) {
    throw InvalidInput(std::string(origin) + ":" + std::to_string(line) + ": bad " + std::string(column) +
                       " value '" + std::string(field) + "'");
  }
  return out;
}

std::string_view kind_name(harness::EventKind k) {
  return k == harness::EventKind::kPrune ? "prune" : "evolve";
}

}  // namespace

std::string curve_csv(const std::vector<harness::CurvePoint>& curve) {
  std::string out(kCurveHeader);
  out += '\n';
  for (const auto& p : curve) {
    out += std::to_string(p.step) + ',' + fixed6(p.mean_reward) + ',' + fixed6(p.std_reward) + ',' +
           std::to_string(p.buffer_size) + ',' + fixed6(p.mean_priority) + ',' +
           std::to_string(p.distinct_near_optimal) + '\n';
  }
  return out;
}

std::vector<harness::CurvePoint> parse_curve_csv(std::string_view text, std::string_view origin) {
  static constexpr std::array<std::string_view, 6> kColumns = {
      "step", "mean_reward", "std_reward", "buffer_size", "mean_priority", "distinct_near_optimal"};
  std::vector<harness::CurvePoint> curve;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  bool header_seen = false;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    auto line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!header_seen) {
      if (line != kCurveHeader) {
        throw InvalidInput(std::string(origin) + ":" + std::to_string(line_no) +
                           ": expected header '" + std::string(kCurveHeader) + "'");
      }
      header_seen = true;
      continue;
    }
    if (line.empty()) continue;
    std::array<std::string_view, 6> fields;
    std::size_t n = 0;
    std::size_t start = 0;
    while (true) {
      const auto comma = line.find(',', start);
      if (n == fields.size()) {
        n = fields.size() + 1;
        break;
      }
      fields[n++] = line.substr(start, comma - start);
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (n != fields.size()) {
      throw InvalidInput(std::string(origin) + ":" + std::to_string(line_no) + ": expected 6 fields");
    }
    harness::CurvePoint p;
    p.step = parse_field<std::int64_t>(fields[0], origin, line_no, kColumns[0]);
    p.mean_reward = parse_field<double>(fields[1], origin, line_no, kColumns[1]);
    p.std_reward = parse_field<double>(fields[2], origin, line_no, kColumns[2]);
    p.buffer_size = parse_field<std::size_t>(fields[3], origin, line_no, kColumns[3]);
    p.mean_priority = parse_field<double>(fields[4], origin, line_no, kColumns[4]);
    p.distinct_near_optimal = parse_field<std::size_t>(fields[5], origin, line_no, kColumns[5]);
    curve.push_back(p);
  }
  if (!header_seen) throw InvalidInput(std::string(origin) + ":1: empty file");
  return curve;
}

std::vector<harness::CurvePoint> load_curve_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_curve_csv(ss.str(), path.string());
}

std::string events_csv(const std::vector<harness::EventRow>& events) {
  std::string out(kEventsHeader);
  out += '\n';
  for (const auto& e : events) {
    out += std::to_string(e.step) + ',' + std::string(kind_name(e.kind)) + ',' + std::to_string(e.parents) +
           ',' + std::to_string(e.offspring) + ',' + std::to_string(e.pruned) + ',' +
           std::to_string(e.evicted) + ',' + fixed6(e.best_offspring_reward) + ',' +
           fixed6(e.max_fitness_before) + ',' + fixed6(e.max_fitness_after) + ',' +
           std::to_string(e.size_after) + ',' + fixed6(e.running_max_reward) + '\n';
  }
  return out;
}

nlohmann::json record_json(const harness::RunRecord& record, const harness::RunConfig& cfg) {
  return {
      {"schema_version", kSchemaVersion},
      {"name", record.name},
      {"variant", harness::to_string(record.variant)},
      {"seed", record.seed},
      {"config_hash", hash_hex(record.config_hash)},
      {"final_mean_reward", record.final_mean_reward},
      {"final_std_reward", record.final_std_reward},
      {"distinct_near_optimal", record.distinct_near_optimal},
      {"novelty_score", harness::novelty_score(record, cfg.env)},
      {"total_steps", record.total_steps},
      {"curve_points", record.curve.size()},
      {"events", record.events.size()},
      {"duration_seconds", record.duration_seconds},
  };
}

nlohmann::json summary_json(const harness::SummaryStats& stats) {
  return {
      {"schema_version", kSchemaVersion},
      {"name", stats.name},
      {"variant", harness::to_string(stats.variant)},
      {"seeds", stats.seeds},
      {"final_mean_reward", stats.finals},
      {"mean", stats.mean},
      {"std", stats.std},
      {"novelty", stats.novelty},
      {"novelty_mean", stats.novelty_mean},
  };
}

nlohmann::json oracle_json(const env::EnvConfig& cfg, const env::OracleReport& exact,
                           const env::MonteCarloEstimate& mc) {
  return {
      {"schema_version", kSchemaVersion},
      {"env",
       {{"length", cfg.length},
        {"action_max", cfg.action_max},
        {"target", cfg.target},
        {"reward_base", cfg.reward_base}}},
      {"total_sequences", exact.total_sequences},
      {"expected_random_reward", exact.expected_random_reward},
      {"optimal_reward", exact.optimal_reward},
      {"optimal_count", exact.optimal_count},
      {"monte_carlo", {{"samples", mc.samples}, {"mean", mc.mean}, {"standard_error", mc.standard_error}}},
  };
}

nlohmann::json buffer_json(const replay::ReplayBuffer& buffer) {
  nlohmann::json items = nlohmann::json::array();
  for (const auto& it : buffer.items()) {
    items.push_back({
        {"id", it.id},
        {"trajectory", it.trajectory.actions},
        {"reward", it.reward},
        {"td", it.td},
        {"valence", it.tag.valence()},
        {"arousal", it.tag.arousal()},
        {"priority", it.priority},
        {"fitness", it.fitness},
        {"birth_step", it.birth_step},
        {"generation", it.generation},
    });
  }
  return {{"schema_version", kSchemaVersion},
          {"capacity", buffer.capacity()},
          {"size", buffer.size()},
          {"items", std::move(items)}};
}

nlohmann::json logits_json(const policy::CategoricalPolicy& policy) {
  nlohmann::json rows = nlohmann::json::array();
  for (int i = 0; i < policy.length(); ++i) {
    std::vector<double> row;
    for (int a = 0; a < policy.num_actions(); ++a) row.push_back(policy.logit(i, a));
    rows.push_back(row);
  }
  return {{"schema_version", kSchemaVersion},
          {"length", policy.length()},
          {"num_actions", policy.num_actions()},
          {"logits", std::move(rows)}};
}

std::string hash_hex(std::uint64_t hash) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

std::string file_stem(std::string_view name) {
  std::string out;
  for (char c : name) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '-' ||
                    c == '_' || c == '.';
    out += ok ? c : '_';
  }
  return out.empty() ? "run" : out;
}

void write_text(const std::filesystem::path& path, std::string_view text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

void write_json(const std::filesystem::path& path, const nlohmann::json& value) {
  write_text(path, value.dump(2) + "\n");
}

namespace {

std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&':
        out += "&amp;";
        break;
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      case '"':
        out += "&quot;";
        break;
      default:
        out += c;
    }
  }
  return out;
}

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", x);
  return buf;
}

constexpr std::array<std::string_view, 8> kPalette = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                                      "#9467bd", "#8c564b", "#e377c2", "#17becf"};

}  // namespace

std::string render_svg(const std::vector<PlotSeries>& series, std::string_view title) {
  constexpr double kW = 720, kH = 440, kLeft = 64, kRight = 170, kTop = 36, kBottom = 52;
  const double pw = kW - kLeft - kRight;
  const double ph = kH - kTop - kBottom;

  double x_min = std::numeric_limits<double>::infinity(), x_max = -x_min;
  double y_min = x_min, y_max = -x_min;
  for (const auto& s : series) {
    for (const auto& p : s.curve) {
      x_min = std::min(x_min, static_cast<double>(p.step));
      x_max = std::max(x_max, static_cast<double>(p.step));
      y_min = std::min(y_min, p.mean_reward - p.std_reward);
      y_max = std::max(y_max, p.mean_reward + p.std_reward);
    }
  }
  if (!std::isfinite(x_min)) {
    x_min = 0;
    x_max = 1;
    y_min = 0;
    y_max = 1;
  }
  if (x_max <= x_min) x_max = x_min + 1;
  if (y_max <= y_min) {
    y_min -= 0.5;
    y_max += 0.5;
  }
  const double pad = 0.05 * (y_max - y_min);
  y_min -= pad;
  y_max += pad;

  auto sx = [&](double x) { return kLeft + (x - x_min) / (x_max - x_min) * pw; };
  auto sy = [&](double y) { return kTop + (1.0 - (y - y_min) / (y_max - y_min)) * ph; };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH
      << "\" viewBox=\"0 0 " << kW << ' ' << kH << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!title.empty()) {
    svg << "<text x=\"" << num(kLeft + pw / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
        << xml_escape(title) << "</text>\n";
  }
  svg << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << num(pw) << "\" height=\"" << num(ph)
      << "\" fill=\"none\" stroke=\"#333\"/>\n";

  for (int i = 0; i <= 5; ++i) {
    const double xv = x_min + (x_max - x_min) * i / 5.0;
    const double yv = y_min + (y_max - y_min) * i / 5.0;
    svg << "<line x1=\"" << num(sx(xv)) << "\" y1=\"" << num(kTop + ph) << "\" x2=\"" << num(sx(xv))
        << "\" y2=\"" << num(kTop + ph + 5) << "\" stroke=\"#333\"/>\n";
    svg << "<text x=\"" << num(sx(xv)) << "\" y=\"" << num(kTop + ph + 18) << "\" text-anchor=\"middle\">"
        << static_cast<long long>(std::lround(xv)) << "</text>\n";
    svg << "<line x1=\"" << num(kLeft - 5) << "\" y1=\"" << num(sy(yv)) << "\" x2=\"" << kLeft << "\" y2=\""
        << num(sy(yv)) << "\" stroke=\"#333\"/>\n";
    svg << "<text x=\"" << num(kLeft - 8) << "\" y=\"" << num(sy(yv) + 4) << "\" text-anchor=\"end\">"
        << num(yv) << "</text>\n";
  }
  svg << "<text x=\"" << num(kLeft + pw / 2) << "\" y=\"" << num(kH - 12)
      << "\" text-anchor=\"middle\">step</text>\n";
  svg << "<text x=\"16\" y=\"" << num(kTop + ph / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
      << num(kTop + ph / 2) << ")\">reward</text>\n";

  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const auto color = kPalette[k % kPalette.size()];
    if (!s.curve.empty()) {
      svg << "<polygon fill=\"" << color << "\" fill-opacity=\"0.18\" stroke=\"none\" points=\"";
      for (const auto& p : s.curve) svg << num(sx(p.step)) << ',' << num(sy(p.mean_reward + p.std_reward)) << ' ';
      for (auto it = s.curve.rbegin(); it != s.curve.rend(); ++it)
        svg << num(sx(it->step)) << ',' << num(sy(it->mean_reward - it->std_reward)) << ' ';
      svg << "\"/>\n";
      svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.8\" points=\"";
      for (const auto& p : s.curve) svg << num(sx(p.step)) << ',' << num(sy(p.mean_reward)) << ' ';
      svg << "\"/>\n";
    }
    const double ly = kTop + 14 + 20.0 * static_cast<double>(k);
    const double lx = kLeft + pw + 14;
    svg << "<line x1=\"" << num(lx) << "\" y1=\"" << num(ly) << "\" x2=\"" << num(lx + 22) << "\" y2=\""
        << num(ly) << "\" stroke=\"" << color << "\" stroke-width=\"3\"/>\n";
    svg << "<text x=\"" << num(lx + 28) << "\" y=\"" << num(ly + 4) << "\">" << xml_escape(s.label)
        << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace cosmo_evo::io
