// Copyright 2026 The circuitbo Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "circuitbo/harness.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "circuitbo/errors.hpp"
#include "json.hpp"

namespace circuitbo::harness {
namespace {

constexpr std::string_view kHistoryHeader =
    "iter,s1,s2,s3,s4,s5,x1,x2,x3,voltage_V,reward_norm,best_so_far_V,"
    "p_circle_s1,p_circle_s2,p_circle_s3,p_circle_s4,p_circle_s5";
constexpr std::string_view kOracleHeader =
    "rank,s1,s2,s3,s4,s5,x1,x2,x3,voltage_V,connection_ohms,contact";

std::string fmt(const char* format, double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, format, value);
  return buf;
}

std::string sig9(double v) { return fmt("%.9g", v); }
std::string mm3(double v) {
  std::string s = fmt("%.3f", v);
  return s == "-0.000" ? "0.000" : s;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> out;
  while (true) {
    const auto pos = text.find(sep);
    out.push_back(text.substr(0, pos));
    if (pos == std::string_view::npos) break;
    text.remove_prefix(pos + 1);
  }
  return out;
}

std::vector<std::string_view> lines(std::string_view text) {
  std::vector<std::string_view> out;
  for (std::string_view line : split(text, '\n')) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!line.empty()) out.push_back(line);
  }
  return out;
}

double to_double(std::string_view field) {
  double v = 0.0;
  const char* end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(field.data(), end, v);
  if (ec != std::errc{} || ptr != end || field.empty())
    throw InvalidArgument("malformed number '" + std::string(field) + "' in CSV");
  return v;
}

std::size_t to_size(std::string_view field) {
  std::size_t v = 0;
  const char* end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(field.data(), end, v);
  if (ec != std::errc{} || ptr != end || field.empty())
    throw InvalidArgument("malformed integer '" + std::string(field) + "' in CSV");
  return v;
}

sim::ShapeKind to_shape(std::string_view field) {
  if (field == "0") return sim::ShapeKind::Line;
  if (field == "1") return sim::ShapeKind::Circle;
  throw InvalidArgument("shape column must be 0 or 1, got '" + std::string(field) + "'");
}

std::vector<std::vector<std::string_view>> table(std::string_view text, std::string_view header) {
  const auto rows = lines(text);
  if (rows.empty() || rows.front() != header)
    throw InvalidArgument("unexpected CSV header; expected '" + std::string(header) + "'");
  const std::size_t width = split(header, ',').size();
  std::vector<std::vector<std::string_view>> out;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    auto fields = split(rows[i], ',');
    if (fields.size() != width)
      throw InvalidArgument("CSV row " + std::to_string(i) + " has " +
                            std::to_string(fields.size()) + " fields, expected " +
                            std::to_string(width));
    out.push_back(std::move(fields));
  }
  return out;
}

void append_pattern(std::string& out, const sim::Pattern& p) {
  for (sim::ShapeKind s : p.shapes) out += s == sim::ShapeKind::Circle ? "1," : "0,";
  for (double x : p.offsets) out += mm3(x) + ",";
}

sim::Pattern read_pattern(const std::vector<std::string_view>& f, std::size_t first) {
  sim::Pattern p;
  for (std::size_t i = 0; i < sim::kShapeCount; ++i) p.shapes[i] = to_shape(f[first + i]);
  for (std::size_t i = 0; i < sim::kOffsetCount; ++i)
    p.offsets[i] = to_double(f[first + sim::kShapeCount + i]);
  return p;
}

std::string member_name(const sim::ObjectRef& ref) {
  switch (ref.kind) {
    case sim::ObjectKind::SourceBar: return "source-bar";
    case sim::ObjectKind::LoadBar: return "load-bar";
    case sim::ObjectKind::Conductor: break;
  }
  return "s" + std::to_string(ref.index + 1);
}

}  // namespace

std::string_view to_string(ExperimentKind kind) {
  return kind == ExperimentKind::Baseline ? "baseline" : "obstacle";
}

ExperimentKind parse_experiment_kind(std::string_view name) {
  if (name == "baseline") return ExperimentKind::Baseline;
  if (name == "obstacle") return ExperimentKind::Obstacle;
  throw InvalidArgument("unknown experiment '" + std::string(name) +
                        "', expected baseline or obstacle");
}

void ExperimentSpec::validate() const {
  sim::validate(bench);
  config.validate();
  if (kind == ExperimentKind::Baseline && bench.obstacle_ohms)
    throw InvalidArgument("baseline experiment cannot have an obstacle");
  if (kind == ExperimentKind::Obstacle && !bench.obstacle_ohms)
    throw InvalidArgument("obstacle experiment needs an obstacle resistance");
}

ExperimentSpec make_experiment(ExperimentKind kind, std::uint64_t seed) {
  ExperimentSpec spec;
  spec.kind = kind;
  spec.config.seed = seed;
  if (kind == ExperimentKind::Obstacle) {
    spec.bench.obstacle_ohms = 5.0;
    spec.config.n_init = 10;
    spec.config.n_iter = 30;
  } else {
    spec.config.n_init = 5;
    spec.config.n_iter = 40;
  }
  return spec;
}

gp::MixedSpace pattern_space() {
  gp::MixedSpace space;
  space.arities.assign(sim::kShapeCount, 2);
  space.lower.assign(sim::kOffsetCount, -sim::kMaxOffsetMm);
  space.upper.assign(sim::kOffsetCount, sim::kMaxOffsetMm);
  return space;
}

sim::Pattern to_pattern(const gp::MixedInput& input) {
  pattern_space().validate(input);
  sim::Pattern p;
  for (std::size_t i = 0; i < sim::kShapeCount; ++i)
    p.shapes[i] = static_cast<sim::ShapeKind>(input.categorical[i]);
  for (std::size_t i = 0; i < sim::kOffsetCount; ++i) p.offsets[i] = input.continuous[i];
  return p;
}

gp::MixedInput to_input(const sim::Pattern& pattern) {
  gp::MixedInput z;
  for (sim::ShapeKind s : pattern.shapes) z.categorical.push_back(static_cast<int>(s));
  z.continuous.assign(pattern.offsets.begin(), pattern.offsets.end());
  return z;
}

RunResult run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  const auto start = std::chrono::steady_clock::now();
  std::size_t evaluations = 0;
  const opt::Objective objective = [&](const gp::MixedInput& z) {
    ++evaluations;
    try {
      return sim::load_voltage(to_pattern(z), spec.bench);
    } catch (const NumericalError& e) {
      throw NumericalError("iteration " + std::to_string(evaluations) + ": " + e.what());
    } catch (const InvalidArgument& e) {
      throw InvalidArgument("iteration " + std::to_string(evaluations) + ": " + e.what());
    }
  };
  opt::RunOutput out = opt::run(objective, pattern_space(), spec.config);

  RunResult result;
  result.experiment = spec.name();
  result.seed = spec.config.seed;
  result.history = std::move(out.history);
  result.fits = std::move(out.fits);
  // First record attaining the maximum.
  const auto best = std::max_element(
      result.history.begin(), result.history.end(),
      [](const auto& a, const auto& b) { return a.voltage < b.voltage; });
  result.best_pattern = to_pattern(best->input);
  result.best_voltage = best->voltage;
  result.duration_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

std::filesystem::path run_directory(const std::filesystem::path& root, const RunResult& run) {
  return root / run.experiment / std::to_string(run.seed);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

void write_run(const RunResult& run, const ExperimentSpec& spec, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory '" + dir.string() + "': " + ec.message());
  write_file(dir / "history.csv", history_csv(run.history));
  write_file(dir / "summary.json", summary_json(run, spec));
}

std::string history_csv(std::span<const opt::TrialRecord> history) {
  std::vector<HistoryRow> rows;
  for (const auto& r : history) {
    HistoryRow row;
    row.iter = r.iteration + 1;
    row.pattern = to_pattern(r.input);
    row.voltage = r.voltage;
    row.reward_norm = r.normalized_reward;
    row.best_so_far = r.best_so_far;
    for (std::size_t i = 0; i < sim::kShapeCount; ++i) row.p_circle[i] = r.arm_probabilities[i][1];
    rows.push_back(row);
  }
  return history_csv(rows);
}

std::string history_csv(std::span<const HistoryRow> rows) {
  std::string out(kHistoryHeader);
  out += '\n';
  for (const auto& r : rows) {
    out += std::to_string(r.iter) + ",";
    append_pattern(out, r.pattern);
    out += sig9(r.voltage) + "," + sig9(r.reward_norm) + "," + sig9(r.best_so_far);
    for (double p : r.p_circle) out += "," + sig9(p);
    out += '\n';
  }
  return out;
}

std::vector<HistoryRow> parse_history_csv(std::string_view text) {
  std::vector<HistoryRow> rows;
  for (const auto& f : table(text, kHistoryHeader)) {
    HistoryRow r;
    r.iter = to_size(f[0]);
    r.pattern = read_pattern(f, 1);
    r.voltage = to_double(f[9]);
    r.reward_norm = to_double(f[10]);
    r.best_so_far = to_double(f[11]);
    for (std::size_t i = 0; i < sim::kShapeCount; ++i) r.p_circle[i] = to_double(f[12 + i]);
    rows.push_back(r);
  }
  return rows;
}

std::string summary_json(const RunResult& run, const ExperimentSpec& spec) {
  nlohmann::ordered_json j;
  j["experiment"] = run.experiment;
  j["seed"] = run.seed;
  j["config"] = {{"n_init", spec.config.n_init},
                 {"n_iter", spec.config.n_iter},
                 {"kappa", spec.config.kappa},
                 {"gamma", spec.config.gamma},
                 {"acquisition_samples", spec.config.acquisition_samples},
                 {"acquisition_refinements", spec.config.acquisition_refinements}};
  j["bench"] = {{"source_volts", spec.bench.source_volts},
                {"load_ohms", spec.bench.load_ohms},
                {"obstacle_ohms", spec.bench.obstacle_ohms ? nlohmann::ordered_json(*spec.bench.obstacle_ohms)
                                                           : nlohmann::ordered_json(nullptr)}};
  j["records"] = run.history.size();
  j["best"] = {{"shapes", sim::shapes_to_string(run.best_pattern)},
               {"offsets_mm", run.best_pattern.offsets},
               {"voltage_V", run.best_voltage},
               {"obstacle_contact", sim::obstacle_contact(run.best_pattern)}};
  j["duration_seconds"] = run.duration_seconds;
  return j.dump(2) + "\n";
}

std::array<CircleStats, sim::kShapeCount + 1> circle_stats(std::span<const OracleEntry> entries) {
  std::array<CircleStats, sim::kShapeCount + 1> stats{};
  std::array<double, sim::kShapeCount + 1> sums{};
  for (std::size_t k = 0; k < stats.size(); ++k) {
    stats[k].circles = k;
    stats[k].min_ohms = std::numeric_limits<double>::infinity();
    stats[k].max_ohms = -std::numeric_limits<double>::infinity();
  }
  for (const auto& e : entries) {
    CircleStats& s = stats[e.pattern.circle_count()];
    ++s.patterns;
    if (!std::isfinite(e.connection_ohms)) {
      ++s.disconnected;
      continue;
    }
    sums[s.circles] += e.connection_ohms;
    s.min_ohms = std::min(s.min_ohms, e.connection_ohms);
    s.max_ohms = std::max(s.max_ohms, e.connection_ohms);
  }
  for (auto& s : stats) {
    const std::size_t connected = s.patterns - s.disconnected;
    if (connected == 0) {
      s.mean_ohms = s.min_ohms = s.max_ohms = std::numeric_limits<double>::quiet_NaN();
    } else {
      s.mean_ohms = sums[s.circles] / static_cast<double>(connected);
    }
  }
  return stats;
}

OracleResult enumerate_oracle(const ExperimentSpec& spec, double grid_step) {
  sim::validate(spec.bench);
  const double span_mm = 2.0 * sim::kMaxOffsetMm;
  const double cells = span_mm / grid_step;
  if (!(grid_step > 0.0) || std::abs(cells - std::round(cells)) > 1e-9)
    throw InvalidArgument("grid step must divide 40 mm evenly");
  const auto m = static_cast<std::size_t>(std::round(cells));
  std::vector<double> grid;
  for (std::size_t k = 0; k <= m; ++k)
    grid.push_back(-sim::kMaxOffsetMm + span_mm * static_cast<double>(k) / static_cast<double>(m));

  OracleResult result;
  result.experiment = spec.name();
  result.grid_step = grid_step;
  for (unsigned mask = 0; mask < (1u << sim::kShapeCount); ++mask) {
    sim::Pattern p;
    for (std::size_t i = 0; i < sim::kShapeCount; ++i)
      p.shapes[i] = (mask >> (sim::kShapeCount - 1 - i)) & 1u ? sim::ShapeKind::Circle
                                                              : sim::ShapeKind::Line;
    for (double x1 : grid)
      for (double x2 : grid)
        for (double x3 : grid) {
          p.offsets = {x1, x2, x3};
          const sim::Evaluation ev = sim::evaluate(p, spec.bench);
          result.ranked.push_back(
              {p, ev.solution.load_voltage, ev.connection_ohms, ev.obstacle_contact});
        }
  }
  std::stable_sort(result.ranked.begin(), result.ranked.end(),
                   [](const auto& a, const auto& b) { return a.voltage > b.voltage; });
  result.by_circles = circle_stats(result.ranked);
  return result;
}

std::string oracle_csv(const OracleResult& oracle) {
  std::string out(kOracleHeader);
  out += '\n';
  for (std::size_t i = 0; i < oracle.ranked.size(); ++i) {
    const auto& e = oracle.ranked[i];
    out += std::to_string(i + 1) + ",";
    append_pattern(out, e.pattern);
    out += sig9(e.voltage) + "," + sig9(e.connection_ohms) + "," + (e.contact ? "1" : "0") + "\n";
  }
  return out;
}

std::vector<OracleEntry> parse_oracle_csv(std::string_view text) {
  std::vector<OracleEntry> out;
  for (const auto& f : table(text, kOracleHeader)) {
    OracleEntry e;
    e.pattern = read_pattern(f, 1);
    e.voltage = to_double(f[9]);
    e.connection_ohms = to_double(f[10]);
    e.contact = f[11] == "1";
    out.push_back(e);
  }
  return out;
}

std::string simulation_report(const sim::Pattern& pattern, const sim::Bench& bench) {
  const sim::Evaluation ev = sim::evaluate(pattern, bench);
  std::ostringstream os;
  os << "pattern: " << sim::shapes_to_string(pattern) << " offsets " << mm3(pattern.offsets[0])
     << "," << mm3(pattern.offsets[1]) << "," << mm3(pattern.offsets[2]) << " mm\n";
  os << "experiment: " << (bench.obstacle_ohms ? "obstacle" : "baseline") << "\n";
  os << "load voltage: " << fmt("%.6f", ev.solution.load_voltage) << " V\n";
  os << "connection resistance: "
     << (std::isfinite(ev.connection_ohms) ? fmt("%.6f", ev.connection_ohms) : "inf") << " ohm\n";
  os << "connected: " << (ev.solution.connected ? "yes" : "no") << "\n";
  os << "obstacle contact: " << (ev.obstacle_contact ? "true" : "false") << "\n";
  os << "junctions: " << ev.junctions.size() << "\n";
  for (const auto& j : ev.junctions) {
    os << "  (" << fmt("%.3f", j.position.x) << ", " << fmt("%.3f", j.position.y) << ")";
    for (const auto& m : j.members) os << " " << member_name(m);
    os << "\n";
  }
  return os.str();
}

std::string_view to_string(PlotKind kind) {
  switch (kind) {
    case PlotKind::VoltageTrace: return "voltage_trace";
    case PlotKind::ProbabilityHeatmap: return "probability_heatmap";
    case PlotKind::ResistanceByCircles: return "resistance_by_circles";
  }
  return "";
}

PlotKind parse_plot_kind(std::string_view name) {
  for (PlotKind k :
       {PlotKind::VoltageTrace, PlotKind::ProbabilityHeatmap, PlotKind::ResistanceByCircles})
    if (to_string(k) == name) return k;
  throw InvalidArgument("unknown export kind '" + std::string(name) +
                        "', expected voltage_trace, probability_heatmap or resistance_by_circles");
}

std::string export_plotdata(PlotKind kind, std::string_view input_csv) {
  std::string out;
  switch (kind) {
    case PlotKind::VoltageTrace:
      out = "iter,voltage_V,best_so_far_V\n";
      for (const auto& r : parse_history_csv(input_csv))
        out += std::to_string(r.iter) + "," + sig9(r.voltage) + "," + sig9(r.best_so_far) + "\n";
      break;
    case PlotKind::ProbabilityHeatmap:
      out = "iter,p_circle_s1,p_circle_s2,p_circle_s3,p_circle_s4,p_circle_s5\n";
      for (const auto& r : parse_history_csv(input_csv)) {
        out += std::to_string(r.iter);
        for (double p : r.p_circle) out += "," + sig9(p);
        out += "\n";
      }
      break;
    case PlotKind::ResistanceByCircles:
      out = "circles,patterns,disconnected,mean_ohms,min_ohms,max_ohms\n";
      for (const auto& s : circle_stats(parse_oracle_csv(input_csv)))
        out += std::to_string(s.circles) + "," + std::to_string(s.patterns) + "," +
               std::to_string(s.disconnected) + "," + sig9(s.mean_ohms) + "," +
               sig9(s.min_ohms) + "," + sig9(s.max_ohms) + "\n";
      break;
  }
  return out;
}

void export_plotdata_file(PlotKind kind, const std::filesystem::path& input,
                          const std::filesystem::path& output) {
  write_file(output, export_plotdata(kind, read_file(input)));
}

}  // namespace circuitbo::harness
