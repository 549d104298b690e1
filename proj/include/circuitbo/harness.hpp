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

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "circuitbo/circuit.hpp"
#include "circuitbo/cocabo.hpp"
#include "circuitbo/geometry.hpp"
#include "circuitbo/gp.hpp"

namespace circuitbo::harness {

enum class ExperimentKind { Baseline, Obstacle };

std::string_view to_string(ExperimentKind kind);
// Accepts "baseline" or "obstacle"; throws InvalidArgument otherwise.
ExperimentKind parse_experiment_kind(std::string_view name);

struct ExperimentSpec {
  ExperimentKind kind = ExperimentKind::Baseline;
  sim::Bench bench;
  opt::OptimizerConfig config;

  std::string name() const { return std::string(to_string(kind)); }
  void validate() const;
};

// Baseline: 30 V, 45 ohm load, 5 initial points + 40 iterations.
// Obstacle: adds a 5 ohm shunt on contact, 10 initial points + 30 iterations.
ExperimentSpec make_experiment(ExperimentKind kind, std::uint64_t seed = 0);

// Five binary shape variables and the [-20, 20] mm offset box.
gp::MixedSpace pattern_space();
sim::Pattern to_pattern(const gp::MixedInput& input);
gp::MixedInput to_input(const sim::Pattern& pattern);

struct RunResult {
  std::string experiment;
  std::uint64_t seed = 0;
  std::vector<opt::TrialRecord> history;
  std::vector<opt::FitRecord> fits;
  sim::Pattern best_pattern;
  double best_voltage = 0.0;
  double duration_seconds = 0.0;
};

// Runs the optimizer against the simulated circuit. Errors raised while
// evaluating a trial carry its 1-based iteration number in the message.
RunResult run_experiment(const ExperimentSpec& spec);

// <root>/<experiment>/<seed>
std::filesystem::path run_directory(const std::filesystem::path& root, const RunResult& run);

// Writes history.csv and summary.json into `dir`, creating it if needed.
// Throws IoError naming the offending path.
void write_run(const RunResult& run, const ExperimentSpec& spec, const std::filesystem::path& dir);

// One row of history.csv.
struct HistoryRow {
  std::size_t iter = 0;  // 1-based
  sim::Pattern pattern;
  double voltage = 0.0;
  double reward_norm = 0.0;
  double best_so_far = 0.0;
  std::array<double, sim::kShapeCount> p_circle{};
};

std::string history_csv(std::span<const opt::TrialRecord> history);
std::vector<HistoryRow> parse_history_csv(std::string_view text);
std::string history_csv(std::span<const HistoryRow> rows);
std::string summary_json(const RunResult& run, const ExperimentSpec& spec);

struct OracleEntry {
  sim::Pattern pattern;
  double voltage = 0.0;
  double connection_ohms = 0.0;  // +inf when source and load are not joined
  bool contact = false;
};

// Connection-resistance statistics for all patterns with `circles` circles.
// Disconnected patterns are counted but excluded from mean/min/max.
struct CircleStats {
  std::size_t circles = 0;
  std::size_t patterns = 0;
  std::size_t disconnected = 0;
  double mean_ohms = 0.0;
  double min_ohms = 0.0;
  double max_ohms = 0.0;
};

struct OracleResult {
  std::string experiment;
  double grid_step = 0.0;
  std::vector<OracleEntry> ranked;  // descending voltage, ties in enumeration order
  std::array<CircleStats, sim::kShapeCount + 1> by_circles{};
};

// Every shape combination on the offset grid {-20, -20 + step, ..., 20}^3.
// Throws InvalidArgument unless `grid_step` divides 40 mm evenly.
OracleResult enumerate_oracle(const ExperimentSpec& spec, double grid_step);

std::array<CircleStats, sim::kShapeCount + 1> circle_stats(std::span<const OracleEntry> entries);
std::string oracle_csv(const OracleResult& oracle);
std::vector<OracleEntry> parse_oracle_csv(std::string_view text);

// Human-readable account of one pattern: voltage, resistance, junctions,
// obstacle contact.
std::string simulation_report(const sim::Pattern& pattern, const sim::Bench& bench);

enum class PlotKind { VoltageTrace, ProbabilityHeatmap, ResistanceByCircles };

std::string_view to_string(PlotKind kind);
PlotKind parse_plot_kind(std::string_view name);

// Transforms a history CSV (traces, heat map) or oracle CSV (resistance by
// circle count) into the tidy CSV behind the corresponding figure.
std::string export_plotdata(PlotKind kind, std::string_view input_csv);
void export_plotdata_file(PlotKind kind, const std::filesystem::path& input,
                          const std::filesystem::path& output);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace circuitbo::harness
