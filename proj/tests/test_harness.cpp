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

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <string>

#include "circuitbo/errors.hpp"
#include "circuitbo/harness.hpp"
#include "doctest.h"

using namespace circuitbo;
using namespace circuitbo::harness;

namespace {

ExperimentSpec short_spec(ExperimentKind kind, std::uint64_t seed) {
  ExperimentSpec spec = make_experiment(kind, seed);
  spec.config.n_iter = 6;
  spec.config.acquisition_samples = 200;
  return spec;
}

std::string first_line(const std::string& s) { return s.substr(0, s.find('\n')); }

std::size_t line_count(const std::string& s) {
  return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

std::filesystem::path scratch(const std::string& name) {
  const auto p = std::filesystem::temp_directory_path() / ("circuitbo_harness_" + name);
  std::filesystem::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("experiment presets") {
  const auto base = make_experiment(ExperimentKind::Baseline, 3);
  CHECK(base.config.n_init == 5);
  CHECK(base.config.n_iter == 40);
  CHECK(base.config.seed == 3);
  CHECK_FALSE(base.bench.obstacle_ohms.has_value());
  CHECK(base.bench.source_volts == 30.0);
  CHECK(base.bench.load_ohms == 45.0);
  const auto obs = make_experiment(ExperimentKind::Obstacle);
  CHECK(obs.config.n_init == 10);
  CHECK(obs.config.n_iter == 30);
  REQUIRE(obs.bench.obstacle_ohms.has_value());
  CHECK(*obs.bench.obstacle_ohms == 5.0);
  CHECK(parse_experiment_kind("obstacle") == ExperimentKind::Obstacle);
  CHECK_THROWS_AS(parse_experiment_kind("stress"), InvalidArgument);
}

TEST_CASE("pattern and input conversions invert each other") {
  const auto p = sim::parse_pattern("CLCCL", "-12.5,0,19");
  const auto z = to_input(p);
  CHECK(z.categorical == std::vector<int>{1, 0, 1, 1, 0});
  const auto back = to_pattern(z);
  CHECK(back.shapes == p.shapes);
  CHECK(back.offsets == p.offsets);
  const auto space = pattern_space();
  CHECK(space.arities == std::vector<int>(5, 2));
  CHECK(space.lower == std::vector<double>(3, -20.0));
  CHECK(space.upper == std::vector<double>(3, 20.0));
}

TEST_CASE("history CSV has the documented schema and round trips") {
  const auto spec = short_spec(ExperimentKind::Baseline, 4);
  const auto run = run_experiment(spec);
  REQUIRE(run.history.size() == 11);
  const std::string csv = history_csv(run.history);
  CHECK(first_line(csv) ==
        "iter,s1,s2,s3,s4,s5,x1,x2,x3,voltage_V,reward_norm,best_so_far_V,"
        "p_circle_s1,p_circle_s2,p_circle_s3,p_circle_s4,p_circle_s5");
  CHECK(line_count(csv) == 12);
  const auto rows = parse_history_csv(csv);
  REQUIRE(rows.size() == 11);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i].iter == i + 1);
    CHECK(rows[i].voltage == doctest::Approx(run.history[i].voltage).epsilon(1e-8));
    CHECK(rows[i].best_so_far == doctest::Approx(run.history[i].best_so_far).epsilon(1e-8));
    CHECK(rows[i].pattern.shapes == to_pattern(run.history[i].input).shapes);
    for (std::size_t d = 0; d < 3; ++d)
      CHECK(std::abs(rows[i].pattern.offsets[d] - run.history[i].input.continuous[d]) <= 5e-4);
    for (std::size_t s = 0; s < 5; ++s)
      CHECK(rows[i].p_circle[s] ==
            doctest::Approx(run.history[i].arm_probabilities[s][1]).epsilon(1e-8));
  }
  CHECK(history_csv(rows) == csv);
}

TEST_CASE("malformed history CSV is rejected") {
  CHECK_THROWS_AS(parse_history_csv("iter,s1\n1,0\n"), InvalidArgument);
  const std::string header =
      "iter,s1,s2,s3,s4,s5,x1,x2,x3,voltage_V,reward_norm,best_so_far_V,"
      "p_circle_s1,p_circle_s2,p_circle_s3,p_circle_s4,p_circle_s5\n";
  CHECK_THROWS_AS(parse_history_csv(header + "1,0,0,0,0,0,0,0,0,abc,0,0,0,0,0,0,0\n"),
                  InvalidArgument);
  CHECK_THROWS_AS(parse_history_csv(header + "1,2,0,0,0,0,0,0,0,1,0,0,0,0,0,0,0\n"),
                  InvalidArgument);
  CHECK(parse_history_csv(header).empty());
}

TEST_CASE("oracle enumeration covers the grid and ranks by voltage") {
  const auto oracle = enumerate_oracle(make_experiment(ExperimentKind::Baseline), 20.0);
  REQUIRE(oracle.ranked.size() == 864);
  for (std::size_t i = 1; i < oracle.ranked.size(); ++i)
    CHECK(oracle.ranked[i - 1].voltage >= oracle.ranked[i].voltage);
  for (const auto& e : oracle.ranked)
    CHECK(e.voltage == sim::load_voltage(e.pattern, sim::Bench{}));
  std::size_t total = 0;
  for (const auto& s : oracle.by_circles) total += s.patterns;
  CHECK(total == 864);
  CHECK(oracle.ranked.front().pattern.circle_count() == 5);
  CHECK(enumerate_oracle(make_experiment(ExperimentKind::Baseline), 40.0).ranked.size() == 256);
  CHECK_THROWS_AS(enumerate_oracle(make_experiment(ExperimentKind::Baseline), 7.0),
                  InvalidArgument);
}

TEST_CASE("oracle CSV round trips") {
  const auto oracle = enumerate_oracle(make_experiment(ExperimentKind::Obstacle), 40.0);
  const std::string csv = oracle_csv(oracle);
  CHECK(first_line(csv) == "rank,s1,s2,s3,s4,s5,x1,x2,x3,voltage_V,connection_ohms,contact");
  const auto parsed = parse_oracle_csv(csv);
  REQUIRE(parsed.size() == oracle.ranked.size());
  for (std::size_t i = 0; i < parsed.size(); ++i) {
    CHECK(parsed[i].pattern.shapes == oracle.ranked[i].pattern.shapes);
    CHECK(parsed[i].contact == oracle.ranked[i].contact);
    CHECK(parsed[i].voltage == doctest::Approx(oracle.ranked[i].voltage).epsilon(1e-8));
    if (std::isinf(oracle.ranked[i].connection_ohms))
      CHECK(std::isinf(parsed[i].connection_ohms));
  }
}

TEST_CASE("simulation report names the key quantities") {
  const std::string report =
      simulation_report(sim::parse_pattern("LLLLL", "0,0,0"), sim::Bench{});
  CHECK(report.find("load voltage: 11.157025 V") != std::string::npos);
  CHECK(report.find("connection resistance: 76.000000 ohm") != std::string::npos);
  CHECK(report.find("obstacle contact: true") != std::string::npos);
  const std::string off =
      simulation_report(sim::parse_pattern("LLLLL", "-20,20,0"), sim::Bench{});
  CHECK(off.find("connected: no") != std::string::npos);
}

TEST_CASE("plot data exports") {
  const auto spec = short_spec(ExperimentKind::Obstacle, 2);
  const auto run = run_experiment(spec);
  const std::string csv = history_csv(run.history);
  const std::string trace = export_plotdata(PlotKind::VoltageTrace, csv);
  CHECK(first_line(trace) == "iter,voltage_V,best_so_far_V");
  CHECK(line_count(trace) == run.history.size() + 1);
  const std::string heat = export_plotdata(PlotKind::ProbabilityHeatmap, csv);
  CHECK(first_line(heat) == "iter,p_circle_s1,p_circle_s2,p_circle_s3,p_circle_s4,p_circle_s5");
  const auto oracle = enumerate_oracle(spec, 40.0);
  const std::string by = export_plotdata(PlotKind::ResistanceByCircles, oracle_csv(oracle));
  CHECK(first_line(by) == "circles,patterns,disconnected,mean_ohms,min_ohms,max_ohms");
  CHECK(line_count(by) == 7);
  CHECK_THROWS_AS(parse_plot_kind("scatter"), InvalidArgument);
  CHECK(parse_plot_kind("voltage_trace") == PlotKind::VoltageTrace);
  CHECK_THROWS_AS(export_plotdata(PlotKind::VoltageTrace, oracle_csv(oracle)), InvalidArgument);
}

TEST_CASE("write_run creates both files and reruns are byte identical") {
  const auto spec = short_spec(ExperimentKind::Baseline, 8);
  const auto a = run_experiment(spec);
  const auto b = run_experiment(spec);
  const auto root = scratch("runs");
  write_run(a, spec, run_directory(root / "a", a));
  write_run(b, spec, run_directory(root / "b", b));
  const auto da = root / "a" / "baseline" / "8";
  const auto db = root / "b" / "baseline" / "8";
  CHECK(std::filesystem::exists(da / "history.csv"));
  CHECK(std::filesystem::exists(da / "summary.json"));
  CHECK(read_file(da / "history.csv") == read_file(db / "history.csv"));
  CHECK(read_file(da / "summary.json").find("\"experiment\": \"baseline\"") != std::string::npos);
  CHECK_THROWS_AS(read_file(root / "missing.csv"), IoError);
  std::filesystem::remove_all(root);
}

TEST_CASE("best pattern matches the best record") {
  const auto run = run_experiment(short_spec(ExperimentKind::Obstacle, 5));
  CHECK(run.best_voltage == run.history.back().best_so_far);
  CHECK(sim::load_voltage(run.best_pattern, make_experiment(ExperimentKind::Obstacle).bench) ==
        run.best_voltage);
}
