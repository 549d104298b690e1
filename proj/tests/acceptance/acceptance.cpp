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

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "circuitbo/bandit.hpp"
#include "circuitbo/circuit.hpp"
#include "circuitbo/errors.hpp"
#include "circuitbo/geometry.hpp"
#include "circuitbo/gp.hpp"
#include "circuitbo/harness.hpp"
#include "circuitbo/rng.hpp"
#include "oracles/nodal_oracle.hpp"

using namespace circuitbo;

namespace {

using Clock = std::chrono::steady_clock;

constexpr std::size_t kSeeds = 20;

int failures = 0;

void report(int id, const char* title, bool pass, const std::string& detail, double seconds) {
  std::printf("[%s] %2d %s: %s (%.2f s)\n", pass ? "PASS" : "FAIL", id, title, detail.c_str(),
              seconds);
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

sim::TerminalBars bars_at(double left, double right) {
  return {{{left, 0}, {left, 100}}, {{right, 0}, {right, 100}}};
}

double end_to_end(const sim::Conductor& c, double width) {
  const std::vector<sim::Conductor> cs{c};
  return sim::connection_resistance(sim::build_netlist(cs, sim::find_junctions(cs, bars_at(0, width)), {}));
}

sim::Pattern uniform_pattern(sim::ShapeKind kind) {
  sim::Pattern p;
  p.shapes.fill(kind);
  p.offsets = {0, 0, 0};
  return p;
}

struct Campaign {
  std::vector<harness::RunResult> runs;
  std::vector<std::string> csv;
  double seconds = 0.0;
};

Campaign campaign(harness::ExperimentKind kind) {
  Campaign c;
  const auto t0 = Clock::now();
  for (std::size_t s = 1; s <= kSeeds; ++s) {
    const auto spec = harness::make_experiment(kind, s);
    c.runs.push_back(harness::run_experiment(spec));
    c.csv.push_back(harness::history_csv(c.runs.back().history));
  }
  c.seconds = seconds_since(t0);
  return c;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

void criterion_line() {
  const auto t0 = Clock::now();
  const double r = end_to_end(sim::Conductor{sim::Segment{{0, 50}, {100, 50}}}, 100);
  const bool pass = std::abs(r - 20.0) <= 1e-12 && std::abs(r - 20.0) <= 0.7;
  report(1, "line calibration", pass, fmt("R = %.9f ohm (target 20, band 20 +- 0.7)", r),
         seconds_since(t0));
}

void criterion_circle() {
  const auto t0 = Clock::now();
  const double r = end_to_end(sim::Conductor{sim::Ring{{50, 50}, 50}}, 100);
  const bool pass = std::abs(r - 5.0 * std::numbers::pi) <= 1e-9 &&
                    std::abs(r - 15.708) <= 5e-4 && std::abs(r - 16.0) <= 1.2;
  report(2, "circle calibration", pass, fmt("R = %.6f ohm (target 15.708, band 16 +- 1.2)", r),
         seconds_since(t0));
}

void criterion_bridge() {
  const auto t0 = Clock::now();
  const std::vector<sim::Conductor> cs{{sim::Ring{{50, 50}, 50}}, {sim::Ring{{120, 50}, 50}}};
  const auto g = sim::build_netlist(cs, sim::find_junctions(cs, bars_at(0, 170)), {});
  const auto sol = sim::solve_network(g, 30.0);
  std::vector<sim::NodeId> bridge;
  for (sim::NodeId n = 0; n < g.nodes.size(); ++n)
    if (g.nodes[n].role == sim::NodeRole::Junction) bridge.push_back(n);
  double dv = std::numeric_limits<double>::infinity();
  double current = std::numeric_limits<double>::infinity();
  if (bridge.size() == 2) {
    dv = std::abs(sol.node_potentials[bridge[0]] - sol.node_potentials[bridge[1]]);
    current = 0.0;
    for (std::size_t i = 0; i < g.edges.size(); ++i) {
      const auto& e = g.edges[i];
      if ((e.a == bridge[0] && e.b == bridge[1]) || (e.a == bridge[1] && e.b == bridge[0]))
        current = std::max(current, std::abs(sol.branch_currents[i]));
    }
  }
  const bool pass = dv <= 1e-9 && current <= 1e-12;
  char buf[160];
  std::snprintf(buf, sizeof buf, "bridge dV = %.3g V, bridge current = %.3g A", dv, current);
  report(3, "bridge equivalence", pass, buf, seconds_since(t0));
}

void criterion_trend() {
  const auto t0 = Clock::now();
  const auto oracle =
      harness::enumerate_oracle(harness::make_experiment(harness::ExperimentKind::Baseline), 20.0);
  const auto& s = oracle.by_circles;
  bool decreasing = true;
  for (std::size_t k = 1; k < s.size(); ++k) decreasing &= s[k].mean_ohms < s[k - 1].mean_ohms;
  const double spread3 = s[3].max_ohms - s[3].min_ohms;
  const double spread5 = s[5].max_ohms - s[5].min_ohms;
  std::string detail = "mean ohms k=0..5:";
  for (const auto& c : s) detail += fmt(" %.3f", c.mean_ohms);
  detail += fmt("; spread k=3 %.3f", spread3) + fmt(" vs k=5 %.3f", spread5);
  const double secs = seconds_since(t0);
  report(4, "circle-count trend", decreasing && spread3 > spread5 && secs < 10.0, detail, secs);
}

void criterion_halving() {
  const auto t0 = Clock::now();
  const double lines = sim::evaluate(uniform_pattern(sim::ShapeKind::Line), sim::Bench{}).connection_ohms;
  const double circles =
      sim::evaluate(uniform_pattern(sim::ShapeKind::Circle), sim::Bench{}).connection_ohms;
  const auto chain = oracle::ring_chain(5);
  const double independent = oracle::effective_resistance(chain.nodes, chain.resistors, 0, 1);
  const double rel = std::abs(circles - independent) / independent;
  const double ratio = circles / lines;
  char buf[200];
  std::snprintf(buf, sizeof buf, "R_circles %.6f / R_lines %.6f = %.4f; independent %.6f (rel %.2g)",
                circles, lines, ratio, independent, rel);
  report(5, "halving claim", ratio <= 0.7 && rel <= 1e-6, buf, seconds_since(t0));
}

void criterion_baseline(const Campaign& c) {
  const double all_lines = sim::load_voltage(uniform_pattern(sim::ShapeKind::Line), sim::Bench{});
  std::size_t three_plus = 0;
  std::vector<double> best;
  for (const auto& r : c.runs) {
    three_plus += r.best_pattern.circle_count() >= 3;
    best.push_back(r.best_voltage);
  }
  const double share = static_cast<double>(three_plus) / static_cast<double>(c.runs.size());
  const double med = median(best);
  char buf[200];
  std::snprintf(buf, sizeof buf, "%zu/%zu runs with >= 3 circles; median best %.4f V vs %.4f V + 2",
                three_plus, c.runs.size(), med, all_lines);
  report(6, "baseline optimization", share >= 0.8 && med >= all_lines + 2.0 && c.seconds < 120.0,
         buf, c.seconds);
}

void criterion_obstacle(const Campaign& c) {
  const auto t0 = Clock::now();
  const auto spec = harness::make_experiment(harness::ExperimentKind::Obstacle);
  const auto oracle = harness::enumerate_oracle(spec, 10.0);
  const double optimum = oracle.ranked.front().voltage;
  std::size_t clear = 0;
  std::size_t close = 0;
  double best_overall = 0.0;
  for (const auto& r : c.runs) {
    clear += !sim::obstacle_contact(r.best_pattern);
    close += r.best_voltage >= 0.95 * optimum;
    best_overall = std::max(best_overall, r.best_voltage);
  }
  const double n = static_cast<double>(c.runs.size());
  const double secs = c.seconds + seconds_since(t0);
  char buf[240];
  std::snprintf(buf, sizeof buf,
                "%zu/%zu runs contact-free; %zu/%zu within 5%% of grid optimum %.4f V "
                "(best run %.4f V)",
                clear, c.runs.size(), close, c.runs.size(), optimum, best_overall);
  report(7, "obstacle optimization",
         clear / n >= 0.7 && close / n >= 0.7 && secs < 180.0, buf, secs);
}

void criterion_exp3() {
  const auto t0 = Clock::now();
  std::size_t good = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Rng rng(seed);
    bandit::Exp3Agent agent(2, 0.1);
    for (int t = 0; t < 200; ++t) {
      const std::size_t arm = agent.select(rng);
      const double p = arm == 0 ? 0.9 : 0.1;
      agent.update(arm, rng.uniform01() < p ? 1.0 : 0.0);
    }
    good += agent.probabilities()[0] > 0.5;
  }
  const double secs = seconds_since(t0);
  report(8, "EXP3 sanity", good >= 90 && secs < 5.0,
         std::to_string(good) + "/100 seeds favour the better arm", secs);
}

void criterion_gp(const Campaign& baseline, const Campaign& obstacle) {
  const auto t0 = Clock::now();
  const auto space = harness::pattern_space();
  double worst_interp = 0.0;
  double worst_excess = -std::numeric_limits<double>::infinity();
  std::size_t datasets = 0;
  std::size_t fits = 0;
  std::size_t lml_violations = 0;
  bool spd = true;
  for (const Campaign* c : {&baseline, &obstacle}) {
    for (const auto& run : c->runs) {
      for (const auto& f : run.fits) {
        ++fits;
        lml_violations += f.fitted_log_likelihood < f.default_log_likelihood;
      }
      gp::GpDataset data;
      for (const auto& rec : run.history) data.add(rec.input, rec.normalized_reward);
      ++datasets;
      gp::KernelParams p = gp::KernelParams::defaults(space.continuous_dims());
      p.noise_variance = 1e-10;
      try {
        // Interpolation needs distinct inputs; exact repeats keep the mean of
        // their targets, which are equal because the objective is
        // deterministic.
        const gp::GaussianProcess model(space, p, data);
        Rng rng(run.seed);
        for (std::size_t i = 0; i < data.size(); ++i)
          worst_interp = std::max(worst_interp,
                                  std::abs(model.predict(data.inputs[i]).mean - data.targets[i]));
        const double prior = gp::prior_variance(p);
        for (int q = 0; q < 200; ++q) {
          gp::MixedInput z;
          for (int a : space.arities) z.categorical.push_back(static_cast<int>(rng.index(a)));
          for (std::size_t d = 0; d < 3; ++d) z.continuous.push_back(rng.uniform(-20, 20));
          worst_excess = std::max(worst_excess, model.predict(z).variance - prior);
        }
      } catch (const NumericalError&) {
        spd = false;
      }
    }
  }
  const double secs = seconds_since(t0);
  char buf[260];
  std::snprintf(buf, sizeof buf,
                "%zu datasets: max |mean - y| %.2g, max (var - prior) %.2g, SPD %s; "
                "%zu fits, %zu below default LML",
                datasets, worst_interp, worst_excess, spd ? "ok" : "failed", fits, lml_violations);
  report(9, "GP correctness",
         worst_interp <= 1e-4 && worst_excess <= 0.0 && spd && lml_violations == 0 && secs < 30.0,
         buf, secs);
}

void criterion_determinism(const Campaign& a1, const Campaign& a2, const Campaign& b1,
                           const Campaign& b2) {
  std::size_t same = 0;
  std::size_t total = 0;
  for (auto [x, y] : {std::pair{&a1, &a2}, std::pair{&b1, &b2}})
    for (std::size_t i = 0; i < x->csv.size(); ++i) {
      ++total;
      same += x->csv[i] == y->csv[i];
    }
  report(10, "determinism", same == total,
         std::to_string(same) + "/" + std::to_string(total) + " history CSVs byte-identical",
         a2.seconds + b2.seconds);
}

}  // namespace

int main() {
  criterion_line();
  criterion_circle();
  criterion_bridge();
  criterion_trend();
  criterion_halving();
  const Campaign baseline = campaign(harness::ExperimentKind::Baseline);
  criterion_baseline(baseline);
  const Campaign obstacle = campaign(harness::ExperimentKind::Obstacle);
  criterion_obstacle(obstacle);
  criterion_exp3();
  criterion_gp(baseline, obstacle);
  const Campaign baseline_again = campaign(harness::ExperimentKind::Baseline);
  const Campaign obstacle_again = campaign(harness::ExperimentKind::Obstacle);
  criterion_determinism(baseline, baseline_again, obstacle, obstacle_again);
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
