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

// Command-line front end. Talks to the library only through the C API.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "circuitbo/circuitbo.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;

int report_failure(cbo_status status) {
  std::fprintf(stderr, "error: %s: %s\n", cbo_status_name(status), cbo_last_error());
  switch (status) {
    case CBO_ERROR_INVALID_ARGUMENT:
    case CBO_ERROR_OUT_OF_RANGE: return kExitUsage;
    case CBO_ERROR_NUMERICAL:
    case CBO_ERROR_DEGENERATE: return kExitNumerical;
    default: return kExitFailure;
  }
}

std::string pattern_text(const cbo_pattern& p) {
  std::string s;
  for (uint8_t shape : p.shapes) s += shape ? 'C' : 'L';
  char buf[96];
  std::snprintf(buf, sizeof buf, " offsets %.3f,%.3f,%.3f mm", p.offsets_mm[0], p.offsets_mm[1],
                p.offsets_mm[2]);
  return s + buf;
}

int simulate(const std::string& shapes, const std::string& offsets, bool obstacle) {
  cbo_pattern pattern;
  if (cbo_status s = cbo_pattern_parse(shapes.c_str(), offsets.c_str(), &pattern); s != CBO_OK)
    return report_failure(s);
  cbo_circuit* circuit = nullptr;
  if (cbo_status s = cbo_circuit_create(
          &pattern, obstacle ? CBO_EXPERIMENT_OBSTACLE : CBO_EXPERIMENT_BASELINE, &circuit);
      s != CBO_OK)
    return report_failure(s);
  size_t size = 0;
  cbo_circuit_report(circuit, nullptr, 0, &size);
  std::string text(size, '\0');
  cbo_circuit_report(circuit, text.data(), text.size(), &size);
  std::fputs(text.c_str(), stdout);
  cbo_circuit_destroy(circuit);
  return kExitOk;
}

int optimize(const std::string& experiment_name, int iters, int init, uint64_t seed,
             const std::string& out) {
  cbo_experiment experiment;
  if (cbo_status s = cbo_experiment_parse(experiment_name.c_str(), &experiment); s != CBO_OK)
    return report_failure(s);
  cbo_run_config config;
  cbo_run_config_default(experiment, &config);
  config.seed = seed;
  if (iters >= 0) config.n_iter = static_cast<size_t>(iters);
  if (init >= 0) config.n_init = static_cast<size_t>(init);

  cbo_run* run = nullptr;
  if (cbo_status s = cbo_run_execute(experiment, &config, &run); s != CBO_OK)
    return report_failure(s);
  size_t size = 0;
  cbo_status s = cbo_run_write(run, out.c_str(), nullptr, 0, &size);
  std::string dir(size, '\0');
  if (s == CBO_OK) s = cbo_run_write(run, out.c_str(), dir.data(), dir.size(), &size);
  if (s != CBO_OK) {
    cbo_run_destroy(run);
    return report_failure(s);
  }
  cbo_pattern best;
  double volts = 0.0;
  size_t trials = 0;
  cbo_run_best(run, &best, &volts);
  cbo_run_trial_count(run, &trials);
  std::printf("trials: %zu\nbest: %s\nbest voltage: %.6f V\noutput: %s\n", trials,
              pattern_text(best).c_str(), volts, dir.c_str());
  cbo_run_destroy(run);
  return kExitOk;
}

int enumerate(const std::string& experiment_name, double grid_step, const std::string& out) {
  cbo_experiment experiment;
  if (cbo_status s = cbo_experiment_parse(experiment_name.c_str(), &experiment); s != CBO_OK)
    return report_failure(s);
  cbo_oracle* oracle = nullptr;
  if (cbo_status s = cbo_oracle_enumerate(experiment, grid_step, &oracle); s != CBO_OK)
    return report_failure(s);
  if (cbo_status s = cbo_oracle_write_csv(oracle, out.c_str()); s != CBO_OK) {
    cbo_oracle_destroy(oracle);
    return report_failure(s);
  }
  size_t count = 0;
  cbo_oracle_count(oracle, &count);
  cbo_pattern top;
  double volts = 0.0;
  double ohms = 0.0;
  cbo_oracle_entry(oracle, 0, &top, &volts, &ohms, nullptr);
  std::printf("evaluations: %zu\nbest: %s at %.6f V\n", count, pattern_text(top).c_str(), volts);
  std::printf("circles  patterns  disconnected  mean_ohm  min_ohm  max_ohm\n");
  for (size_t k = 0; k <= 5; ++k) {
    cbo_circle_stats st;
    cbo_oracle_circle_stats(oracle, k, &st);
    std::printf("%7zu  %8zu  %12zu  %8.3f  %7.3f  %7.3f\n", st.circles, st.patterns,
                st.disconnected, st.mean_ohms, st.min_ohms, st.max_ohms);
  }
  cbo_oracle_destroy(oracle);
  return kExitOk;
}

int export_plot(const std::string& kind, const std::string& in, const std::string& out) {
  if (cbo_status s = cbo_export_plotdata(kind.c_str(), in.c_str(), out.c_str()); s != CBO_OK)
    return report_failure(s);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mixed-variable Bayesian optimization of drawn conductive circuits"};
  app.require_subcommand(1);

  std::string shapes;
  std::string offsets = "0,0,0";
  bool obstacle = false;
  auto* sim_cmd = app.add_subcommand("simulate", "Evaluate one pattern and print a report");
  sim_cmd->add_option("--shapes", shapes, "Five characters from {L, C}, e.g. LLCLL")->required();
  sim_cmd->add_option("--offsets", offsets, "x1,x2,x3 in mm, each within [-20, 20]");
  sim_cmd->add_flag("--obstacle", obstacle, "Include the 5 ohm obstacle shunt");

  std::string experiment;
  int iters = -1;
  int init = -1;
  uint64_t seed = 0;
  std::string out_dir;
  auto* opt_cmd = app.add_subcommand("optimize", "Run the optimizer against the simulator");
  opt_cmd->add_option("--experiment", experiment, "baseline or obstacle")->required();
  opt_cmd->add_option("--iters", iters, "Optimization rounds (default 40 / 30)")
      ->check(CLI::PositiveNumber);
  opt_cmd->add_option("--init", init, "Initial random points (default 5 / 10)")
      ->check(CLI::Range(2, 100000));
  opt_cmd->add_option("--seed", seed, "Random seed")->required();
  opt_cmd->add_option("--out", out_dir, "Output root; files go to <out>/<experiment>/<seed>/")
      ->required();

  std::string enum_experiment;
  double grid_step = 10.0;
  std::string enum_out;
  auto* enum_cmd = app.add_subcommand("enumerate", "Brute-force every pattern on an offset grid");
  enum_cmd->add_option("--experiment", enum_experiment, "baseline or obstacle")->required();
  enum_cmd->add_option("--grid-step", grid_step, "Offset grid step in mm (must divide 40)");
  enum_cmd->add_option("--out", enum_out, "Ranked CSV output file")->required();

  std::string kind;
  std::string in_file;
  std::string out_file;
  auto* exp_cmd = app.add_subcommand("export", "Derive plot-ready CSV from a history or enumeration");
  exp_cmd->add_option("--kind", kind, "voltage_trace, probability_heatmap or resistance_by_circles")
      ->required();
  exp_cmd->add_option("--in", in_file, "Input CSV")->required();
  exp_cmd->add_option("--out", out_file, "Output CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  if (*sim_cmd) return simulate(shapes, offsets, obstacle);
  if (*opt_cmd) return optimize(experiment, iters, init, seed, out_dir);
  if (*enum_cmd) return enumerate(enum_experiment, grid_step, enum_out);
  if (*exp_cmd) return export_plot(kind, in_file, out_file);
  return kExitUsage;
}
