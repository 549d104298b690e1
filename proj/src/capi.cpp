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

#include "circuitbo/circuitbo.h"

#include <cstring>
#include <exception>
#include <memory>
#include <new>
#include <string>

#include "circuitbo/circuit.hpp"
#include "circuitbo/errors.hpp"
#include "circuitbo/harness.hpp"

using circuitbo::harness::ExperimentKind;
using circuitbo::harness::ExperimentSpec;
namespace sim = circuitbo::sim;
namespace harness = circuitbo::harness;

struct cbo_circuit {
  sim::Pattern pattern;
  sim::Bench bench;
  sim::Evaluation evaluation;
  std::string report;
};

struct cbo_run {
  ExperimentSpec spec;
  harness::RunResult result;
};

struct cbo_oracle {
  harness::OracleResult result;
};

namespace {

thread_local std::string last_error;

cbo_status fail(cbo_status status, std::string message) {
  last_error = std::move(message);
  return status;
}

template <typename Fn>
cbo_status guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const circuitbo::InvalidArgument& e) {
    return fail(CBO_ERROR_INVALID_ARGUMENT, e.what());
  } catch (const circuitbo::DegenerateNormalizer& e) {
    return fail(CBO_ERROR_DEGENERATE, e.what());
  } catch (const circuitbo::NumericalError& e) {
    return fail(CBO_ERROR_NUMERICAL, e.what());
  } catch (const circuitbo::IoError& e) {
    return fail(CBO_ERROR_IO, e.what());
  } catch (const std::bad_alloc&) {
    return fail(CBO_ERROR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(CBO_ERROR_INTERNAL, e.what());
  } catch (...) {
    return fail(CBO_ERROR_INTERNAL, "unknown error");
  }
}

#define CBO_REQUIRE(ptr)                                                  \
  do {                                                                    \
    if ((ptr) == nullptr) return fail(CBO_ERROR_NULL_POINTER, #ptr " is NULL"); \
  } while (0)

ExperimentKind to_kind(cbo_experiment e) {
  switch (e) {
    case CBO_EXPERIMENT_BASELINE: return ExperimentKind::Baseline;
    case CBO_EXPERIMENT_OBSTACLE: return ExperimentKind::Obstacle;
  }
  throw circuitbo::InvalidArgument("unknown experiment id " + std::to_string(static_cast<int>(e)));
}

sim::Pattern from_c(const cbo_pattern& p) {
  sim::Pattern out;
  for (std::size_t i = 0; i < sim::kShapeCount; ++i) {
    if (p.shapes[i] > 1) throw circuitbo::InvalidArgument("shape values must be 0 or 1");
    out.shapes[i] = static_cast<sim::ShapeKind>(p.shapes[i]);
  }
  for (std::size_t i = 0; i < sim::kOffsetCount; ++i) out.offsets[i] = p.offsets_mm[i];
  sim::validate(out);
  return out;
}

cbo_pattern to_c(const sim::Pattern& p) {
  cbo_pattern out{};
  for (std::size_t i = 0; i < sim::kShapeCount; ++i) out.shapes[i] = static_cast<uint8_t>(p.shapes[i]);
  for (std::size_t i = 0; i < sim::kOffsetCount; ++i) out.offsets_mm[i] = p.offsets[i];
  return out;
}

cbo_status copy_string(const std::string& text, char* buffer, size_t capacity, size_t* required) {
  if (required != nullptr) *required = text.size() + 1;
  if (buffer == nullptr || capacity == 0) return CBO_OK;
  if (capacity < text.size() + 1)
    return fail(CBO_ERROR_BUFFER_TOO_SMALL,
                "buffer holds " + std::to_string(capacity) + " bytes, need " +
                    std::to_string(text.size() + 1));
  std::memcpy(buffer, text.c_str(), text.size() + 1);
  return CBO_OK;
}

}  // namespace

extern "C" {

const char* cbo_version(void) { return "0.1.0"; }

const char* cbo_last_error(void) { return last_error.c_str(); }

const char* cbo_status_name(cbo_status status) {
  switch (status) {
    case CBO_OK: return "ok";
    case CBO_ERROR_INVALID_ARGUMENT: return "invalid argument";
    case CBO_ERROR_NUMERICAL: return "numerical failure";
    case CBO_ERROR_DEGENERATE: return "degenerate initial design";
    case CBO_ERROR_IO: return "i/o error";
    case CBO_ERROR_NULL_POINTER: return "null pointer";
    case CBO_ERROR_OUT_OF_RANGE: return "index out of range";
    case CBO_ERROR_BUFFER_TOO_SMALL: return "buffer too small";
    case CBO_ERROR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

cbo_status cbo_experiment_parse(const char* name, cbo_experiment* out) {
  CBO_REQUIRE(name);
  CBO_REQUIRE(out);
  return guarded([&] {
    *out = harness::parse_experiment_kind(name) == ExperimentKind::Baseline
               ? CBO_EXPERIMENT_BASELINE
               : CBO_EXPERIMENT_OBSTACLE;
    return CBO_OK;
  });
}

cbo_status cbo_pattern_parse(const char* shapes, const char* offsets, cbo_pattern* out) {
  CBO_REQUIRE(shapes);
  CBO_REQUIRE(offsets);
  CBO_REQUIRE(out);
  return guarded([&] {
    *out = to_c(sim::parse_pattern(shapes, offsets));
    return CBO_OK;
  });
}

cbo_status cbo_obstacle_contact(const cbo_pattern* pattern, int* contact) {
  CBO_REQUIRE(pattern);
  CBO_REQUIRE(contact);
  return guarded([&] {
    *contact = sim::obstacle_contact(from_c(*pattern)) ? 1 : 0;
    return CBO_OK;
  });
}

cbo_status cbo_circuit_create(const cbo_pattern* pattern, cbo_experiment experiment,
                              cbo_circuit** out) {
  CBO_REQUIRE(pattern);
  CBO_REQUIRE(out);
  *out = nullptr;
  return guarded([&] {
    auto circuit = std::make_unique<cbo_circuit>();
    circuit->pattern = from_c(*pattern);
    circuit->bench = harness::make_experiment(to_kind(experiment)).bench;
    circuit->evaluation = sim::evaluate(circuit->pattern, circuit->bench);
    circuit->report = harness::simulation_report(circuit->pattern, circuit->bench);
    *out = circuit.release();
    return CBO_OK;
  });
}

void cbo_circuit_destroy(cbo_circuit* circuit) { delete circuit; }

cbo_status cbo_circuit_load_voltage(const cbo_circuit* circuit, double* volts) {
  CBO_REQUIRE(circuit);
  CBO_REQUIRE(volts);
  *volts = circuit->evaluation.solution.load_voltage;
  return CBO_OK;
}

cbo_status cbo_circuit_connection_resistance(const cbo_circuit* circuit, double* ohms) {
  CBO_REQUIRE(circuit);
  CBO_REQUIRE(ohms);
  *ohms = circuit->evaluation.connection_ohms;
  return CBO_OK;
}

cbo_status cbo_circuit_connected(const cbo_circuit* circuit, int* connected) {
  CBO_REQUIRE(circuit);
  CBO_REQUIRE(connected);
  *connected = circuit->evaluation.solution.connected ? 1 : 0;
  return CBO_OK;
}

cbo_status cbo_circuit_obstacle_contact(const cbo_circuit* circuit, int* contact) {
  CBO_REQUIRE(circuit);
  CBO_REQUIRE(contact);
  *contact = circuit->evaluation.obstacle_contact ? 1 : 0;
  return CBO_OK;
}

cbo_status cbo_circuit_junction_count(const cbo_circuit* circuit, size_t* count) {
  CBO_REQUIRE(circuit);
  CBO_REQUIRE(count);
  *count = circuit->evaluation.junctions.size();
  return CBO_OK;
}

cbo_status cbo_circuit_junction(const cbo_circuit* circuit, size_t index, double* x_mm,
                                double* y_mm, size_t* member_count) {
  CBO_REQUIRE(circuit);
  const auto& junctions = circuit->evaluation.junctions;
  if (index >= junctions.size())
    return fail(CBO_ERROR_OUT_OF_RANGE, "junction index " + std::to_string(index) +
                                            " out of range (" + std::to_string(junctions.size()) +
                                            " junctions)");
  if (x_mm != nullptr) *x_mm = junctions[index].position.x;
  if (y_mm != nullptr) *y_mm = junctions[index].position.y;
  if (member_count != nullptr) *member_count = junctions[index].members.size();
  return CBO_OK;
}

cbo_status cbo_circuit_report(const cbo_circuit* circuit, char* buffer, size_t capacity,
                              size_t* required) {
  CBO_REQUIRE(circuit);
  return copy_string(circuit->report, buffer, capacity, required);
}

cbo_status cbo_run_config_default(cbo_experiment experiment, cbo_run_config* out) {
  CBO_REQUIRE(out);
  return guarded([&] {
    const ExperimentSpec spec = harness::make_experiment(to_kind(experiment));
    *out = {spec.config.seed, spec.config.n_init, spec.config.n_iter, spec.config.kappa};
    return CBO_OK;
  });
}

cbo_status cbo_run_execute(cbo_experiment experiment, const cbo_run_config* config,
                           cbo_run** out) {
  CBO_REQUIRE(config);
  CBO_REQUIRE(out);
  *out = nullptr;
  return guarded([&] {
    auto run = std::make_unique<cbo_run>();
    run->spec = harness::make_experiment(to_kind(experiment), config->seed);
    run->spec.config.n_init = config->n_init;
    run->spec.config.n_iter = config->n_iter;
    run->spec.config.kappa = config->kappa;
    run->result = harness::run_experiment(run->spec);
    *out = run.release();
    return CBO_OK;
  });
}

void cbo_run_destroy(cbo_run* run) { delete run; }

cbo_status cbo_run_trial_count(const cbo_run* run, size_t* count) {
  CBO_REQUIRE(run);
  CBO_REQUIRE(count);
  *count = run->result.history.size();
  return CBO_OK;
}

cbo_status cbo_run_trial(const cbo_run* run, size_t index, cbo_trial* out) {
  CBO_REQUIRE(run);
  CBO_REQUIRE(out);
  const auto& history = run->result.history;
  if (index >= history.size())
    return fail(CBO_ERROR_OUT_OF_RANGE, "trial index " + std::to_string(index) + " out of range");
  return guarded([&] {
    const auto& r = history[index];
    out->iter = r.iteration + 1;
    out->pattern = to_c(harness::to_pattern(r.input));
    out->voltage = r.voltage;
    out->reward_norm = r.normalized_reward;
    out->best_so_far = r.best_so_far;
    for (std::size_t i = 0; i < sim::kShapeCount; ++i) out->p_circle[i] = r.arm_probabilities[i][1];
    return CBO_OK;
  });
}

cbo_status cbo_run_best(const cbo_run* run, cbo_pattern* pattern, double* volts) {
  CBO_REQUIRE(run);
  if (pattern != nullptr) *pattern = to_c(run->result.best_pattern);
  if (volts != nullptr) *volts = run->result.best_voltage;
  return CBO_OK;
}

cbo_status cbo_run_write(const cbo_run* run, const char* root, char* dir_buffer, size_t capacity,
                         size_t* required) {
  CBO_REQUIRE(run);
  CBO_REQUIRE(root);
  return guarded([&] {
    const auto dir = harness::run_directory(root, run->result);
    harness::write_run(run->result, run->spec, dir);
    return copy_string(dir.string(), dir_buffer, capacity, required);
  });
}

cbo_status cbo_oracle_enumerate(cbo_experiment experiment, double grid_step_mm,
                                cbo_oracle** out) {
  CBO_REQUIRE(out);
  *out = nullptr;
  return guarded([&] {
    auto oracle = std::make_unique<cbo_oracle>();
    oracle->result =
        harness::enumerate_oracle(harness::make_experiment(to_kind(experiment)), grid_step_mm);
    *out = oracle.release();
    return CBO_OK;
  });
}

void cbo_oracle_destroy(cbo_oracle* oracle) { delete oracle; }

cbo_status cbo_oracle_count(const cbo_oracle* oracle, size_t* count) {
  CBO_REQUIRE(oracle);
  CBO_REQUIRE(count);
  *count = oracle->result.ranked.size();
  return CBO_OK;
}

cbo_status cbo_oracle_entry(const cbo_oracle* oracle, size_t rank, cbo_pattern* pattern,
                            double* volts, double* connection_ohms, int* contact) {
  CBO_REQUIRE(oracle);
  const auto& ranked = oracle->result.ranked;
  if (rank >= ranked.size())
    return fail(CBO_ERROR_OUT_OF_RANGE, "rank " + std::to_string(rank) + " out of range");
  const auto& e = ranked[rank];
  if (pattern != nullptr) *pattern = to_c(e.pattern);
  if (volts != nullptr) *volts = e.voltage;
  if (connection_ohms != nullptr) *connection_ohms = e.connection_ohms;
  if (contact != nullptr) *contact = e.contact ? 1 : 0;
  return CBO_OK;
}

cbo_status cbo_oracle_circle_stats(const cbo_oracle* oracle, size_t circles,
                                   cbo_circle_stats* out) {
  CBO_REQUIRE(oracle);
  CBO_REQUIRE(out);
  if (circles > sim::kShapeCount)
    return fail(CBO_ERROR_OUT_OF_RANGE, "circle count must be 0..5");
  const auto& s = oracle->result.by_circles[circles];
  *out = {s.circles, s.patterns, s.disconnected, s.mean_ohms, s.min_ohms, s.max_ohms};
  return CBO_OK;
}

cbo_status cbo_oracle_write_csv(const cbo_oracle* oracle, const char* path) {
  CBO_REQUIRE(oracle);
  CBO_REQUIRE(path);
  return guarded([&] {
    harness::write_file(path, harness::oracle_csv(oracle->result));
    return CBO_OK;
  });
}

cbo_status cbo_export_plotdata(const char* kind, const char* input_path, const char* output_path) {
  CBO_REQUIRE(kind);
  CBO_REQUIRE(input_path);
  CBO_REQUIRE(output_path);
  return guarded([&] {
    harness::export_plotdata_file(harness::parse_plot_kind(kind), input_path, output_path);
    return CBO_OK;
  });
}

}  // extern "C"
