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

/*
 * C interface to the circuit simulator and the mixed-variable optimizer.
 *
 * Every function returns a cbo_status. On failure a message describing the
 * error is available from cbo_last_error() on the calling thread until the
 * next failing call. Objects are opaque handles released with the matching
 * *_destroy function; destroying NULL is a no-op.
 */

#ifndef CIRCUITBO_CIRCUITBO_H_
#define CIRCUITBO_CIRCUITBO_H_

#include <stddef.h>
#include <stdint.h>

#if defined(CIRCUITBO_BUILDING_LIBRARY)
#define CBO_API __attribute__((visibility("default")))
#else
#define CBO_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum cbo_status {
  CBO_OK = 0,
  CBO_ERROR_INVALID_ARGUMENT = 1,
  CBO_ERROR_NUMERICAL = 2,
  CBO_ERROR_DEGENERATE = 3, /* initial observations have zero spread */
  CBO_ERROR_IO = 4,
  CBO_ERROR_NULL_POINTER = 5,
  CBO_ERROR_OUT_OF_RANGE = 6,
  CBO_ERROR_BUFFER_TOO_SMALL = 7,
  CBO_ERROR_INTERNAL = 8
} cbo_status;

typedef enum cbo_experiment {
  CBO_EXPERIMENT_BASELINE = 0,
  CBO_EXPERIMENT_OBSTACLE = 1
} cbo_experiment;

/* shapes[i]: 0 = line, 1 = circle. offsets_mm: displacement of shapes 2..4. */
typedef struct cbo_pattern {
  uint8_t shapes[5];
  double offsets_mm[3];
} cbo_pattern;

CBO_API const char* cbo_version(void);
CBO_API const char* cbo_last_error(void);
CBO_API const char* cbo_status_name(cbo_status status);

CBO_API cbo_status cbo_experiment_parse(const char* name, cbo_experiment* out);

/* shapes: five characters from {L, C}; offsets: "x1,x2,x3" in mm. */
CBO_API cbo_status cbo_pattern_parse(const char* shapes, const char* offsets, cbo_pattern* out);
CBO_API cbo_status cbo_obstacle_contact(const cbo_pattern* pattern, int* contact);

/* ---- single pattern evaluation ---------------------------------------- */

typedef struct cbo_circuit cbo_circuit;

CBO_API cbo_status cbo_circuit_create(const cbo_pattern* pattern, cbo_experiment experiment,
                                      cbo_circuit** out);
CBO_API void cbo_circuit_destroy(cbo_circuit* circuit);
CBO_API cbo_status cbo_circuit_load_voltage(const cbo_circuit* circuit, double* volts);
/* +infinity when no trace joins the bars. */
CBO_API cbo_status cbo_circuit_connection_resistance(const cbo_circuit* circuit, double* ohms);
CBO_API cbo_status cbo_circuit_connected(const cbo_circuit* circuit, int* connected);
CBO_API cbo_status cbo_circuit_obstacle_contact(const cbo_circuit* circuit, int* contact);
CBO_API cbo_status cbo_circuit_junction_count(const cbo_circuit* circuit, size_t* count);
CBO_API cbo_status cbo_circuit_junction(const cbo_circuit* circuit, size_t index, double* x_mm,
                                        double* y_mm, size_t* member_count);
/* Copies a NUL-terminated text report into buffer. *required receives the
 * size needed including the terminator; pass capacity 0 to query it. */
CBO_API cbo_status cbo_circuit_report(const cbo_circuit* circuit, char* buffer, size_t capacity,
                                      size_t* required);

/* ---- optimization runs -------------------------------------------------- */

typedef struct cbo_run_config {
  uint64_t seed;
  size_t n_init;
  size_t n_iter;
  double kappa;
} cbo_run_config;

/* Defaults per experiment: baseline 5 + 40, obstacle 10 + 30, kappa 2. */
CBO_API cbo_status cbo_run_config_default(cbo_experiment experiment, cbo_run_config* out);

typedef struct cbo_trial {
  size_t iter; /* 1-based */
  cbo_pattern pattern;
  double voltage;
  double reward_norm;
  double best_so_far;
  double p_circle[5];
} cbo_trial;

typedef struct cbo_run cbo_run;

CBO_API cbo_status cbo_run_execute(cbo_experiment experiment, const cbo_run_config* config,
                                   cbo_run** out);
CBO_API void cbo_run_destroy(cbo_run* run);
CBO_API cbo_status cbo_run_trial_count(const cbo_run* run, size_t* count);
CBO_API cbo_status cbo_run_trial(const cbo_run* run, size_t index, cbo_trial* out);
CBO_API cbo_status cbo_run_best(const cbo_run* run, cbo_pattern* pattern, double* volts);
/* Writes history.csv and summary.json under <root>/<experiment>/<seed>/.
 * The directory path is copied into dir_buffer (may be NULL). */
CBO_API cbo_status cbo_run_write(const cbo_run* run, const char* root, char* dir_buffer,
                                 size_t capacity, size_t* required);

/* ---- brute-force enumeration -------------------------------------------- */

typedef struct cbo_oracle cbo_oracle;

typedef struct cbo_circle_stats {
  size_t circles;
  size_t patterns;
  size_t disconnected;
  double mean_ohms;
  double min_ohms;
  double max_ohms;
} cbo_circle_stats;

CBO_API cbo_status cbo_oracle_enumerate(cbo_experiment experiment, double grid_step_mm,
                                        cbo_oracle** out);
CBO_API void cbo_oracle_destroy(cbo_oracle* oracle);
CBO_API cbo_status cbo_oracle_count(const cbo_oracle* oracle, size_t* count);
/* Entries are ranked by descending load voltage. */
CBO_API cbo_status cbo_oracle_entry(const cbo_oracle* oracle, size_t rank, cbo_pattern* pattern,
                                    double* volts, double* connection_ohms, int* contact);
CBO_API cbo_status cbo_oracle_circle_stats(const cbo_oracle* oracle, size_t circles,
                                           cbo_circle_stats* out);
CBO_API cbo_status cbo_oracle_write_csv(const cbo_oracle* oracle, const char* path);

/* ---- plot data ----------------------------------------------------------- */

/* kind: "voltage_trace", "probability_heatmap" (history CSV input) or
 * "resistance_by_circles" (enumeration CSV input). */
CBO_API cbo_status cbo_export_plotdata(const char* kind, const char* input_path,
                                       const char* output_path);

#ifdef __cplusplus
}
#endif

#endif /* CIRCUITBO_CIRCUITBO_H_ */
