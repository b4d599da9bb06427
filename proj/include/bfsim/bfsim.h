/*
 * Copyright 2026 The bfsim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/* C interface to the bfsim simulator and numerical toolkit.
 *
 * Objects are opaque handles released with the matching *_free function.
 * Every fallible call returns a bfs_status; on failure bfs_last_error()
 * describes the problem for the calling thread. Structured results are
 * returned as JSON (or CSV) strings that the caller releases with
 * bfs_string_free(). */

#ifndef BFSIM_BFSIM_H_
#define BFSIM_BFSIM_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define BFS_API __declspec(dllexport)
#else
#define BFS_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum bfs_status {
  BFS_OK = 0,
  BFS_INVALID_ARGUMENT = 1,
  BFS_INVALID_INPUT = 2,
  BFS_UNSUPPORTED_SIZE = 3,
  BFS_INVALID_STATE = 4,
  BFS_OUT_OF_RANGE = 5,
  BFS_SINGULAR_INPUT = 6,
  BFS_OUT_OF_REGIME = 7,
  BFS_IO = 8,
  BFS_RESOURCE_LIMIT = 9,
  BFS_INTERNAL = 100
} bfs_status;

typedef struct bfs_rule bfs_rule;
typedef struct bfs_process bfs_process;
typedef struct bfs_trajectory bfs_trajectory;

typedef struct bfs_edge_event {
  uint64_t step;
  uint32_t first[2];
  uint32_t second[2];
  uint32_t chosen[2];
  int was_first_isolated_pair;
} bfs_edge_event;

typedef struct bfs_process_stats {
  uint64_t n;
  uint64_t m;
  uint64_t isolated;
  uint64_t largest;
  uint64_t sum_sq_sizes;
} bfs_process_stats;

/* Receives human-readable progress lines from long computations. */
typedef void (*bfs_progress_fn)(const char* message, void* user);

BFS_API const char* bfs_version(void);
BFS_API const char* bfs_status_name(bfs_status status);
/* Message of the last failure on this thread; empty when none. */
BFS_API const char* bfs_last_error(void);
BFS_API void bfs_string_free(char* s);

/* spec: "bf", "er", or a JSON rule object. */
BFS_API bfs_status bfs_rule_new(const char* spec, bfs_rule** out);
BFS_API bfs_status bfs_rule_to_json(const bfs_rule* rule, char** out);
BFS_API void bfs_rule_free(bfs_rule* rule);

BFS_API bfs_status bfs_process_new(uint64_t n, const bfs_rule* rule, uint64_t seed,
                                   bfs_process** out);
BFS_API void bfs_process_free(bfs_process* p);
BFS_API bfs_status bfs_process_step(bfs_process* p, bfs_edge_event* event);
BFS_API bfs_status bfs_process_run_until(bfs_process* p, uint64_t m);
BFS_API bfs_status bfs_process_stats_get(const bfs_process* p, bfs_process_stats* out);
BFS_API bfs_status bfs_process_census_json(const bfs_process* p, size_t num_largest,
                                           char** out);

/* er_mode != 0 selects the analytic uniform-edge trajectory. */
BFS_API bfs_status bfs_trajectory_solve(double t_max, double dt, int er_mode,
                                        bfs_trajectory** out);
BFS_API void bfs_trajectory_free(bfs_trajectory* traj);
BFS_API bfs_status bfs_trajectory_rho1(const bfs_trajectory* traj, double t, double* out);
BFS_API bfs_status bfs_trajectory_integrals(const bfs_trajectory* traj, double t,
                                            double* a, double* b);
BFS_API bfs_status bfs_trajectory_csv(const bfs_trajectory* traj, size_t stride,
                                      char** out);

/* options: {"t": [..], "k_max": 8, "method": "quad"|"mc"|"closed_form_er",
 *           "samples", "seed", "nodes", "max_edges"}. */
BFS_API bfs_status bfs_mu_table_json(const bfs_trajectory* traj, const char* options,
                                     char** out);

/* rho_table: {"<k>": [rho, se], ...}. */
BFS_API bfs_status bfs_fit_json(const char* rho_table, double t, int k_min, int k_max,
                                char** out);

/* Runs a t_c sweep; see the README for the configuration keys. */
BFS_API bfs_status bfs_critical_json(const char* config, bfs_progress_fn progress,
                                     void* user, char** out);

/* Runs an experiment and returns the per-replica censuses as JSON. When
 * ndjson is nonzero the result holds one line per replica instead. */
BFS_API bfs_status bfs_simulate_json(const char* config, int ndjson, char** out);

/* suites: comma-separated suite names or "all"; options: JSON overrides of
 * the suite options (may be NULL). *passed is set to 1 when every check
 * passed. */
BFS_API bfs_status bfs_verify_json(const char* suites, const char* options,
                                   bfs_progress_fn progress, void* user, int* passed,
                                   char** out);
BFS_API bfs_status bfs_verify_suite_names(char** out);

#ifdef __cplusplus
}
#endif

#endif /* BFSIM_BFSIM_H_ */
