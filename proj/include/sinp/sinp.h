/* Copyright 2026 The sinprecode Authors
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

/* C interface to the sinp precoding library.
 *
 * Every function returning sinp_status reports failures through the
 * status code; sinp_last_error() then holds a message for the calling
 * thread until its next failing call. Objects are opaque and owned by the
 * caller, who releases them with the matching *_free function (NULL is
 * accepted). Rates are in bits/s/Hz. */

#ifndef SINP_SINP_H_
#define SINP_SINP_H_

#include <stddef.h>

#if defined(_WIN32)
#define SINP_API __declspec(dllexport)
#else
#define SINP_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sinp_status {
  SINP_OK = 0,
  SINP_ERR_INVALID_ARGUMENT = 1,
  SINP_ERR_IO = 2,
  SINP_ERR_PARSE = 3,
  SINP_ERR_NUMERIC = 4,
  SINP_ERR_NOT_CONVERGED = 5,
  SINP_ERR_EXPERIMENT = 6, /* too many failed trials */
  SINP_ERR_INTERNAL = 99
} sinp_status;

typedef struct sinp_config sinp_config;
typedef struct sinp_results sinp_results;
typedef struct sinp_problem sinp_problem;
typedef struct sinp_solution sinp_solution;

SINP_API const char* sinp_version(void);
/* Stable lower-case name, e.g. "invalid_argument". */
SINP_API const char* sinp_status_name(sinp_status status);
SINP_API const char* sinp_last_error(void);

/* ---- experiment configuration ---------------------------------------- */

SINP_API sinp_status sinp_config_load(const char* path, sinp_config** out);
SINP_API sinp_status sinp_config_parse(const char* text, sinp_config** out);
/* name: "fig3" or "fig5". */
SINP_API sinp_status sinp_config_preset(const char* name, int full_scale, sinp_config** out);
/* Same keys and value syntax as the config file. */
SINP_API sinp_status sinp_config_set(sinp_config* config, const char* key, const char* value);
/* Writes the config as text. If buffer is too small (or NULL) the text is
 * not written and *needed (including the terminator) says how much room
 * is required. */
SINP_API sinp_status sinp_config_text(const sinp_config* config, char* buffer, size_t capacity,
                                      size_t* needed);
SINP_API void sinp_config_free(sinp_config* config);

/* ---- experiments ------------------------------------------------------ */

SINP_API sinp_status sinp_run(const sinp_config* config, sinp_results** out);
SINP_API sinp_status sinp_results_load_raw(const char* path, sinp_results** out);
SINP_API sinp_status sinp_results_counts(const sinp_results* results, size_t* rows, size_t* failed);
/* Writes the raw table, the aggregated summary and the plot data. A NULL
 * or empty path skips that file. */
SINP_API sinp_status sinp_results_write(const sinp_results* results, const char* raw_path,
                                        const char* summary_path, const char* plot_path);
/* Writes the paths configured in `config`, each prefixed by `directory`
 * unless it is NULL or empty. */
SINP_API sinp_status sinp_results_write_configured(const sinp_results* results, const sinp_config* config,
                                                   const char* directory);
SINP_API void sinp_results_free(sinp_results* results);

/* ---- single instances on scalar channels ------------------------------- */

/* h_re, h_im: users x bases, row-major; h_im may be NULL. power: one entry
 * per base. Defaults: full coordination, user i served by base i mod B,
 * sum-rate utility. */
SINP_API sinp_status sinp_problem_create_scalar(int users, int bases, const double* h_re, const double* h_im,
                                                const double* power, sinp_problem** out);
SINP_API sinp_status sinp_problem_set_cluster(sinp_problem* problem, int user, const int* bases, size_t count);
SINP_API sinp_status sinp_problem_set_serving(sinp_problem* problem, const int* serving, size_t count);
/* "sum", "weighted:w1,w2,...", "pf" or "pf:floor". */
SINP_API sinp_status sinp_problem_set_utility(sinp_problem* problem, const char* spec);
/* Keys: "epsilon", "sin_iterations", "outage". */
SINP_API sinp_status sinp_problem_set_option(sinp_problem* problem, const char* key, double value);
SINP_API void sinp_problem_free(sinp_problem* problem);

/* strategy: "sin", "zf", "dpc", "myopic-zf" or "noncoop". */
SINP_API sinp_status sinp_solve(const sinp_problem* problem, const char* strategy, sinp_solution** out);
SINP_API sinp_status sinp_solution_sum_rate(const sinp_solution* solution, double* out);
SINP_API sinp_status sinp_solution_utility(const sinp_solution* solution, double* out);
/* Per-user rates; *count receives the number of users (0 for "dpc").
 * rates may be NULL to query the count. */
SINP_API sinp_status sinp_solution_rates(const sinp_solution* solution, double* rates, size_t capacity,
                                         size_t* count);
SINP_API sinp_status sinp_solution_info(const sinp_solution* solution, int* iterations, int* converged);
SINP_API void sinp_solution_free(sinp_solution* solution);

#ifdef __cplusplus
}
#endif

#endif /* SINP_SINP_H_ */
