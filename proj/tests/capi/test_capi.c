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

/* Exercises the shared library through its C header only.
 * Usage: test_capi <scratch directory> */

#include <math.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

#include "sinp/sinp.h"

static int failures = 0;

#define EXPECT(cond)                                                  \
  do {                                                                \
    if (!(cond)) {                                                    \
      fprintf(stderr, "%s:%d: expected %s\n", __FILE__, __LINE__, #cond); \
      ++failures;                                                     \
    }                                                                 \
  } while (0)

#define EXPECT_OK(call)                                                            \
  do {                                                                             \
    sinp_status s_ = (call);                                                       \
    if (s_ != SINP_OK) {                                                           \
      fprintf(stderr, "%s:%d: %s -> %s: %s\n", __FILE__, __LINE__, #call,          \
              sinp_status_name(s_), sinp_last_error());                            \
      ++failures;                                                                  \
    }                                                                              \
  } while (0)

static int close_to(double a, double b, double tol) { return fabs(a - b) <= tol * (1.0 + fabs(b)); }

static void test_names(void) {
  EXPECT(strcmp(sinp_version(), "1.0.0") == 0);
  EXPECT(strcmp(sinp_status_name(SINP_OK), "ok") == 0);
  EXPECT(strcmp(sinp_status_name(SINP_ERR_PARSE), "parse") == 0);
  EXPECT(strcmp(sinp_status_name(SINP_ERR_EXPERIMENT), "experiment") == 0);
}

static void test_single_user(void) {
  const double gains[] = {0.1, 1.0, 10.0};
  const double powers[] = {1.0, 10.0, 100.0};
  const char* strategies[] = {"sin", "zf", "dpc", "noncoop", "myopic-zf"};
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      for (int s = 0; s < 5; ++s) {
        const double re = 0.0, im = sqrt(gains[a]);
        sinp_problem* p = NULL;
        sinp_solution* sol = NULL;
        double rate = -1.0;
        EXPECT_OK(sinp_problem_create_scalar(1, 1, &re, &im, &powers[b], &p));
        EXPECT_OK(sinp_solve(p, strategies[s], &sol));
        EXPECT_OK(sinp_solution_sum_rate(sol, &rate));
        EXPECT(close_to(rate, log2(1.0 + gains[a] * powers[b]), 1e-6));
        sinp_solution_free(sol);
        sinp_problem_free(p);
      }
}

static void test_two_users(void) {
  /* Interference-free diagonal channel. */
  const double h_re[] = {2.0, 0.0, 0.0, 1.0};
  const double power[] = {4.0, 3.0};
  sinp_problem* p = NULL;
  sinp_solution* sol = NULL;
  EXPECT_OK(sinp_problem_create_scalar(2, 2, h_re, NULL, power, &p));

  EXPECT_OK(sinp_solve(p, "zf", &sol));
  size_t count = 0;
  double rates[2] = {0.0, 0.0};
  EXPECT_OK(sinp_solution_rates(sol, NULL, 0, &count));
  EXPECT(count == 2);
  EXPECT(sinp_solution_rates(sol, rates, 1, &count) == SINP_ERR_INVALID_ARGUMENT);
  EXPECT_OK(sinp_solution_rates(sol, rates, 2, &count));
  EXPECT(close_to(rates[0], log2(17.0), 1e-6));
  EXPECT(close_to(rates[1], 2.0, 1e-6));
  sinp_solution_free(sol);

  const int only_first[] = {0};
  EXPECT_OK(sinp_problem_set_cluster(p, 0, only_first, 1));
  EXPECT_OK(sinp_problem_set_option(p, "sin_iterations", 1.0));
  EXPECT_OK(sinp_solve(p, "sin", &sol));
  int iterations = 0, converged = 0;
  EXPECT_OK(sinp_solution_info(sol, &iterations, &converged));
  EXPECT(iterations == 1);
  double sum = 0.0;
  EXPECT_OK(sinp_solution_sum_rate(sol, &sum));
  EXPECT(close_to(sum, log2(17.0) + 2.0, 1e-6));
  sinp_solution_free(sol);

  EXPECT_OK(sinp_problem_set_utility(p, "weighted:1,0"));
  EXPECT_OK(sinp_problem_set_option(p, "sin_iterations", 0.0));
  EXPECT_OK(sinp_solve(p, "sin", &sol));
  double u = 0.0;
  EXPECT_OK(sinp_solution_utility(sol, &u));
  EXPECT(close_to(u, log2(17.0), 1e-6));
  sinp_solution_free(sol);

  EXPECT(sinp_problem_set_utility(p, "weighted:1") == SINP_ERR_INVALID_ARGUMENT);
  EXPECT(sinp_problem_set_utility(p, "fair") == SINP_ERR_PARSE);
  EXPECT(sinp_problem_set_option(p, "speed", 1.0) == SINP_ERR_INVALID_ARGUMENT);
  EXPECT(sinp_problem_set_option(p, "outage", 1.0) == SINP_ERR_INVALID_ARGUMENT);
  const int bad_serving[] = {0, 5};
  EXPECT(sinp_problem_set_serving(p, bad_serving, 2) == SINP_ERR_INVALID_ARGUMENT);
  EXPECT(sinp_problem_set_cluster(p, 2, only_first, 1) == SINP_ERR_INVALID_ARGUMENT);
  sol = (sinp_solution*)&count; /* must be reset on failure */
  EXPECT(sinp_solve(p, "tdma", &sol) == SINP_ERR_INVALID_ARGUMENT);
  EXPECT(sol == NULL);
  EXPECT(strstr(sinp_last_error(), "tdma") != NULL);
  sinp_problem_free(p);
}

static void test_argument_errors(void) {
  sinp_problem* p = NULL;
  const double one = 1.0;
  EXPECT(sinp_problem_create_scalar(0, 1, &one, NULL, &one, &p) == SINP_ERR_INVALID_ARGUMENT);
  EXPECT(p == NULL);
  EXPECT(strlen(sinp_last_error()) > 0);
  EXPECT(sinp_problem_create_scalar(1, 1, NULL, NULL, &one, &p) == SINP_ERR_INVALID_ARGUMENT);
  const double nan_h = NAN;
  EXPECT(sinp_problem_create_scalar(1, 1, &nan_h, NULL, &one, &p) == SINP_ERR_INVALID_ARGUMENT);
  EXPECT(sinp_solve(NULL, "zf", NULL) == SINP_ERR_INVALID_ARGUMENT);
  sinp_problem_free(NULL);
  sinp_solution_free(NULL);
  sinp_config_free(NULL);
  sinp_results_free(NULL);
}

static void test_experiment(const char* dir) {
  sinp_config* c = NULL;
  EXPECT(sinp_config_parse("network = ring\n", &c) == SINP_ERR_PARSE);
  EXPECT(c == NULL);
  EXPECT(sinp_config_load("/nonexistent/sinp.cfg", &c) == SINP_ERR_IO);
  EXPECT(sinp_config_preset("fig9", 0, &c) == SINP_ERR_INVALID_ARGUMENT);

  EXPECT_OK(sinp_config_parse("bases = 4\nsnr_db = 0, 10\nstrategies = noncoop, zf\nfading_trials = 2\n", &c));
  EXPECT(sinp_config_set(c, "bases", "x") == SINP_ERR_PARSE);
  EXPECT(sinp_config_set(c, "outage", "2") == SINP_ERR_INVALID_ARGUMENT);
  EXPECT_OK(sinp_config_set(c, "seed", "5"));

  size_t needed = 0;
  EXPECT_OK(sinp_config_text(c, NULL, 0, &needed));
  EXPECT(needed > 1);
  char* text = (char*)malloc(needed);
  EXPECT_OK(sinp_config_text(c, text, needed, &needed));
  EXPECT(strstr(text, "seed = 5") != NULL);
  free(text);

  sinp_results* r = NULL;
  size_t rows = 0, failed = 0;
  EXPECT_OK(sinp_run(c, &r));
  EXPECT_OK(sinp_results_counts(r, &rows, &failed));
  EXPECT(rows == 2 * 2 * 2);
  EXPECT(failed == 0);

  char raw[1024], summary[1024], plot[1024], sub[1024];
  snprintf(raw, sizeof raw, "%s/capi_raw.csv", dir);
  snprintf(summary, sizeof summary, "%s/capi_summary.csv", dir);
  snprintf(plot, sizeof plot, "%s/capi_plot.csv", dir);
  snprintf(sub, sizeof sub, "%s/capi_out", dir);
  EXPECT_OK(sinp_results_write(r, raw, summary, plot));
  EXPECT_OK(sinp_results_write_configured(r, c, sub));

  sinp_results* back = NULL;
  EXPECT_OK(sinp_results_load_raw(raw, &back));
  size_t rows2 = 0, failed2 = 0;
  EXPECT_OK(sinp_results_counts(back, &rows2, &failed2));
  EXPECT(rows2 == rows);
  EXPECT(sinp_results_load_raw(summary, &back) == SINP_ERR_PARSE);
  EXPECT(sinp_results_write(r, "/nonexistent/dir/raw.csv", NULL, NULL) == SINP_ERR_IO);

  FILE* f = fopen(plot, "r");
  EXPECT(f != NULL);
  if (f) {
    char line[256] = {0};
    EXPECT(fgets(line, sizeof line, f) != NULL);
    EXPECT(strncmp(line, "# sinp-plot v1", 14) == 0);
    EXPECT(fgets(line, sizeof line, f) != NULL);
    EXPECT(strcmp(line, "snr_db,noncoop,zf\n") == 0);
    fclose(f);
  }

  sinp_results_free(back);
  sinp_results_free(r);
  sinp_config_free(c);
}

int main(int argc, char** argv) {
  const char* dir = argc > 1 ? argv[1] : ".";
  test_names();
  test_single_user();
  test_two_users();
  test_argument_errors();
  test_experiment(dir);
  if (failures) {
    fprintf(stderr, "%d check(s) failed\n", failures);
    return 1;
  }
  printf("capi: all checks passed\n");
  return 0;
}
