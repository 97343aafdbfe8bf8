/* Copyright 2026 The covop Authors.
 * SPDX-License-Identifier: Apache-2.0
 *
 * C interface to covop: sup-norm bootstrap tests for covariance operators of
 * functional data, for two samples and for a change point in one series.
 *
 * All functions return a covop_status. On failure, covop_last_error() gives a
 * message for the calling thread. Objects are opaque and must be released
 * with their matching _free function. Strings returned through char** are
 * owned by the caller and released with covop_string_free.
 */
#ifndef COVOP_COVOP_H
#define COVOP_COVOP_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(COVOP_BUILDING_LIBRARY)
#define COVOP_API __declspec(dllexport)
#else
#define COVOP_API __declspec(dllimport)
#endif
#else
#define COVOP_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum covop_status {
  COVOP_OK = 0,
  COVOP_ERR_INVALID_INPUT = 1,
  COVOP_ERR_IO = 2,
  COVOP_ERR_CONFIG = 3,
  COVOP_ERR_INTERNAL = 4
} covop_status;

typedef struct covop_sample covop_sample;
typedef struct covop_report covop_report;
typedef struct covop_experiment covop_experiment;

COVOP_API const char* covop_version(void);
COVOP_API const char* covop_last_error(void);
COVOP_API const char* covop_status_string(covop_status status);
COVOP_API void covop_string_free(char* s);

/* Samples: `count` curves on a common grid of `grid_size` points in [0,1];
 * values are row-major, one curve per row. */
COVOP_API covop_status covop_sample_create(const double* grid, size_t grid_size,
                                           const double* values, size_t count,
                                           covop_sample** out);
COVOP_API covop_status covop_sample_read_csv(const char* path, covop_sample** out);
COVOP_API covop_status covop_sample_write_csv(const covop_sample* sample, const char* path);
COVOP_API size_t covop_sample_count(const covop_sample* sample);
COVOP_API size_t covop_sample_grid_size(const covop_sample* sample);
COVOP_API const double* covop_sample_grid(const covop_sample* sample);
COVOP_API const double* covop_sample_values(const covop_sample* sample);
COVOP_API void covop_sample_free(covop_sample* sample);

/* Simulates a scenario given as JSON (keys: family, design, m, n, grid,
 * seed, c, a, s_star, kappa1, kappa2, coeff_dist, setting, m_changed, d1, d2,
 * k_star). Two-sample designs fill both outputs; series designs fill `first`
 * and set `second` to NULL (second may be NULL for series designs). */
COVOP_API covop_status covop_simulate(const char* scenario_json, covop_sample** first,
                                      covop_sample** second);

typedef struct covop_two_sample_config {
  double alpha;
  double delta; /* 0: classical test of equality; > 0: relevant test */
  size_t block_len_1;
  size_t block_len_2;
  size_t replicates;
  double extremal_const;
  uint64_t seed;
  unsigned workers;
} covop_two_sample_config;

COVOP_API void covop_two_sample_config_init(covop_two_sample_config* config);
COVOP_API covop_status covop_two_sample_test(const covop_sample* x, const covop_sample* y,
                                             const covop_two_sample_config* config,
                                             covop_report** out);

typedef struct covop_change_point_config {
  double alpha;
  double delta; /* 0: classical test of no change; > 0: relevant test */
  size_t block_len;
  size_t replicates;
  double extremal_const;
  double vartheta;
  uint64_t seed;
  unsigned workers;
} covop_change_point_config;

COVOP_API void covop_change_point_config_init(covop_change_point_config* config);
COVOP_API covop_status covop_change_point_test(const covop_sample* series,
                                               const covop_change_point_config* config,
                                               covop_report** out);

COVOP_API int covop_report_reject(const covop_report* report);
COVOP_API double covop_report_statistic(const covop_report* report);
COVOP_API double covop_report_quantile(const covop_report* report);
COVOP_API double covop_report_critical_value(const covop_report* report);
COVOP_API covop_status covop_report_json(const covop_report* report, char** out);
COVOP_API void covop_report_free(covop_report* report);

/* Runs a Monte Carlo plan given as JSON. runs_override = 0 keeps the plan's
 * run count. Results do not depend on `workers`. */
COVOP_API covop_status covop_experiment_run(const char* plan_json, size_t runs_override,
                                            unsigned workers, covop_experiment** out);
COVOP_API covop_status covop_experiment_json(const covop_experiment* experiment, char** out);
COVOP_API covop_status covop_experiment_table_csv(const covop_experiment* experiment,
                                                  char** out);
COVOP_API covop_status covop_experiment_power_curve_csv(const covop_experiment* experiment,
                                                        char** out);
COVOP_API void covop_experiment_free(covop_experiment* experiment);

/* Lower-case hex SHA-256 of a file. */
COVOP_API covop_status covop_file_digest(const char* path, char** out);

#ifdef __cplusplus
}
#endif

#endif /* COVOP_COVOP_H */
