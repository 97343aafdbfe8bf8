/* Copyright 2026 The covop Authors.
 * SPDX-License-Identifier: Apache-2.0
 *
 * Exercises the C interface from C. Exits non-zero on the first failure.
 */
#include <covop/covop.h>

#include <math.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

static int failures = 0;

#define EXPECT(cond)                                                        \
  do {                                                                      \
    if (!(cond)) {                                                          \
      fprintf(stderr, "%s:%d: check failed: %s\n", __FILE__, __LINE__, #cond); \
      ++failures;                                                           \
    }                                                                       \
  } while (0)

static void test_samples(const char* dir) {
  const double grid[3] = {0.0, 0.5, 1.0};
  const double values[6] = {1.0, 2.0, 3.0, -1.0, 0.5, 0.25};
  covop_sample* s = NULL;
  EXPECT(covop_sample_create(grid, 3, values, 2, &s) == COVOP_OK);
  EXPECT(covop_sample_count(s) == 2);
  EXPECT(covop_sample_grid_size(s) == 3);
  EXPECT(covop_sample_values(s)[4] == 0.5);

  char path[1024];
  snprintf(path, sizeof path, "%s/capi_sample.csv", dir);
  EXPECT(covop_sample_write_csv(s, path) == COVOP_OK);
  covop_sample* back = NULL;
  EXPECT(covop_sample_read_csv(path, &back) == COVOP_OK);
  EXPECT(back != NULL && memcmp(covop_sample_values(back), values, sizeof values) == 0);

  char* digest = NULL;
  EXPECT(covop_file_digest(path, &digest) == COVOP_OK);
  EXPECT(digest != NULL && strlen(digest) == 64);
  covop_string_free(digest);

  const double bad_grid[3] = {0.0, 0.7, 0.5};
  covop_sample* bad = NULL;
  EXPECT(covop_sample_create(bad_grid, 3, values, 2, &bad) == COVOP_ERR_INVALID_INPUT);
  EXPECT(bad == NULL);
  EXPECT(strlen(covop_last_error()) > 0);
  EXPECT(covop_sample_read_csv("/nonexistent/x.csv", &bad) == COVOP_ERR_IO);
  EXPECT(covop_sample_create(grid, 3, values, 2, NULL) == COVOP_ERR_INVALID_INPUT);

  covop_sample_free(back);
  covop_sample_free(s);
  covop_sample_free(NULL);
}

static void test_two_sample(void) {
  covop_sample* x = NULL;
  covop_sample* y = NULL;
  EXPECT(covop_simulate("{\"family\":\"fiid\",\"m\":60,\"n\":60,\"grid\":21,\"seed\":4,\"a\":2.0}",
                        &x, &y) == COVOP_OK);
  EXPECT(covop_sample_count(x) == 60 && covop_sample_count(y) == 60);

  covop_two_sample_config cfg;
  covop_two_sample_config_init(&cfg);
  EXPECT(cfg.alpha == 0.05 && cfg.delta == 0.0 && cfg.replicates > 0);
  cfg.replicates = 100;
  covop_report* r = NULL;
  EXPECT(covop_two_sample_test(x, y, &cfg, &r) == COVOP_OK);
  EXPECT(covop_report_reject(r) == 1);
  EXPECT(fabs(covop_report_critical_value(r) - covop_report_quantile(r) / sqrt(120.0)) < 1e-12);
  char* json = NULL;
  EXPECT(covop_report_json(r, &json) == COVOP_OK);
  EXPECT(json != NULL && strstr(json, "\"decision\": \"REJECT\"") != NULL);
  covop_string_free(json);
  covop_report_free(r);

  cfg.delta = 100.0;
  EXPECT(covop_two_sample_test(x, y, &cfg, &r) == COVOP_OK);
  EXPECT(covop_report_reject(r) == 0);
  EXPECT(covop_report_statistic(r) > 1.0);
  covop_report_free(r);

  cfg.block_len_1 = 61;
  r = NULL;
  EXPECT(covop_two_sample_test(x, y, &cfg, &r) == COVOP_ERR_INVALID_INPUT);
  EXPECT(r == NULL);

  covop_sample_free(x);
  covop_sample_free(y);
}

static void test_change_point(void) {
  covop_sample* s = NULL;
  covop_sample* unused = NULL;
  EXPECT(covop_simulate("{\"family\":\"brownian_cp\",\"n\":40,\"grid\":21,\"seed\":2,\"k_star\":21}",
                        &s, &unused) == COVOP_OK);
  EXPECT(unused == NULL);
  covop_change_point_config cfg;
  covop_change_point_config_init(&cfg);
  EXPECT(cfg.vartheta == 0.1);
  cfg.replicates = 50;
  covop_report* r = NULL;
  EXPECT(covop_change_point_test(s, &cfg, &r) == COVOP_OK);
  EXPECT(covop_report_reject(r) == 0 || covop_report_reject(r) == 1);
  covop_report_free(r);
  cfg.vartheta = 0.9;
  EXPECT(covop_change_point_test(s, &cfg, &r) == COVOP_ERR_INVALID_INPUT);
  covop_sample_free(s);

  EXPECT(covop_simulate("{\"family\":\"fiid\",\"bogus\":1}", &s, NULL) == COVOP_ERR_INVALID_INPUT);
  EXPECT(covop_simulate("not json", &s, NULL) == COVOP_ERR_INVALID_INPUT);
}

static void test_experiment(void) {
  const char* plan =
      "{\"scenario\":{\"family\":\"fiid\",\"m\":20,\"n\":20,\"grid\":11},"
      "\"test\":{\"kind\":\"ts_classical\",\"replicates\":30},\"runs\":50}";
  covop_experiment* e = NULL;
  EXPECT(covop_experiment_run(plan, 4, 2, &e) == COVOP_OK);
  char* csv = NULL;
  EXPECT(covop_experiment_table_csv(e, &csv) == COVOP_OK);
  EXPECT(csv != NULL && strstr(csv, ",4,") != NULL);
  covop_string_free(csv);
  char* json = NULL;
  EXPECT(covop_experiment_json(e, &json) == COVOP_OK);
  EXPECT(json != NULL && strstr(json, "\"points\"") != NULL);
  covop_string_free(json);
  covop_experiment_free(e);
  EXPECT(covop_experiment_run("{}", 0, 1, &e) == COVOP_ERR_INVALID_INPUT);
}

int main(int argc, char** argv) {
  const char* dir = argc > 1 ? argv[1] : ".";
  EXPECT(strlen(covop_version()) > 0);
  EXPECT(strcmp(covop_status_string(COVOP_ERR_IO), "") != 0);
  test_samples(dir);
  test_two_sample();
  test_change_point();
  test_experiment();
  if (failures) {
    fprintf(stderr, "%d check(s) failed\n", failures);
    return 1;
  }
  printf("all C interface checks passed\n");
  return 0;
}
