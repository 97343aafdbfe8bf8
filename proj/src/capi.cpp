// Copyright 2026 The covop Authors.
// SPDX-License-Identifier: Apache-2.0

#include "covop/covop.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

#include "change_point.hpp"
#include "csv_io.hpp"
#include "digest.hpp"
#include "errors.hpp"
#include "experiments.hpp"
#include "simulate.hpp"
#include "two_sample.hpp"

struct covop_sample {
  covop::CurveSample sample;
};

struct covop_report {
  covop::TestReport report;
};

struct covop_experiment {
  covop::ExperimentResult result;
};

namespace {

thread_local std::string last_error;

template <class Fn>
covop_status guarded(Fn&& fn) {
  try {
    fn();
    last_error.clear();
    return COVOP_OK;
  } catch (const covop::InvalidInput& e) {
    last_error = e.what();
    return COVOP_ERR_INVALID_INPUT;
  } catch (const covop::IoError& e) {
    last_error = e.what();
    return COVOP_ERR_IO;
  } catch (const covop::ConfigError& e) {
    last_error = e.what();
    return COVOP_ERR_CONFIG;
  } catch (const nlohmann::json::exception& e) {
    last_error = std::string("malformed JSON: ") + e.what();
    return COVOP_ERR_INVALID_INPUT;
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return COVOP_ERR_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return COVOP_ERR_INTERNAL;
  } catch (...) {
    last_error = "unknown error";
    return COVOP_ERR_INTERNAL;
  }
}

void require(bool ok, const char* message) {
  if (!ok) {
    throw covop::InvalidInput(message);
  }
}

char* copy_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) {
    throw std::bad_alloc();
  }
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

nlohmann::json parse_json(const char* text) {
  require(text != nullptr, "JSON text is NULL");
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw covop::InvalidInput(std::string("JSON parse error: ") + e.what());
  }
}

} // namespace

extern "C" {

const char* covop_version(void) { return COVOP_VERSION; }

const char* covop_last_error(void) { return last_error.c_str(); }

const char* covop_status_string(covop_status status) {
  switch (status) {
  case COVOP_OK:
    return "ok";
  case COVOP_ERR_INVALID_INPUT:
    return "invalid input";
  case COVOP_ERR_IO:
    return "I/O error";
  case COVOP_ERR_CONFIG:
    return "configuration error";
  case COVOP_ERR_INTERNAL:
    return "internal error";
  }
  return "unknown status";
}

void covop_string_free(char* s) { std::free(s); }

covop_status covop_sample_create(const double* grid, size_t grid_size, const double* values,
                                 size_t count, covop_sample** out) {
  return guarded([&] {
    require(out != nullptr, "output pointer is NULL");
    *out = nullptr;
    require(grid != nullptr && values != nullptr, "grid or values is NULL");
    covop::Grid g(std::vector<double>(grid, grid + grid_size));
    covop::CurveSample s(std::move(g), std::vector<double>(values, values + grid_size * count));
    *out = new covop_sample{std::move(s)};
  });
}

covop_status covop_sample_read_csv(const char* path, covop_sample** out) {
  return guarded([&] {
    require(out != nullptr, "output pointer is NULL");
    *out = nullptr;
    require(path != nullptr, "path is NULL");
    *out = new covop_sample{covop::read_curves_csv_file(path)};
  });
}

covop_status covop_sample_write_csv(const covop_sample* sample, const char* path) {
  return guarded([&] {
    require(sample != nullptr && path != nullptr, "sample or path is NULL");
    covop::write_curves_csv_file(path, sample->sample);
  });
}

size_t covop_sample_count(const covop_sample* sample) {
  return sample ? sample->sample.count() : 0;
}

size_t covop_sample_grid_size(const covop_sample* sample) {
  return sample ? sample->sample.grid_size() : 0;
}

const double* covop_sample_grid(const covop_sample* sample) {
  return sample ? sample->sample.grid().points().data() : nullptr;
}

const double* covop_sample_values(const covop_sample* sample) {
  return sample ? sample->sample.values().data() : nullptr;
}

void covop_sample_free(covop_sample* sample) { delete sample; }

covop_status covop_simulate(const char* scenario_json, covop_sample** first,
                            covop_sample** second) {
  return guarded([&] {
    require(first != nullptr, "output pointer is NULL");
    *first = nullptr;
    if (second) {
      *second = nullptr;
    }
    const auto spec = covop::scenario_from_json(parse_json(scenario_json));
    if (spec.design == covop::Design::TwoSample) {
      require(second != nullptr, "two-sample designs need a second output");
      auto [x, y] = covop::simulate_two_sample(spec);
      auto* a = new covop_sample{std::move(x)};
      try {
        *second = new covop_sample{std::move(y)};
      } catch (...) {
        delete a;
        throw;
      }
      *first = a;
    } else {
      *first = new covop_sample{covop::simulate_series(spec)};
    }
  });
}

void covop_two_sample_config_init(covop_two_sample_config* config) {
  if (!config) {
    return;
  }
  const covop::TwoSampleConfig d;
  config->alpha = d.alpha;
  config->delta = d.delta;
  config->block_len_1 = d.block_len_1;
  config->block_len_2 = d.block_len_2;
  config->replicates = d.replicates;
  config->extremal_const = d.extremal_const;
  config->seed = d.seed;
  config->workers = d.workers;
}

covop_status covop_two_sample_test(const covop_sample* x, const covop_sample* y,
                                   const covop_two_sample_config* config, covop_report** out) {
  return guarded([&] {
    require(out != nullptr, "output pointer is NULL");
    *out = nullptr;
    require(x != nullptr && y != nullptr && config != nullptr, "NULL argument");
    covop::TwoSampleConfig c;
    c.alpha = config->alpha;
    c.delta = config->delta;
    c.block_len_1 = config->block_len_1;
    c.block_len_2 = config->block_len_2;
    c.replicates = config->replicates;
    c.extremal_const = config->extremal_const;
    c.seed = config->seed;
    c.workers = config->workers;
    auto report = c.delta > 0.0 ? covop::relevant_two_sample_test(x->sample, y->sample, c)
                                : covop::classical_two_sample_test(x->sample, y->sample, c);
    *out = new covop_report{std::move(report)};
  });
}

void covop_change_point_config_init(covop_change_point_config* config) {
  if (!config) {
    return;
  }
  const covop::ChangePointConfig d;
  config->alpha = d.alpha;
  config->delta = d.delta;
  config->block_len = d.block_len;
  config->replicates = d.replicates;
  config->extremal_const = d.extremal_const;
  config->vartheta = d.vartheta;
  config->seed = d.seed;
  config->workers = d.workers;
}

covop_status covop_change_point_test(const covop_sample* series,
                                     const covop_change_point_config* config,
                                     covop_report** out) {
  return guarded([&] {
    require(out != nullptr, "output pointer is NULL");
    *out = nullptr;
    require(series != nullptr && config != nullptr, "NULL argument");
    covop::ChangePointConfig c;
    c.alpha = config->alpha;
    c.delta = config->delta;
    c.block_len = config->block_len;
    c.replicates = config->replicates;
    c.extremal_const = config->extremal_const;
    c.vartheta = config->vartheta;
    c.seed = config->seed;
    c.workers = config->workers;
    auto report = c.delta > 0.0 ? covop::relevant_cp_test(series->sample, c)
                                : covop::classical_cp_test(series->sample, c);
    *out = new covop_report{std::move(report)};
  });
}

int covop_report_reject(const covop_report* report) {
  return report && report->report.reject ? 1 : 0;
}

double covop_report_statistic(const covop_report* report) {
  return report ? report->report.statistic : 0.0;
}

double covop_report_quantile(const covop_report* report) {
  return report ? report->report.quantile : 0.0;
}

double covop_report_critical_value(const covop_report* report) {
  return report ? report->report.critical_value : 0.0;
}

covop_status covop_report_json(const covop_report* report, char** out) {
  return guarded([&] {
    require(report != nullptr && out != nullptr, "NULL argument");
    *out = copy_string(covop::to_json(report->report).dump(2));
  });
}

void covop_report_free(covop_report* report) { delete report; }

covop_status covop_experiment_run(const char* plan_json, size_t runs_override, unsigned workers,
                                  covop_experiment** out) {
  return guarded([&] {
    require(out != nullptr, "output pointer is NULL");
    *out = nullptr;
    auto plan = covop::plan_from_json(parse_json(plan_json));
    if (runs_override > 0) {
      plan.runs = runs_override;
    }
    *out = new covop_experiment{covop::run_experiment(plan, workers == 0 ? 1 : workers)};
  });
}

covop_status covop_experiment_json(const covop_experiment* experiment, char** out) {
  return guarded([&] {
    require(experiment != nullptr && out != nullptr, "NULL argument");
    *out = copy_string(covop::to_json(experiment->result).dump(2));
  });
}

covop_status covop_experiment_table_csv(const covop_experiment* experiment, char** out) {
  return guarded([&] {
    require(experiment != nullptr && out != nullptr, "NULL argument");
    *out = copy_string(covop::result_table_csv(experiment->result));
  });
}

covop_status covop_experiment_power_curve_csv(const covop_experiment* experiment, char** out) {
  return guarded([&] {
    require(experiment != nullptr && out != nullptr, "NULL argument");
    *out = copy_string(covop::power_curve_csv(experiment->result));
  });
}

void covop_experiment_free(covop_experiment* experiment) { delete experiment; }

covop_status covop_file_digest(const char* path, char** out) {
  return guarded([&] {
    require(path != nullptr && out != nullptr, "NULL argument");
    *out = copy_string(covop::sha256_file(path));
  });
}

} // extern "C"
