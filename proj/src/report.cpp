// Copyright 2026 The covop Authors.
// SPDX-License-Identifier: Apache-2.0

#include "report.hpp"

namespace covop {

void finalize_decision(TestReport& report) {
  report.critical_value = report.delta + report.quantile / report.scale;
  report.reject = report.statistic > report.critical_value;
}

nlohmann::json to_json(const TestReport& report) {
  nlohmann::json j;
  j["schema"] = 1;
  j["test"] = report.test;
  j["decision"] = decision_label(report.reject);
  j["reject"] = report.reject;
  j["statistic"] = report.statistic;
  j["quantile"] = report.quantile;
  j["scale"] = report.scale;
  j["critical_value"] = report.critical_value;
  j["alpha"] = report.alpha;
  j["delta"] = report.delta;
  j["replicates"] = report.replicates;
  j["block_lengths"] = report.block_lengths;
  j["sample_sizes"] = report.sample_sizes;
  j["seed"] = report.seed;
  j["argmax"] = {{"row", report.argmax.row},
                 {"col", report.argmax.col},
                 {"location", report.argmax_location}};
  if (report.extremal_plus_size || report.extremal_minus_size) {
    j["extremal_const"] = report.extremal_const;
    j["extremal_sets"] = {{"plus", report.extremal_plus_size.value_or(0)},
                          {"minus", report.extremal_minus_size.value_or(0)}};
  }
  if (report.mhat) {
    j["mhat"] = *report.mhat;
  }
  if (report.change_location) {
    j["change_location"] = *report.change_location;
  }
  if (report.k_argmax) {
    j["k_argmax"] = *report.k_argmax;
  }
  if (report.vartheta) {
    j["vartheta"] = *report.vartheta;
    j["frozen_tail"] = report.frozen_tail;
  }
  j["warnings"] = report.warnings;
  return j;
}

} // namespace covop
