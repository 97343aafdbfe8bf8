// Copyright 2026 The covop Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fda.hpp"

namespace covop {

// Outcome of one hypothesis test. The decision always satisfies
//   reject == (statistic > delta + quantile / scale)
// where scale is sqrt(m+n) for two-sample tests and sqrt(n) for change-point
// tests.
struct TestReport {
  std::string test; // "two-sample/classical", "change-point/relevant", ...
  double statistic = 0.0;
  double quantile = 0.0;
  double scale = 1.0;
  double critical_value = 0.0;
  bool reject = false;

  double alpha = 0.05;
  double delta = 0.0;
  std::size_t replicates = 0;
  std::vector<std::size_t> block_lengths;
  std::vector<std::size_t> sample_sizes;
  double extremal_const = 0.0;
  std::uint64_t seed = 0;

  GridPair argmax;
  std::vector<double> argmax_location; // grid coordinates of argmax
  std::optional<std::size_t> extremal_plus_size;
  std::optional<std::size_t> extremal_minus_size;

  // change-point only
  std::optional<double> mhat;
  std::optional<double> change_location;
  std::optional<std::size_t> k_argmax;
  std::optional<double> vartheta;
  bool frozen_tail = false;

  std::vector<std::string> warnings;
};

// Fills critical_value and reject from the other fields.
void finalize_decision(TestReport& report);

nlohmann::json to_json(const TestReport& report);

inline const char* decision_label(bool reject) { return reject ? "REJECT" : "FAIL-TO-REJECT"; }

} // namespace covop
