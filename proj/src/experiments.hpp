// Copyright 2026 The covop Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "change_point.hpp"
#include "simulate.hpp"
#include "two_sample.hpp"

namespace covop {

enum class TestKind { TsClassical, TsRelevant, CpClassical, CpRelevant };

const char* to_string(TestKind kind);
TestKind test_kind_from_string(const std::string& name);

struct TestSpec {
  TestKind kind = TestKind::TsClassical;
  double delta = 0.0;
  std::size_t l1 = 1;
  std::size_t l2 = 1;
  std::size_t block_len = 1;
  std::size_t replicates = 200;
  double extremal_const = 0.1;
  double vartheta = 0.1;
};

TestSpec test_spec_from_json(const nlohmann::json& j);
nlohmann::json to_json(const TestSpec& spec);

// A reference rejection rate, in percent, for one sweep point and level.
struct ReferenceValue {
  std::size_t point = 0;
  double alpha = 0.05;
  double percent = 0.0;
};

// Sweep entries are partial overrides. Keys naming test parameters
// (kind, delta, l1, l2, block_len, replicates, extremal_const, vartheta) go
// to the test, "label" names the point, everything else goes to the scenario.
struct ExperimentPlan {
  std::string name = "experiment";
  nlohmann::json scenario = nlohmann::json::object();
  nlohmann::json test = nlohmann::json::object();
  std::vector<nlohmann::json> sweep;
  std::size_t runs = 500;
  std::vector<double> alphas{0.05};
  std::uint64_t base_seed = 1;
  std::vector<ReferenceValue> reference;
  bool power_curve = false;

  void validate() const;
};

// Missing "sweep" with power_curve = true selects a in sqrt(1.6), sqrt(1.7), ..., sqrt(3.8).
ExperimentPlan plan_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ExperimentPlan& plan);

std::vector<nlohmann::json> default_power_sweep();

struct CellResult {
  double alpha = 0.05;
  std::size_t rejections = 0;
  std::size_t runs = 0;
  double frequency = 0.0;
  double standard_error = 0.0;
  std::optional<double> reference_percent;
  std::optional<double> diff_over_se; // |frequency - reference| / SE
};

struct PointResult {
  std::size_t index = 0;
  std::string label;
  nlohmann::json overrides;
  nlohmann::json scenario;
  nlohmann::json test;
  nlohmann::json population = nlohmann::json::object(); // closed-form facts, if any
  std::vector<CellResult> cells; // empty when the point failed
  std::optional<std::string> failure;
  double runtime_seconds = 0.0;
};

struct ExperimentResult {
  ExperimentPlan plan;
  std::vector<PointResult> points;
  double runtime_seconds = 0.0;
};

struct RunSeeds {
  std::uint64_t data;
  std::uint64_t bootstrap;
};

// Seeds of run `run` (0-based). They do not depend on the sweep point, so
// every point sees the same underlying random numbers.
RunSeeds run_seeds(std::uint64_t base_seed, std::size_t run);

// Rejection flags, one per alpha, for a single Monte Carlo run.
std::vector<bool> single_run(const ScenarioSpec& scenario, const TestSpec& test,
                             const std::vector<double>& alphas, const RunSeeds& seeds);

ExperimentResult run_experiment(const ExperimentPlan& plan, unsigned workers);

nlohmann::json to_json(const ExperimentResult& result);

// Rejection table; contains no timing, so it is identical across worker counts.
std::string result_table_csv(const ExperimentResult& result);

// a, alpha, frequency, se for every successful point, in sweep order.
std::string power_curve_csv(const ExperimentResult& result);

} // namespace covop
