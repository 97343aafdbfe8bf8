// Copyright 2026 The covop Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "fda.hpp"

namespace covop {

enum class Family { SinCosT5, Fiid, NonGaussT5, Fma, Far1, BrownianCp };
enum class CoeffDist { Gaussian, T5Scaled };
enum class Far1Setting { S1 = 1, S2 = 2, S3 = 3 };

// Two independent samples (X, Y) or one time series with a possible change.
enum class Design { TwoSample, Series };

struct ScenarioSpec {
  Family family = Family::Fiid;
  Design design = Design::TwoSample;
  std::size_t m = 50; // first sample size (two-sample)
  std::size_t n = 50; // second sample size, or series length
  std::size_t grid = 101;
  std::uint64_t seed = 0;

  double c = 1.0;       // sin/cos model: Y = c * (independent copy)
  double a = 1.0;       // B-spline families: second sample / post-change factor
  double s_star = 0.5;  // series: curves j > floor(s* n) are scaled by a
  double kappa1 = 0.0;
  double kappa2 = 0.0;
  CoeffDist coeff_dist = CoeffDist::Gaussian; // fma only; nongauss_t5 forces t5
  Far1Setting setting = Far1Setting::S1;
  std::size_t m_changed = 0;
  double d1 = 0.0;
  double d2 = 0.0;
  std::size_t k_star = 51;

  void validate() const;
};

struct PopulationFacts {
  std::optional<double> sup_norm_distance;
  std::optional<std::string> extremal_plus;
  std::optional<std::string> extremal_minus;
};

// Only for families with a closed-form sup distance.
PopulationFacts population_facts(const ScenarioSpec& spec);

inline constexpr std::size_t kBSplineCount = 21;
inline constexpr std::size_t kBSplineOrder = 4;
inline constexpr std::size_t kFourierCount = 55;
inline constexpr std::size_t kFar1BurnIn = 200;

// Order-4 B-splines on equidistant knots over [0,1], rows = basis functions,
// columns = grid points.
std::vector<double> bspline_basis(const Grid& grid, std::size_t count = kBSplineCount,
                                  std::size_t order = kBSplineOrder);

// 1, sqrt2 sin(2 pi t), sqrt2 cos(2 pi t), sqrt2 sin(4 pi t), ... (count rows).
std::vector<double> fourier_basis(const Grid& grid, std::size_t count = kFourierCount);

std::pair<CurveSample, CurveSample> gen_sincos_t5(std::size_t m, std::size_t n, double c,
                                                  std::size_t grid, std::uint64_t seed);

CurveSample gen_bspline_errors(std::size_t count, std::size_t grid, std::uint64_t seed,
                               CoeffDist dist);

// X_i = e_i + k1 e_{i-1} + k2 e_{i-2}, with e_{-1}, e_0 independent copies.
CurveSample gen_fma(std::size_t count, double kappa1, double kappa2, std::size_t grid,
                    std::uint64_t seed, CoeffDist dist);

CurveSample gen_far1(std::size_t n, Far1Setting setting, std::size_t m_changed, std::size_t grid,
                     std::uint64_t seed);

CurveSample gen_brownian_cp(std::size_t n, std::size_t k_star, double d1, double d2,
                            std::size_t grid, std::uint64_t seed);

// Curves j > floor(s* n) (1-based) multiplied by a.
CurveSample inject_scale_change(const CurveSample& sample, double a, double s_star);

std::pair<CurveSample, CurveSample> simulate_two_sample(const ScenarioSpec& spec);
CurveSample simulate_series(const ScenarioSpec& spec);

const char* to_string(Family family);
Family family_from_string(const std::string& name);

// Unknown keys are errors. The descriptive keys written by to_json ("basis",
// "burn_in") are accepted and ignored.
ScenarioSpec scenario_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ScenarioSpec& spec);

// Empty object when no closed form is known.
nlohmann::json to_json(const PopulationFacts& facts);

} // namespace covop
