// Copyright 2026 The covop Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <random>
#include <vector>

#include "fda.hpp"
#include "oracles.hpp"

namespace testing {

inline covop::CurveSample random_sample(std::size_t n, std::size_t g, std::uint64_t seed,
                                        double scale = 1.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, scale);
  std::vector<double> values(n * g);
  for (double& v : values) {
    v = normal(rng);
  }
  return covop::CurveSample(covop::Grid::equidistant(g), std::move(values));
}

inline oracle::Curves to_curves(const covop::CurveSample& s) {
  oracle::Curves out;
  for (std::size_t j = 0; j < s.count(); ++j) {
    auto c = s.curve(j);
    out.emplace_back(c.begin(), c.end());
  }
  return out;
}

inline std::vector<covop::Surface> to_surfaces(const oracle::Fields& fields) {
  std::vector<covop::Surface> out;
  for (const auto& f : fields) {
    const std::size_t g = f.size();
    covop::Surface s(g);
    for (std::size_t i = 0; i < g; ++i) {
      for (std::size_t k = 0; k < g; ++k) {
        s(i, k) = f[i][k];
      }
    }
    out.push_back(s);
  }
  return out;
}

inline double max_abs_diff(const covop::Surface& s, const oracle::Field& f) {
  double m = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    for (std::size_t k = 0; k < f.size(); ++k) {
      m = std::max(m, std::abs(s(i, k) - f[i][k]));
    }
  }
  return m;
}

inline std::vector<double> normals(std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::vector<double> v(count);
  for (double& x : v) {
    x = normal(rng);
  }
  return v;
}

} // namespace testing
