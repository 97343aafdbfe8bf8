// Copyright 2026 The covop Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "bootstrap.hpp"
#include "fda.hpp"
#include "report.hpp"

namespace covop {

struct ChangePointConfig {
  double alpha = 0.05;
  double delta = 0.0; // 0 selects the classical test
  std::size_t block_len = 1;
  std::size_t replicates = 200;
  double extremal_const = 0.1; // c in c_n = c log n
  double vartheta = 0.1;       // change location is clamped to [vartheta, 1 - vartheta]
  std::uint64_t seed = 42;
  unsigned workers = 1;

  void validate() const;
};

// A field over s in [0,1] (and the grid squared) that is linear in s between
// the knots s = k/n, k = 0..n. Knots are stored as packed symmetric surfaces.
class SequentialField {
public:
  SequentialField(std::size_t n, std::size_t grid_size, std::vector<std::vector<double>> knots);

  std::size_t n() const { return n_; }
  std::size_t grid_size() const { return g_; }
  std::span<const double> packed_knot(std::size_t k) const { return knots_[k]; }
  Surface knot(std::size_t k) const;

  // Linear interpolation between the knots around s.
  Surface at(double s) const;

private:
  std::size_t n_;
  std::size_t g_;
  std::vector<std::vector<double>> knots_;
};

// floor(s n), robust to s = k/n being formed in floating point.
std::size_t floor_index(double s, std::size_t n);

// Knot k = (1/n)(sum_{j<=k} X~_j^{x2} - (k/n) sum_j X~_j^{x2}), global centring.
SequentialField sequential_field(const CurveSample& sample);

struct MhatResult {
  double value = 0.0;
  std::size_t k_argmax = 0;
  GridPair argmax;
};

// Max of |U_k(t,u)| over knots and grid; piecewise linearity makes knots enough.
MhatResult mhat(const SequentialField& field);

// (1/n) argmax_{1<=k<n} max|U_k|, smallest k on ties, clamped to [vartheta, 1-vartheta].
double estimate_change_location(const SequentialField& field, double vartheta);

// Precomputed pieces of the change-point multiplier bootstrap: the adjusted
// squares Y_j and their centred block sums D_i for i = 1..n-l.
class ChangePointBootstrap {
public:
  ChangePointBootstrap(const CurveSample& sample, double shat, std::size_t block_len);

  std::size_t n() const { return n_; }
  std::size_t block_len() const { return l_; }
  std::size_t change_index() const { return k_hat_; } // floor(shat n)

  // Segment covariance estimates (divisors = segment lengths).
  std::span<const double> before() const { return c1_; }
  std::span<const double> after() const { return c2_; }

  // W^(r) knots k = 0..n for explicit multipliers (at least n - l values).
  SequentialField field(std::span<const double> xi) const;

  // sup over knots and grid of |W^(r)|.
  double sup_statistic(std::span<const double> xi) const;

  // W^(r) at s, restricted to the packed columns given.
  std::vector<double> field_at(std::span<const double> xi, double s,
                               std::span<const std::size_t> columns) const;

private:
  std::size_t n_, g_, len_, l_, k_hat_;
  std::vector<double> c1_, c2_;
  std::vector<double> blocks_; // (n-l) x len, D_i / sqrt(n)
};

SequentialField cp_bootstrap_field(const CurveSample& sample, double shat,
                                   std::span<const double> xi, std::size_t block_len);

// Multipliers from replicate r's stream (r is 1-based).
SequentialField cp_bootstrap_field(const CurveSample& sample, double shat,
                                   const ChangePointConfig& config, std::size_t r);

struct ChangePointAnalysis {
  MhatResult m;
  double shat = 0.0;
  double statistic = 0.0; // mhat (classical) or mhat / (shat (1 - shat)) (relevant)
  std::size_t n = 0;
  std::optional<BootstrapDraws> draws;
  std::size_t plus_size = 0;
  std::size_t minus_size = 0;
  bool frozen_tail = false;

  TestReport report(const ChangePointConfig& config, const Grid& grid, double alpha) const;
  bool reject(const ChangePointConfig& config, double alpha) const;
};

ChangePointAnalysis analyze_change_point(const CurveSample& sample, const ChangePointConfig& config);

TestReport classical_cp_test(const CurveSample& sample, const ChangePointConfig& config);
TestReport relevant_cp_test(const CurveSample& sample, const ChangePointConfig& config);

} // namespace covop
