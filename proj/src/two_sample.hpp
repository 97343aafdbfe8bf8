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

struct TwoSampleConfig {
  double alpha = 0.05;
  double delta = 0.0; // 0 selects the classical test
  std::size_t block_len_1 = 1;
  std::size_t block_len_2 = 1;
  std::size_t replicates = 200;
  double extremal_const = 0.1; // c in c_{m,n} = c log(m+n)
  std::uint64_t seed = 42;
  unsigned workers = 1;

  void validate() const;
};

struct ExtremalSets {
  std::vector<GridPair> plus;
  std::vector<GridPair> minus;
};

struct TwoSampleDistance {
  double value = 0.0;
  GridPair argmax;
  Surface diff; // C1_hat - C2_hat, both with divisor n-1
};

TwoSampleDistance dhat_two_sample(const CurveSample& x, const CurveSample& y);

// Bootstrap field of one replicate built literally from block sums of the
// squared centred curves. `xi` has m-l1+1 entries, `zeta` n-l2+1.
Surface bootstrap_field_two_sample(std::span<const Surface> x_squares,
                                   std::span<const Surface> y_squares,
                                   std::span<const double> xi, std::span<const double> zeta,
                                   std::size_t block_len_1, std::size_t block_len_2);

// Same, with multipliers drawn from replicate r's streams (r is 1-based).
Surface bootstrap_field_two_sample(std::span<const Surface> x_squares,
                                   std::span<const Surface> y_squares,
                                   const TwoSampleConfig& config, std::size_t r);

// Points where +-(diff) >= dhat - c log(m+n)/sqrt(m+n), full grid, row-major.
ExtremalSets estimate_extremal_sets(const Surface& diff, double dhat, std::size_t m,
                                    std::size_t n, double c);

// Per-curve weights w_j such that
//   (1/n) sum_k blocksum_k * mult_k == sum_j w_j S_j.
std::vector<double> block_multiplier_weights(std::span<const double> multipliers,
                                             std::size_t n, std::size_t block_len);

// Fast multiplier bootstrap over packed squared curves. Each replicate field
// is evaluated as a weighted sum of the m + n rank-one squares.
class TwoSampleBootstrap {
public:
  TwoSampleBootstrap(const CurveSample& x, const CurveSample& y, std::size_t block_len_1,
                     std::size_t block_len_2);

  std::size_t grid_size() const { return g_; }

  // Packed upper triangle of B^(r) for explicit multipliers.
  std::vector<double> field(std::span<const double> xi, std::span<const double> zeta) const;

  // sup |B^(r)| for replicates first..first+count-1 (1-based).
  void sup_statistics(std::uint64_t seed, std::size_t first, std::size_t count,
                      std::span<double> out) const;

  // Engine over the listed packed columns only; fields then have
  // columns.size() entries in the given order.
  TwoSampleBootstrap restricted(std::span<const std::size_t> columns) const;

  // max{ max_{E+} B^(r), max_{E-} -B^(r) } with E+- as packed index sets.
  double extremal_statistic(std::span<const double> xi, std::span<const double> zeta,
                            std::span<const std::size_t> plus,
                            std::span<const std::size_t> minus) const;

  std::pair<std::vector<double>, std::vector<double>> multipliers(std::uint64_t seed,
                                                                  std::size_t r) const;

private:
  TwoSampleBootstrap() = default;

  std::size_t m_ = 0, n_ = 0, g_ = 0, len_ = 0;
  std::size_t l1_ = 1, l2_ = 1;
  std::vector<double> x_squares_; // m x len
  std::vector<double> y_squares_; // n x len
};

// Everything a test needs except alpha: the statistic and the bootstrap
// draws. Decisions at several levels reuse the same draws.
struct TwoSampleAnalysis {
  TwoSampleDistance distance;
  std::size_t m = 0;
  std::size_t n = 0;
  std::optional<BootstrapDraws> draws;
  std::size_t plus_size = 0;
  std::size_t minus_size = 0;
  std::vector<std::string> warnings;

  TestReport report(const TwoSampleConfig& config, const Grid& grid, double alpha) const;
  bool reject(const TwoSampleConfig& config, double alpha) const;
};

// True when y precedes x in the canonical order (fewer curves first, then
// lexicographic values). The first multiplier stream goes to the earlier
// sample, which makes the draws symmetric in (x, y).
bool canonically_swapped(const CurveSample& x, const CurveSample& y);

// delta == 0 draws T^(r) = sup|B^(r)|, delta > 0 draws K^(r).
TwoSampleAnalysis analyze_two_sample(const CurveSample& x, const CurveSample& y,
                                     const TwoSampleConfig& config);

TestReport classical_two_sample_test(const CurveSample& x, const CurveSample& y,
                                     const TwoSampleConfig& config);

TestReport relevant_two_sample_test(const CurveSample& x, const CurveSample& y,
                                    const TwoSampleConfig& config);

} // namespace covop
