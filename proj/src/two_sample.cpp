// Copyright 2026 The covop Authors.
// SPDX-License-Identifier: Apache-2.0

#include "two_sample.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "errors.hpp"

namespace covop {

namespace {

constexpr std::size_t kReplicateChunk = 8;

void require_same_grid(const CurveSample& x, const CurveSample& y) {
  if (!(x.grid() == y.grid())) {
    throw InvalidInput("samples live on different grids");
  }
}

void check_block_len(std::size_t l, std::size_t n, const char* which) {
  if (l < 1 || l > n) {
    throw InvalidInput(std::string(which) + " block length " + std::to_string(l) +
                       " outside [1, " + std::to_string(n) + "]");
  }
}

double max_abs(const double* v, std::size_t len) {
  double best = 0.0;
#pragma omp simd reduction(max : best)
  for (std::size_t p = 0; p < len; ++p) {
    const double a = std::fabs(v[p]);
    best = a > best ? a : best;
  }
  return best;
}

} // namespace

void TwoSampleConfig::validate() const {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw InvalidInput("alpha must lie in (0,1)");
  }
  if (!(delta >= 0.0) || !std::isfinite(delta)) {
    throw InvalidInput("delta must be a finite number >= 0");
  }
  if (block_len_1 < 1 || block_len_2 < 1) {
    throw InvalidInput("block lengths must be >= 1");
  }
  if (replicates < 1) {
    throw InvalidInput("need at least one bootstrap replicate");
  }
  if (!(extremal_const > 0.0)) {
    throw InvalidInput("extremal-set constant c must be > 0");
  }
}

TwoSampleDistance dhat_two_sample(const CurveSample& x, const CurveSample& y) {
  require_same_grid(x, y);
  const Surface c1 = empirical_covariance(x, Divisor::NMinus1);
  const Surface c2 = empirical_covariance(y, Divisor::NMinus1);
  const SupNorm sup = sup_norm_diff(c1, c2);
  Surface diff(c1.grid_size());
  auto d = diff.values();
  auto a = c1.values();
  auto b = c2.values();
  for (std::size_t p = 0; p < d.size(); ++p) {
    d[p] = a[p] - b[p];
  }
  return {sup.value, sup.argmax, std::move(diff)};
}

Surface bootstrap_field_two_sample(std::span<const Surface> x_squares,
                                   std::span<const Surface> y_squares,
                                   std::span<const double> xi, std::span<const double> zeta,
                                   std::size_t block_len_1, std::size_t block_len_2) {
  const std::size_t m = x_squares.size();
  const std::size_t n = y_squares.size();
  check_block_len(block_len_1, m, "first-sample");
  check_block_len(block_len_2, n, "second-sample");
  if (xi.size() != m - block_len_1 + 1 || zeta.size() != n - block_len_2 + 1) {
    throw InvalidInput("multiplier count does not match the number of blocks");
  }
  const auto bx = block_sums(x_squares, block_len_1);
  const auto by = block_sums(y_squares, block_len_2);
  const std::size_t g = x_squares.front().grid_size();
  if (y_squares.front().grid_size() != g) {
    throw InvalidInput("samples live on different grids");
  }
  Surface out(g);
  auto o = out.values();
  const double root = std::sqrt(static_cast<double>(m + n));
  for (std::size_t k = 0; k < bx.size(); ++k) {
    auto v = bx[k].values();
    for (std::size_t p = 0; p < o.size(); ++p) {
      o[p] += root * v[p] * xi[k] / static_cast<double>(m);
    }
  }
  for (std::size_t k = 0; k < by.size(); ++k) {
    auto v = by[k].values();
    for (std::size_t p = 0; p < o.size(); ++p) {
      o[p] -= root * v[p] * zeta[k] / static_cast<double>(n);
    }
  }
  return out;
}

Surface bootstrap_field_two_sample(std::span<const Surface> x_squares,
                                   std::span<const Surface> y_squares,
                                   const TwoSampleConfig& config, std::size_t r) {
  const std::size_t m = x_squares.size();
  const std::size_t n = y_squares.size();
  check_block_len(config.block_len_1, m, "first-sample");
  check_block_len(config.block_len_2, n, "second-sample");
  const auto xi =
      gaussian_multipliers({config.seed, r, MultiplierTag::First}, m - config.block_len_1 + 1);
  const auto zeta =
      gaussian_multipliers({config.seed, r, MultiplierTag::Second}, n - config.block_len_2 + 1);
  return bootstrap_field_two_sample(x_squares, y_squares, xi, zeta, config.block_len_1,
                                    config.block_len_2);
}

ExtremalSets estimate_extremal_sets(const Surface& diff, double dhat, std::size_t m,
                                    std::size_t n, double c) {
  const double total = static_cast<double>(m + n);
  const double threshold = dhat - c * std::log(total) / std::sqrt(total);
  ExtremalSets sets;
  const std::size_t g = diff.grid_size();
  for (std::size_t i = 0; i < g; ++i) {
    for (std::size_t k = 0; k < g; ++k) {
      if (diff(i, k) >= threshold) {
        sets.plus.push_back({i, k});
      }
      if (-diff(i, k) >= threshold) {
        sets.minus.push_back({i, k});
      }
    }
  }
  return sets;
}

std::vector<double> block_multiplier_weights(std::span<const double> multipliers, std::size_t n,
                                             std::size_t block_len) {
  check_block_len(block_len, n, "sample");
  const std::size_t blocks = n - block_len + 1;
  if (multipliers.size() != blocks) {
    throw InvalidInput("multiplier count does not match the number of blocks");
  }
  std::vector<double> prefix(blocks + 1, 0.0);
  for (std::size_t k = 0; k < blocks; ++k) {
    prefix[k + 1] = prefix[k] + multipliers[k];
  }
  const double l = static_cast<double>(block_len);
  const double nn = static_cast<double>(n);
  const double centre = (l / nn) * prefix[blocks];
  const double scale = 1.0 / (nn * std::sqrt(l));
  std::vector<double> w(n);
  for (std::size_t j = 0; j < n; ++j) {
    // blocks k (0-based) containing j: max(0, j-l+1) <= k <= min(j, n-l)
    const std::size_t lo = j + 1 >= block_len ? j + 1 - block_len : 0;
    const std::size_t hi = std::min(j, blocks - 1);
    w[j] = scale * ((prefix[hi + 1] - prefix[lo]) - centre);
  }
  return w;
}

TwoSampleBootstrap::TwoSampleBootstrap(const CurveSample& x, const CurveSample& y,
                                       std::size_t block_len_1, std::size_t block_len_2)
    : m_(x.count()), n_(y.count()), g_(x.grid_size()), len_(packed::length(x.grid_size())),
      l1_(block_len_1), l2_(block_len_2) {
  require_same_grid(x, y);
  check_block_len(l1_, m_, "first-sample");
  check_block_len(l2_, n_, "second-sample");
  x_squares_ = packed::outer_squares(center_sample(x));
  y_squares_ = packed::outer_squares(center_sample(y));
}

std::pair<std::vector<double>, std::vector<double>>
TwoSampleBootstrap::multipliers(std::uint64_t seed, std::size_t r) const {
  return {gaussian_multipliers({seed, r, MultiplierTag::First}, m_ - l1_ + 1),
          gaussian_multipliers({seed, r, MultiplierTag::Second}, n_ - l2_ + 1)};
}

std::vector<double> TwoSampleBootstrap::field(std::span<const double> xi,
                                              std::span<const double> zeta) const {
  const auto wx = block_multiplier_weights(xi, m_, l1_);
  const auto wy = block_multiplier_weights(zeta, n_, l2_);
  const double root = std::sqrt(static_cast<double>(m_ + n_));
  std::vector<double> out(len_, 0.0);
  for (std::size_t j = 0; j < m_; ++j) {
    const double w = root * wx[j];
    const double* s = x_squares_.data() + j * len_;
    for (std::size_t p = 0; p < len_; ++p) {
      out[p] += w * s[p];
    }
  }
  for (std::size_t j = 0; j < n_; ++j) {
    const double w = root * wy[j];
    const double* s = y_squares_.data() + j * len_;
    for (std::size_t p = 0; p < len_; ++p) {
      out[p] -= w * s[p];
    }
  }
  return out;
}

void TwoSampleBootstrap::sup_statistics(std::uint64_t seed, std::size_t first, std::size_t count,
                                        std::span<double> out) const {
  const double root = std::sqrt(static_cast<double>(m_ + n_));
  std::vector<std::vector<double>> wx(count), wy(count);
  for (std::size_t c = 0; c < count; ++c) {
    auto [xi, zeta] = multipliers(seed, first + c);
    wx[c] = block_multiplier_weights(xi, m_, l1_);
    wy[c] = block_multiplier_weights(zeta, n_, l2_);
    for (double& w : wx[c]) {
      w *= root;
    }
    for (double& w : wy[c]) {
      w *= -root;
    }
  }
  std::vector<double> fields(count * len_, 0.0);
  auto accumulate = [&](const std::vector<double>& squares, std::size_t rows,
                        const std::vector<std::vector<double>>& weights) {
    for (std::size_t j = 0; j < rows; ++j) {
      const double* s = squares.data() + j * len_;
      for (std::size_t c = 0; c < count; ++c) {
        const double w = weights[c][j];
        double* f = fields.data() + c * len_;
#pragma omp simd
        for (std::size_t p = 0; p < len_; ++p) {
          f[p] += w * s[p];
        }
      }
    }
  };
  accumulate(x_squares_, m_, wx);
  accumulate(y_squares_, n_, wy);
  for (std::size_t c = 0; c < count; ++c) {
    out[c] = max_abs(fields.data() + c * len_, len_);
  }
}

TwoSampleBootstrap TwoSampleBootstrap::restricted(std::span<const std::size_t> columns) const {
  TwoSampleBootstrap out;
  out.m_ = m_;
  out.n_ = n_;
  out.g_ = g_;
  out.len_ = columns.size();
  out.l1_ = l1_;
  out.l2_ = l2_;
  auto pick = [&](const std::vector<double>& squares, std::size_t rows) {
    std::vector<double> sub(rows * columns.size());
    for (std::size_t j = 0; j < rows; ++j) {
      for (std::size_t c = 0; c < columns.size(); ++c) {
        sub[j * columns.size() + c] = squares[j * len_ + columns[c]];
      }
    }
    return sub;
  };
  out.x_squares_ = pick(x_squares_, m_);
  out.y_squares_ = pick(y_squares_, n_);
  return out;
}

double TwoSampleBootstrap::extremal_statistic(std::span<const double> xi,
                                              std::span<const double> zeta,
                                              std::span<const std::size_t> plus,
                                              std::span<const std::size_t> minus) const {
  if (plus.empty() && minus.empty()) {
    throw ConfigError("both extremal sets are empty; the relevant bootstrap statistic is undefined");
  }
  const auto b = field(xi, zeta);
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t p : plus) {
    best = std::max(best, b[p]);
  }
  for (std::size_t p : minus) {
    best = std::max(best, -b[p]);
  }
  return best;
}

TestReport TwoSampleAnalysis::report(const TwoSampleConfig& config, const Grid& grid,
                                     double alpha) const {
  TestReport r;
  r.test = config.delta > 0.0 ? "two-sample/relevant" : "two-sample/classical";
  r.statistic = distance.value;
  r.quantile = draws->quantile(alpha);
  r.scale = std::sqrt(static_cast<double>(m + n));
  r.alpha = alpha;
  r.delta = config.delta;
  r.replicates = config.replicates;
  r.block_lengths = {config.block_len_1, config.block_len_2};
  r.sample_sizes = {m, n};
  r.extremal_const = config.extremal_const;
  r.seed = config.seed;
  r.argmax = distance.argmax;
  r.argmax_location = {grid[distance.argmax.row], grid[distance.argmax.col]};
  if (config.delta > 0.0) {
    r.extremal_plus_size = plus_size;
    r.extremal_minus_size = minus_size;
  }
  r.warnings = warnings;
  finalize_decision(r);
  return r;
}

bool TwoSampleAnalysis::reject(const TwoSampleConfig& config, double alpha) const {
  const double scale = std::sqrt(static_cast<double>(m + n));
  return distance.value > config.delta + draws->quantile(alpha) / scale;
}

bool canonically_swapped(const CurveSample& x, const CurveSample& y) {
  if (x.count() != y.count()) {
    return y.count() < x.count();
  }
  return std::lexicographical_compare(y.values().begin(), y.values().end(), x.values().begin(),
                                      x.values().end());
}

TwoSampleAnalysis analyze_two_sample(const CurveSample& x, const CurveSample& y,
                                     const TwoSampleConfig& config) {
  config.validate();
  require_same_grid(x, y);
  TwoSampleAnalysis out{dhat_two_sample(x, y), x.count(), y.count(), std::nullopt, 0, 0, {}};
  const double balance =
      static_cast<double>(std::min(out.m, out.n)) / static_cast<double>(out.m + out.n);
  if (balance < 0.1) {
    out.warnings.push_back("unbalanced samples: min(m,n)/(m+n) = " + std::to_string(balance) +
                           " < 0.1");
  }

  // Streams follow the canonical order, so swapping x and y gives the same draws.
  const bool swapped = canonically_swapped(x, y);
  const TwoSampleBootstrap engine =
      swapped ? TwoSampleBootstrap(y, x, config.block_len_2, config.block_len_1)
              : TwoSampleBootstrap(x, y, config.block_len_1, config.block_len_2);
  const std::size_t replicates = config.replicates;
  std::vector<double> values(replicates);

  if (config.delta == 0.0) {
    const std::size_t chunks = (replicates + kReplicateChunk - 1) / kReplicateChunk;
    parallel_for(chunks, config.workers, [&](std::size_t c) {
      const std::size_t first = c * kReplicateChunk;
      const std::size_t count = std::min(kReplicateChunk, replicates - first);
      engine.sup_statistics(config.seed, first + 1, count,
                            std::span<double>(values.data() + first, count));
    });
  } else {
    const std::size_t g = x.grid_size();
    const double total = static_cast<double>(out.m + out.n);
    const double threshold =
        out.distance.value - config.extremal_const * std::log(total) / std::sqrt(total);
    std::vector<std::size_t> plus, minus;
    std::size_t p = 0;
    for (std::size_t i = 0; i < g; ++i) {
      for (std::size_t k = i; k < g; ++k, ++p) {
        const double d = out.distance.diff(i, k);
        const std::size_t weight = i == k ? 1 : 2;
        if (d >= threshold) {
          plus.push_back(p);
          out.plus_size += weight;
        }
        if (-d >= threshold) {
          minus.push_back(p);
          out.minus_size += weight;
        }
      }
    }
    if (plus.empty() && minus.empty()) {
      throw ConfigError("both extremal sets are empty; check the extremal-set constant");
    }
    // Only the extremal points enter K^(r); evaluate the field there alone.
    std::vector<std::size_t> columns(plus);
    columns.insert(columns.end(), minus.begin(), minus.end());
    std::vector<std::size_t> local_plus(plus.size()), local_minus(minus.size());
    for (std::size_t i = 0; i < plus.size(); ++i) {
      local_plus[i] = i;
    }
    for (std::size_t i = 0; i < minus.size(); ++i) {
      local_minus[i] = plus.size() + i;
    }
    const TwoSampleBootstrap reduced = engine.restricted(columns);
    parallel_for(replicates, config.workers, [&](std::size_t r) {
      auto [xi, zeta] = reduced.multipliers(config.seed, r + 1);
      // the swapped engine's field is -B^(r)
      values[r] = swapped ? reduced.extremal_statistic(xi, zeta, local_minus, local_plus)
                          : reduced.extremal_statistic(xi, zeta, local_plus, local_minus);
    });
  }
  out.draws.emplace(std::move(values));
  return out;
}

TestReport classical_two_sample_test(const CurveSample& x, const CurveSample& y,
                                     const TwoSampleConfig& config) {
  if (config.delta != 0.0) {
    throw InvalidInput("the classical two-sample test requires delta = 0");
  }
  return analyze_two_sample(x, y, config).report(config, x.grid(), config.alpha);
}

TestReport relevant_two_sample_test(const CurveSample& x, const CurveSample& y,
                                    const TwoSampleConfig& config) {
  if (!(config.delta > 0.0)) {
    throw InvalidInput("the relevant two-sample test requires delta > 0");
  }
  return analyze_two_sample(x, y, config).report(config, x.grid(), config.alpha);
}

} // namespace covop
