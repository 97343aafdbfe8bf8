// Copyright 2026 The covop Authors.
// SPDX-License-Identifier: Apache-2.0

#include "change_point.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "errors.hpp"

namespace covop {

void ChangePointConfig::validate() const {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw InvalidInput("alpha must lie in (0,1)");
  }
  if (!(delta >= 0.0) || !std::isfinite(delta)) {
    throw InvalidInput("delta must be a finite number >= 0");
  }
  if (block_len < 1) {
    throw InvalidInput("block length must be >= 1");
  }
  if (replicates < 1) {
    throw InvalidInput("need at least one bootstrap replicate");
  }
  if (!(extremal_const > 0.0)) {
    throw InvalidInput("extremal-set constant c must be > 0");
  }
  if (!(vartheta > 0.0 && vartheta <= 0.5)) {
    throw InvalidInput("vartheta must lie in (0, 0.5]");
  }
}

SequentialField::SequentialField(std::size_t n, std::size_t grid_size,
                                 std::vector<std::vector<double>> knots)
    : n_(n), g_(grid_size), knots_(std::move(knots)) {
  if (knots_.size() != n_ + 1) {
    throw InvalidInput("sequential field needs n + 1 knots");
  }
}

Surface SequentialField::knot(std::size_t k) const { return packed::unpack(knots_.at(k), g_); }

Surface SequentialField::at(double s) const {
  if (!(s >= 0.0 && s <= 1.0)) {
    throw InvalidInput("s must lie in [0,1]");
  }
  const std::size_t k = std::min(floor_index(s, n_), n_);
  if (k == n_) {
    return knot(n_);
  }
  const double frac = std::clamp(s * static_cast<double>(n_) - static_cast<double>(k), 0.0, 1.0);
  const auto& lo = knots_[k];
  const auto& hi = knots_[k + 1];
  std::vector<double> v(lo.size());
  for (std::size_t p = 0; p < v.size(); ++p) {
    v[p] = lo[p] + frac * (hi[p] - lo[p]);
  }
  return packed::unpack(v, g_);
}

std::size_t floor_index(double s, std::size_t n) {
  const double x = s * static_cast<double>(n);
  return static_cast<std::size_t>(std::floor(x + 1e-9 * std::max(1.0, x)));
}

SequentialField sequential_field(const CurveSample& sample) {
  const CurveSample centred = center_sample(sample);
  const std::size_t n = sample.count();
  const std::size_t g = sample.grid_size();
  const std::size_t len = packed::length(g);
  const auto squares = packed::outer_squares(centred);

  std::vector<std::vector<double>> partial(n + 1, std::vector<double>(len, 0.0));
  for (std::size_t k = 1; k <= n; ++k) {
    const double* s = squares.data() + (k - 1) * len;
    for (std::size_t p = 0; p < len; ++p) {
      partial[k][p] = partial[k - 1][p] + s[p];
    }
  }
  // partial[n] is the total, summed in the same order, so knot n is exactly 0.
  const std::vector<double> total = partial[n];
  const double nn = static_cast<double>(n);
  for (std::size_t k = 0; k <= n; ++k) {
    const double share = static_cast<double>(k) / nn;
    for (std::size_t p = 0; p < len; ++p) {
      partial[k][p] = (partial[k][p] - share * total[p]) / nn;
    }
  }
  return SequentialField(n, g, std::move(partial));
}

MhatResult mhat(const SequentialField& field) {
  MhatResult out;
  std::size_t best_p = 0;
  for (std::size_t k = 0; k <= field.n(); ++k) {
    auto knot = field.packed_knot(k);
    for (std::size_t p = 0; p < knot.size(); ++p) {
      const double a = std::abs(knot[p]);
      if (a > out.value) {
        out.value = a;
        out.k_argmax = k;
        best_p = p;
      }
    }
  }
  out.argmax = packed::pair(field.grid_size(), best_p);
  return out;
}

double estimate_change_location(const SequentialField& field, double vartheta) {
  if (!(vartheta > 0.0 && vartheta <= 0.5)) {
    throw InvalidInput("vartheta must lie in (0, 0.5]");
  }
  const std::size_t n = field.n();
  std::size_t best_k = 1;
  double best = -1.0;
  for (std::size_t k = 1; k < n; ++k) {
    double m = 0.0;
    for (double v : field.packed_knot(k)) {
      m = std::max(m, std::abs(v));
    }
    if (m > best) {
      best = m;
      best_k = k;
    }
  }
  const double s = static_cast<double>(best_k) / static_cast<double>(n);
  return std::max(vartheta, std::min(s, 1.0 - vartheta));
}

ChangePointBootstrap::ChangePointBootstrap(const CurveSample& sample, double shat,
                                           std::size_t block_len)
    : n_(sample.count()), g_(sample.grid_size()), len_(packed::length(sample.grid_size())),
      l_(block_len) {
  if (n_ < 2) {
    throw InvalidInput("need at least 2 curves, got " + std::to_string(n_));
  }
  if (l_ < 1 || l_ > n_) {
    throw InvalidInput("block length " + std::to_string(l_) + " outside [1, " +
                       std::to_string(n_) + "]");
  }
  if (!(shat >= 0.0 && shat <= 1.0)) {
    throw InvalidInput("change location must lie in [0,1]");
  }
  k_hat_ = std::min(floor_index(shat, n_), n_);
  const auto squares = packed::outer_squares(center_sample(sample));

  c1_.assign(len_, 0.0);
  c2_.assign(len_, 0.0);
  for (std::size_t j = 0; j < n_; ++j) {
    auto& target = j < k_hat_ ? c1_ : c2_;
    const double* s = squares.data() + j * len_;
    for (std::size_t p = 0; p < len_; ++p) {
      target[p] += s[p];
    }
  }
  if (k_hat_ > 0) {
    for (double& v : c1_) {
      v /= static_cast<double>(k_hat_);
    }
  }
  if (k_hat_ < n_) {
    for (double& v : c2_) {
      v /= static_cast<double>(n_ - k_hat_);
    }
  }

  // Y_j = S_j - (C2 - C1) 1{j > k_hat}. With an empty segment the adjustment
  // is constant in j and cancels in the centred block sums.
  std::vector<double> shift(len_, 0.0);
  if (k_hat_ > 0 && k_hat_ < n_) {
    for (std::size_t p = 0; p < len_; ++p) {
      shift[p] = c2_[p] - c1_[p];
    }
  }
  std::vector<double> adjusted(squares);
  std::vector<double> total(len_, 0.0);
  for (std::size_t j = 0; j < n_; ++j) {
    double* y = adjusted.data() + j * len_;
    if (j >= k_hat_) {
      for (std::size_t p = 0; p < len_; ++p) {
        y[p] -= shift[p];
      }
    }
    for (std::size_t p = 0; p < len_; ++p) {
      total[p] += y[p];
    }
  }

  const std::size_t count = n_ - l_;
  const double l = static_cast<double>(l_);
  const double share = l / static_cast<double>(n_);
  const double scale = 1.0 / (std::sqrt(l) * std::sqrt(static_cast<double>(n_)));
  blocks_.assign(count * len_, 0.0);
  std::vector<double> window(len_);
  for (std::size_t i = 0; i < count; ++i) {
    std::fill(window.begin(), window.end(), 0.0);
    for (std::size_t j = i; j < i + l_; ++j) {
      const double* y = adjusted.data() + j * len_;
      for (std::size_t p = 0; p < len_; ++p) {
        window[p] += y[p];
      }
    }
    double* d = blocks_.data() + i * len_;
    for (std::size_t p = 0; p < len_; ++p) {
      d[p] = scale * (window[p] - share * total[p]);
    }
  }
}

SequentialField ChangePointBootstrap::field(std::span<const double> xi) const {
  const std::size_t count = n_ - l_;
  if (xi.size() < count) {
    throw InvalidInput("need at least n - l multipliers");
  }
  std::vector<double> final_value(len_, 0.0);
  for (std::size_t i = 0; i < count; ++i) {
    const double* d = blocks_.data() + i * len_;
    for (std::size_t p = 0; p < len_; ++p) {
      final_value[p] += xi[i] * d[p];
    }
  }
  std::vector<std::vector<double>> knots(n_ + 1, std::vector<double>(len_, 0.0));
  std::vector<double> running(len_, 0.0);
  for (std::size_t k = 1; k <= n_; ++k) {
    if (k <= count) {
      const double* d = blocks_.data() + (k - 1) * len_;
      for (std::size_t p = 0; p < len_; ++p) {
        running[p] += xi[k - 1] * d[p];
      }
    }
    const double share = static_cast<double>(k) / static_cast<double>(n_);
    for (std::size_t p = 0; p < len_; ++p) {
      knots[k][p] = running[p] - share * final_value[p];
    }
  }
  return SequentialField(n_, g_, std::move(knots));
}

double ChangePointBootstrap::sup_statistic(std::span<const double> xi) const {
  const std::size_t count = n_ - l_;
  if (xi.size() < count) {
    throw InvalidInput("need at least n - l multipliers");
  }
  std::vector<double> final_value(len_, 0.0);
  double* f = final_value.data();
  for (std::size_t i = 0; i < count; ++i) {
    const double* d = blocks_.data() + i * len_;
    const double w = xi[i];
#pragma omp simd
    for (std::size_t p = 0; p < len_; ++p) {
      f[p] += w * d[p];
    }
  }
  std::vector<double> running(len_, 0.0);
  double* b = running.data();
  double best = 0.0;
  for (std::size_t k = 1; k <= n_; ++k) {
    const double share = static_cast<double>(k) / static_cast<double>(n_);
    if (k <= count) {
      const double* d = blocks_.data() + (k - 1) * len_;
      const double w = xi[k - 1];
#pragma omp simd reduction(max : best)
      for (std::size_t p = 0; p < len_; ++p) {
        b[p] += w * d[p];
        const double a = std::fabs(b[p] - share * f[p]);
        best = a > best ? a : best;
      }
    } else {
#pragma omp simd reduction(max : best)
      for (std::size_t p = 0; p < len_; ++p) {
        const double a = std::fabs(b[p] - share * f[p]);
        best = a > best ? a : best;
      }
    }
  }
  return best;
}

std::vector<double> ChangePointBootstrap::field_at(std::span<const double> xi, double s,
                                                   std::span<const std::size_t> columns) const {
  const std::size_t count = n_ - l_;
  if (xi.size() < count) {
    throw InvalidInput("need at least n - l multipliers");
  }
  const std::size_t k = std::min(floor_index(s, n_), n_);
  const double frac =
      k == n_ ? 0.0
              : std::clamp(s * static_cast<double>(n_) - static_cast<double>(k), 0.0, 1.0);
  const std::size_t k_lo = std::min(k, count);
  const std::size_t k_hi = std::min(k + 1, count);
  const double nn = static_cast<double>(n_);
  std::vector<double> out(columns.size());
  for (std::size_t c = 0; c < columns.size(); ++c) {
    const std::size_t p = columns[c];
    double lo = 0.0;
    double hi = 0.0;
    double fin = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
      const double v = xi[i] * blocks_[i * len_ + p];
      fin += v;
      if (i < k_lo) {
        lo += v;
      }
      if (i < k_hi) {
        hi += v;
      }
    }
    const double w_lo = lo - (static_cast<double>(k) / nn) * fin;
    if (k == n_) {
      out[c] = w_lo;
      continue;
    }
    const double w_hi = hi - (static_cast<double>(k + 1) / nn) * fin;
    out[c] = w_lo + frac * (w_hi - w_lo);
  }
  return out;
}

SequentialField cp_bootstrap_field(const CurveSample& sample, double shat,
                                   std::span<const double> xi, std::size_t block_len) {
  return ChangePointBootstrap(sample, shat, block_len).field(xi);
}

SequentialField cp_bootstrap_field(const CurveSample& sample, double shat,
                                   const ChangePointConfig& config, std::size_t r) {
  const auto xi = gaussian_multipliers({config.seed, r, MultiplierTag::Series}, sample.count());
  return cp_bootstrap_field(sample, shat, xi, config.block_len);
}

TestReport ChangePointAnalysis::report(const ChangePointConfig& config, const Grid& grid,
                                       double alpha) const {
  TestReport r;
  r.test = config.delta > 0.0 ? "change-point/relevant" : "change-point/classical";
  r.statistic = statistic;
  r.quantile = draws->quantile(alpha);
  r.scale = std::sqrt(static_cast<double>(n));
  r.alpha = alpha;
  r.delta = config.delta;
  r.replicates = config.replicates;
  r.block_lengths = {config.block_len};
  r.sample_sizes = {n};
  r.extremal_const = config.extremal_const;
  r.seed = config.seed;
  r.argmax = m.argmax;
  r.argmax_location = {grid[m.argmax.row], grid[m.argmax.col]};
  r.mhat = m.value;
  r.change_location = shat;
  r.k_argmax = m.k_argmax;
  r.vartheta = config.vartheta;
  r.frozen_tail = frozen_tail;
  if (config.delta > 0.0) {
    r.extremal_plus_size = plus_size;
    r.extremal_minus_size = minus_size;
  }
  if (frozen_tail) {
    r.warnings.push_back(
        "floor(shat n) > n - l: the bootstrap field at shat is read from the frozen tail");
  }
  finalize_decision(r);
  return r;
}

bool ChangePointAnalysis::reject(const ChangePointConfig& config, double alpha) const {
  return statistic > config.delta + draws->quantile(alpha) / std::sqrt(static_cast<double>(n));
}

ChangePointAnalysis analyze_change_point(const CurveSample& sample,
                                         const ChangePointConfig& config) {
  config.validate();
  if (config.block_len > sample.count()) {
    throw InvalidInput("block length " + std::to_string(config.block_len) + " exceeds n = " +
                       std::to_string(sample.count()));
  }
  const SequentialField u = sequential_field(sample);
  ChangePointAnalysis out;
  out.n = sample.count();
  out.m = mhat(u);
  out.shat = estimate_change_location(u, config.vartheta);

  const ChangePointBootstrap engine(sample, out.shat, config.block_len);
  out.frozen_tail = engine.change_index() + config.block_len > out.n;
  const std::size_t replicates = config.replicates;
  std::vector<double> values(replicates);

  auto draw = [&](std::size_t r) {
    return gaussian_multipliers({config.seed, r, MultiplierTag::Series}, out.n);
  };

  if (config.delta == 0.0) {
    out.statistic = out.m.value;
    parallel_for(replicates, config.workers,
                 [&](std::size_t r) { values[r] = engine.sup_statistic(draw(r + 1)); });
  } else {
    if (engine.change_index() == 0 || engine.change_index() == out.n) {
      throw InvalidInput("estimated change location leaves an empty segment");
    }
    const double weight = out.shat * (1.0 - out.shat);
    out.statistic = out.m.value / weight;
    const double nn = static_cast<double>(out.n);
    const double threshold = out.statistic - config.extremal_const * std::log(nn) / std::sqrt(nn);
    const std::size_t g = sample.grid_size();
    const auto c1 = engine.before();
    const auto c2 = engine.after();
    std::vector<std::size_t> columns;
    std::vector<int> sign;
    std::size_t p = 0;
    for (std::size_t i = 0; i < g; ++i) {
      for (std::size_t k = i; k < g; ++k, ++p) {
        const double d = c1[p] - c2[p];
        const std::size_t mult = i == k ? 1 : 2;
        if (d >= threshold) {
          columns.push_back(p);
          sign.push_back(1);
          out.plus_size += mult;
        }
        if (-d >= threshold) {
          columns.push_back(p);
          sign.push_back(-1);
          out.minus_size += mult;
        }
      }
    }
    if (columns.empty()) {
      throw ConfigError("both extremal sets are empty; the relevant bootstrap statistic is undefined");
    }
    parallel_for(replicates, config.workers, [&](std::size_t r) {
      const auto w = engine.field_at(draw(r + 1), out.shat, columns);
      double best = -std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < w.size(); ++c) {
        best = std::max(best, sign[c] * w[c]);
      }
      values[r] = best / weight;
    });
  }
  out.draws.emplace(std::move(values));
  return out;
}

TestReport classical_cp_test(const CurveSample& sample, const ChangePointConfig& config) {
  if (config.delta != 0.0) {
    throw InvalidInput("the classical change-point test requires delta = 0");
  }
  return analyze_change_point(sample, config).report(config, sample.grid(), config.alpha);
}

TestReport relevant_cp_test(const CurveSample& sample, const ChangePointConfig& config) {
  if (!(config.delta > 0.0)) {
    throw InvalidInput("the relevant change-point test requires delta > 0");
  }
  return analyze_change_point(sample, config).report(config, sample.grid(), config.alpha);
}

} // namespace covop
