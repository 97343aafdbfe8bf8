// Copyright 2026 The covop Authors.
// SPDX-License-Identifier: Apache-2.0

#include "fda.hpp"

#include <cmath>
#include <string>

#include "errors.hpp"

namespace covop {

Grid::Grid(std::vector<double> points) : points_(std::move(points)) {
  if (points_.size() < 2) {
    throw InvalidInput("grid needs at least 2 points, got " + std::to_string(points_.size()));
  }
  if (points_.front() != 0.0 || points_.back() != 1.0) {
    throw InvalidInput("grid must start at 0 and end at 1");
  }
  for (std::size_t i = 1; i < points_.size(); ++i) {
    if (!(points_[i] > points_[i - 1])) {
      throw InvalidInput("grid is not strictly increasing at position " + std::to_string(i));
    }
  }
}

Grid Grid::equidistant(std::size_t size) {
  if (size < 2) {
    throw InvalidInput("grid needs at least 2 points");
  }
  std::vector<double> points(size);
  const double last = static_cast<double>(size - 1);
  for (std::size_t i = 0; i < size; ++i) {
    points[i] = static_cast<double>(i) / last;
  }
  points.back() = 1.0;
  return Grid(std::move(points));
}

CurveSample::CurveSample(Grid grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (values_.empty() || values_.size() % grid_.size() != 0) {
    throw InvalidInput("sample values do not form whole curves on a grid of size " +
                       std::to_string(grid_.size()));
  }
  count_ = values_.size() / grid_.size();
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      throw InvalidInput("non-finite value in curve " + std::to_string(i / grid_.size()));
    }
  }
}

CurveSample::CurveSample(Grid grid, const std::vector<Curve>& curves) : grid_(std::move(grid)) {
  if (curves.empty()) {
    throw InvalidInput("sample has no curves");
  }
  values_.reserve(curves.size() * grid_.size());
  for (std::size_t j = 0; j < curves.size(); ++j) {
    if (curves[j].size() != grid_.size()) {
      throw InvalidInput("curve " + std::to_string(j) + " has " + std::to_string(curves[j].size()) +
                         " values, grid has " + std::to_string(grid_.size()));
    }
    for (double v : curves[j]) {
      if (!std::isfinite(v)) {
        throw InvalidInput("non-finite value in curve " + std::to_string(j));
      }
      values_.push_back(v);
    }
  }
  count_ = curves.size();
}

CurveSample CurveSample::scaled(double factor) const {
  std::vector<double> values(values_);
  for (double& v : values) {
    v *= factor;
  }
  return CurveSample(grid_, std::move(values));
}

Surface::Surface(std::size_t grid_size) : size_(grid_size), values_(grid_size * grid_size, 0.0) {}

Surface::Surface(std::size_t grid_size, std::vector<double> values)
    : size_(grid_size), values_(std::move(values)) {
  if (values_.size() != size_ * size_) {
    throw InvalidInput("surface needs " + std::to_string(size_ * size_) + " values");
  }
}

namespace {

void require_two_curves(const CurveSample& sample) {
  if (sample.count() < 2) {
    throw InvalidInput("need at least 2 curves, got " + std::to_string(sample.count()));
  }
}

std::vector<double> pointwise_mean(const CurveSample& sample) {
  const std::size_t g = sample.grid_size();
  std::vector<double> mean(g, 0.0);
  for (std::size_t j = 0; j < sample.count(); ++j) {
    auto c = sample.curve(j);
    for (std::size_t i = 0; i < g; ++i) {
      mean[i] += c[i];
    }
  }
  for (double& v : mean) {
    v /= static_cast<double>(sample.count());
  }
  return mean;
}

} // namespace

CurveSample center_sample(const CurveSample& sample) {
  require_two_curves(sample);
  const auto mean = pointwise_mean(sample);
  std::vector<double> values(sample.values().begin(), sample.values().end());
  const std::size_t g = sample.grid_size();
  for (std::size_t j = 0; j < sample.count(); ++j) {
    for (std::size_t i = 0; i < g; ++i) {
      values[j * g + i] -= mean[i];
    }
  }
  return CurveSample(sample.grid(), std::move(values));
}

Surface empirical_covariance(const CurveSample& sample, Divisor divisor) {
  const CurveSample centred = center_sample(sample);
  const std::size_t g = sample.grid_size();
  const auto squares = packed::outer_squares(centred);
  const std::size_t len = packed::length(g);
  std::vector<double> sum(len, 0.0);
  for (std::size_t j = 0; j < centred.count(); ++j) {
    const double* row = squares.data() + j * len;
    for (std::size_t p = 0; p < len; ++p) {
      sum[p] += row[p];
    }
  }
  const double d = static_cast<double>(divisor == Divisor::N ? sample.count() : sample.count() - 1);
  for (double& v : sum) {
    v /= d;
  }
  return packed::unpack(sum, g);
}

SupNorm sup_norm_diff(const Surface& a, const Surface& b) {
  if (a.grid_size() != b.grid_size()) {
    throw InvalidInput("surfaces live on different grids");
  }
  SupNorm out;
  const auto av = a.values();
  const auto bv = b.values();
  std::size_t best = 0;
  for (std::size_t p = 0; p < av.size(); ++p) {
    const double d = std::abs(av[p] - bv[p]);
    if (d > out.value) {
      out.value = d;
      best = p;
    }
  }
  out.argmax = {best / a.grid_size(), best % a.grid_size()};
  return out;
}

Surface outer_square(std::span<const double> curve) {
  const std::size_t g = curve.size();
  Surface s(g);
  for (std::size_t i = 0; i < g; ++i) {
    for (std::size_t k = 0; k < g; ++k) {
      s(i, k) = curve[i] * curve[k];
    }
  }
  return s;
}

namespace packed {

GridPair pair(std::size_t g, std::size_t index) {
  std::size_t i = 0;
  std::size_t row_len = g;
  while (index >= row_len) {
    index -= row_len;
    ++i;
    --row_len;
  }
  return {i, i + index};
}

std::vector<double> pack(const Surface& s) {
  const std::size_t g = s.grid_size();
  std::vector<double> out;
  out.reserve(length(g));
  for (std::size_t i = 0; i < g; ++i) {
    for (std::size_t k = i; k < g; ++k) {
      out.push_back(s(i, k));
    }
  }
  return out;
}

Surface unpack(std::span<const double> values, std::size_t g) {
  Surface s(g);
  std::size_t p = 0;
  for (std::size_t i = 0; i < g; ++i) {
    for (std::size_t k = i; k < g; ++k, ++p) {
      s(i, k) = values[p];
      s(k, i) = values[p];
    }
  }
  return s;
}

std::vector<double> outer_squares(const CurveSample& centred) {
  const std::size_t g = centred.grid_size();
  const std::size_t len = length(g);
  std::vector<double> out(centred.count() * len);
  for (std::size_t j = 0; j < centred.count(); ++j) {
    auto c = centred.curve(j);
    double* row = out.data() + j * len;
    for (std::size_t i = 0; i < g; ++i) {
      const double ci = c[i];
      for (std::size_t k = i; k < g; ++k) {
        *row++ = ci * c[k];
      }
    }
  }
  return out;
}

} // namespace packed

} // namespace covop
