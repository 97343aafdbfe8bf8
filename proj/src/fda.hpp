// Copyright 2026 The covop Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace covop {

// Discretisation of [0,1]: strictly increasing, first point 0, last point 1.
class Grid {
public:
  explicit Grid(std::vector<double> points);

  static Grid equidistant(std::size_t size);

  std::size_t size() const { return points_.size(); }
  std::span<const double> points() const { return points_; }
  double operator[](std::size_t i) const { return points_[i]; }

  bool operator==(const Grid&) const = default;

private:
  std::vector<double> points_;
};

using Curve = std::vector<double>;

// Ordered (time-ordered) collection of curves on one grid, stored row-major as
// count() x grid().size().
class CurveSample {
public:
  CurveSample(Grid grid, std::vector<double> values);
  CurveSample(Grid grid, const std::vector<Curve>& curves);

  const Grid& grid() const { return grid_; }
  std::size_t count() const { return count_; }
  std::size_t grid_size() const { return grid_.size(); }

  std::span<const double> curve(std::size_t j) const {
    return {values_.data() + j * grid_.size(), grid_.size()};
  }
  std::span<double> curve(std::size_t j) {
    return {values_.data() + j * grid_.size(), grid_.size()};
  }
  std::span<const double> values() const { return values_; }

  CurveSample scaled(double factor) const;

private:
  Grid grid_;
  std::vector<double> values_;
  std::size_t count_ = 0;
};

// Real function on grid x grid, entry (i,k) = f(t_i, t_k), row-major.
class Surface {
public:
  explicit Surface(std::size_t grid_size);
  Surface(std::size_t grid_size, std::vector<double> values);

  std::size_t grid_size() const { return size_; }
  double operator()(std::size_t i, std::size_t k) const { return values_[i * size_ + k]; }
  double& operator()(std::size_t i, std::size_t k) { return values_[i * size_ + k]; }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }

private:
  std::size_t size_;
  std::vector<double> values_;
};

struct GridPair {
  std::size_t row = 0;
  std::size_t col = 0;
  bool operator==(const GridPair&) const = default;
};

struct SupNorm {
  double value = 0.0;
  GridPair argmax;
};

enum class Divisor { N, NMinus1 };

CurveSample center_sample(const CurveSample& sample);

Surface empirical_covariance(const CurveSample& sample, Divisor divisor);

// Max over the grid of |a - b|; argmax is the first pair in row-major order.
SupNorm sup_norm_diff(const Surface& a, const Surface& b);

Surface outer_square(std::span<const double> curve);

// Symmetric surfaces are handled in hot loops as their packed upper triangle
// (i <= k, row-major). Row-major first argmax of a symmetric surface always
// lies in the upper triangle, so packed scans report the same argmax.
namespace packed {

inline std::size_t length(std::size_t g) { return g * (g + 1) / 2; }

inline std::size_t index(std::size_t g, std::size_t i, std::size_t k) {
  if (i > k) {
    std::size_t t = i;
    i = k;
    k = t;
  }
  return i * g - (i * (i - 1)) / 2 + (k - i);
}

GridPair pair(std::size_t g, std::size_t index);

std::vector<double> pack(const Surface& s);
Surface unpack(std::span<const double> values, std::size_t g);

// Rows j = x_j x_j^T of the given curves, as an n x length(g) matrix.
std::vector<double> outer_squares(const CurveSample& centred);

} // namespace packed

} // namespace covop
