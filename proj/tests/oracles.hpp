// Copyright 2026 The covop Authors.
// SPDX-License-Identifier: Apache-2.0

// Brute-force reference implementations used by the tests. They work on
// plain nested vectors, use full G x G surfaces and follow the defining sums
// literally, sharing no code with the library.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

namespace oracle {

using Curves = std::vector<std::vector<double>>;  // curves[j][i]
using Field = std::vector<std::vector<double>>;   // G x G
using Fields = std::vector<Field>;

inline Field zeros(std::size_t g) { return Field(g, std::vector<double>(g, 0.0)); }

inline Curves centre(const Curves& x) {
  const std::size_t n = x.size(), g = x[0].size();
  Curves out = x;
  for (std::size_t i = 0; i < g; ++i) {
    double mean = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      mean += x[j][i];
    }
    mean /= static_cast<double>(n);
    for (std::size_t j = 0; j < n; ++j) {
      out[j][i] = x[j][i] - mean;
    }
  }
  return out;
}

inline Fields squares(const Curves& x) {
  const Curves c = centre(x);
  const std::size_t g = x[0].size();
  Fields out;
  for (const auto& curve : c) {
    Field f = zeros(g);
    for (std::size_t s = 0; s < g; ++s) {
      for (std::size_t t = 0; t < g; ++t) {
        f[s][t] = curve[s] * curve[t];
      }
    }
    out.push_back(f);
  }
  return out;
}

inline Field covariance(const Curves& x, double divisor) {
  const Curves c = centre(x);
  const std::size_t g = x[0].size();
  Field out = zeros(g);
  for (std::size_t s = 0; s < g; ++s) {
    for (std::size_t t = 0; t < g; ++t) {
      double acc = 0.0;
      for (const auto& curve : c) {
        acc += curve[s] * curve[t];
      }
      out[s][t] = acc / divisor;
    }
  }
  return out;
}

// Entry k (0-based) = l^{-1/2} (sum_{j=k}^{k+l-1} S_j - (l/n) sum_j S_j).
inline Fields block_sums(const Fields& s, std::size_t l) {
  const std::size_t n = s.size(), g = s[0].size();
  Fields out;
  for (std::size_t k = 0; k + l <= n; ++k) {
    Field f = zeros(g);
    for (std::size_t a = 0; a < g; ++a) {
      for (std::size_t b = 0; b < g; ++b) {
        double window = 0.0, total = 0.0;
        for (std::size_t j = k; j < k + l; ++j) {
          window += s[j][a][b];
        }
        for (std::size_t j = 0; j < n; ++j) {
          total += s[j][a][b];
        }
        f[a][b] = (window - static_cast<double>(l) / static_cast<double>(n) * total) /
                  std::sqrt(static_cast<double>(l));
      }
    }
    out.push_back(f);
  }
  return out;
}

// U(s) = (1/n)(sum_{j <= floor(sn)} S_j + (sn - floor(sn)) S_{floor(sn)+1} - s sum_j S_j).
inline Field sequential(const Curves& x, double s) {
  const Fields sq = squares(x);
  const std::size_t n = sq.size(), g = sq[0].size();
  const double pos = s * static_cast<double>(n);
  const auto k = static_cast<std::size_t>(std::floor(pos));
  const double frac = pos - static_cast<double>(k);
  Field out = zeros(g);
  for (std::size_t a = 0; a < g; ++a) {
    for (std::size_t b = 0; b < g; ++b) {
      double partial = 0.0, total = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        total += sq[j][a][b];
        if (j < k) {
          partial += sq[j][a][b];
        }
      }
      if (k < n) {
        partial += frac * sq[k][a][b];
      }
      out[a][b] = (partial - s * total) / static_cast<double>(n);
    }
  }
  return out;
}

inline double sup_abs(const Field& f) {
  double m = 0.0;
  for (const auto& row : f) {
    for (double v : row) {
      m = std::max(m, std::abs(v));
    }
  }
  return m;
}

struct MhatOracle {
  double value = 0.0;
  std::size_t k = 0;
};

inline MhatOracle mhat(const Curves& x) {
  const std::size_t n = x.size();
  MhatOracle out;
  for (std::size_t k = 0; k <= n; ++k) {
    const double v =
        sup_abs(sequential(x, static_cast<double>(k) / static_cast<double>(n)));
    if (v > out.value) {
      out.value = v;
      out.k = k;
    }
  }
  return out;
}

inline double shat(const Curves& x, double vartheta) {
  const std::size_t n = x.size();
  std::size_t best_k = 1;
  double best = -1.0;
  for (std::size_t k = 1; k < n; ++k) {
    const double v =
        sup_abs(sequential(x, static_cast<double>(k) / static_cast<double>(n)));
    if (v > best) {
      best = v;
      best_k = k;
    }
  }
  const double s = static_cast<double>(best_k) / static_cast<double>(n);
  return std::clamp(s, vartheta, 1.0 - vartheta);
}

// sqrt(m+n) [ (1/m) sum_k xi_k blocks_x(k) - (1/n) sum_k zeta_k blocks_y(k) ].
inline Field two_sample_field(const Curves& x, const Curves& y, const std::vector<double>& xi,
                              const std::vector<double>& zeta, std::size_t l1, std::size_t l2) {
  const Fields bx = block_sums(squares(x), l1);
  const Fields by = block_sums(squares(y), l2);
  const double m = static_cast<double>(x.size()), n = static_cast<double>(y.size());
  const std::size_t g = x[0].size();
  Field out = zeros(g);
  for (std::size_t a = 0; a < g; ++a) {
    for (std::size_t b = 0; b < g; ++b) {
      double first = 0.0, second = 0.0;
      for (std::size_t k = 0; k < bx.size(); ++k) {
        first += xi[k] * bx[k][a][b];
      }
      for (std::size_t k = 0; k < by.size(); ++k) {
        second += zeta[k] * by[k][a][b];
      }
      out[a][b] = std::sqrt(m + n) * (first / m - second / n);
    }
  }
  return out;
}

// Knots k = 0..n of the change-point bootstrap replicate W.
inline Fields change_point_field(const Curves& x, double s_hat, const std::vector<double>& xi,
                                 std::size_t l) {
  const Fields sq = squares(x);
  const std::size_t n = sq.size(), g = sq[0].size();
  const auto kh = static_cast<std::size_t>(std::floor(s_hat * static_cast<double>(n)));
  Fields y = sq;
  if (kh > 0 && kh < n) {
    for (std::size_t a = 0; a < g; ++a) {
      for (std::size_t b = 0; b < g; ++b) {
        double c1 = 0.0, c2 = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
          (j < kh ? c1 : c2) += sq[j][a][b];
        }
        c1 /= static_cast<double>(kh);
        c2 /= static_cast<double>(n - kh);
        for (std::size_t j = kh; j < n; ++j) {
          y[j][a][b] -= c2 - c1;
        }
      }
    }
  }
  // D_i for i = 1..n-l (0-based i = 0..n-l-1)
  const Fields d_all = block_sums(y, l);
  const std::size_t count = n - l;
  auto b_at = [&](std::size_t k) {
    Field f = zeros(g);
    for (std::size_t i = 0; i < std::min(k, count); ++i) {
      for (std::size_t a = 0; a < g; ++a) {
        for (std::size_t bb = 0; bb < g; ++bb) {
          f[a][bb] += xi[i] * d_all[i][a][bb] / std::sqrt(static_cast<double>(n));
        }
      }
    }
    return f;
  };
  const Field b_end = b_at(n);
  Fields out;
  for (std::size_t k = 0; k <= n; ++k) {
    Field f = b_at(k);
    for (std::size_t a = 0; a < g; ++a) {
      for (std::size_t bb = 0; bb < g; ++bb) {
        f[a][bb] -= static_cast<double>(k) / static_cast<double>(n) * b_end[a][bb];
      }
    }
    out.push_back(f);
  }
  return out;
}

// Cox-de Boor recursion written recursively on an explicit knot vector.
inline double bspline(const std::vector<double>& knots, std::size_t i, std::size_t order,
                      double x) {
  if (order == 1) {
    const bool last = x == knots.back() && knots[i + 1] == knots.back() && knots[i] < knots[i + 1];
    return (knots[i] <= x && x < knots[i + 1]) || last ? 1.0 : 0.0;
  }
  double v = 0.0;
  const double dl = knots[i + order - 1] - knots[i];
  const double dr = knots[i + order] - knots[i + 1];
  if (dl > 0) {
    v += (x - knots[i]) / dl * bspline(knots, i, order - 1, x);
  }
  if (dr > 0) {
    v += (knots[i + order] - x) / dr * bspline(knots, i + 1, order - 1, x);
  }
  return v;
}

inline std::vector<double> clamped_knots(std::size_t count, std::size_t order) {
  std::vector<double> k(order, 0.0);
  const std::size_t interior = count - order;
  for (std::size_t i = 1; i <= interior; ++i) {
    k.push_back(static_cast<double>(i) / static_cast<double>(interior + 1));
  }
  k.insert(k.end(), order, 1.0);
  return k;
}

// Population covariance of sum_i N_i B_i with Var N_i = 1/i^2.
inline double bspline_cov(double s, double t) {
  const auto knots = clamped_knots(21, 4);
  double c = 0.0;
  for (std::size_t i = 0; i < 21; ++i) {
    const double w = 1.0 / static_cast<double>((i + 1) * (i + 1));
    c += w * bspline(knots, i, 4, s) * bspline(knots, i, 4, t);
  }
  return c;
}

} // namespace oracle
