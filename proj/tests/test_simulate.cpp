// Copyright 2026 The covop Authors.
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <numbers>

#include "bootstrap.hpp"
#include "errors.hpp"
#include "helpers.hpp"
#include "simulate.hpp"

using namespace covop;

namespace {

// Sample variance of curve value j at grid index t over many seeds.
template <class Gen>
double variance_over_seeds(std::size_t reps, std::size_t t, Gen gen) {
  double sum = 0.0, sq = 0.0;
  for (std::size_t r = 0; r < reps; ++r) {
    const double v = gen(r)[t];
    sum += v;
    sq += v * v;
  }
  const double mean = sum / static_cast<double>(reps);
  return sq / static_cast<double>(reps) - mean * mean;
}

// Mean of the product of grid values s and t over all curves in a sample list.
double cross_moment(const std::vector<CurveSample>& samples, std::size_t s, std::size_t t) {
  double acc = 0.0;
  std::size_t count = 0;
  for (const auto& sample : samples) {
    for (std::size_t j = 0; j < sample.count(); ++j) {
      acc += sample.curve(j)[s] * sample.curve(j)[t];
      ++count;
    }
  }
  return acc / static_cast<double>(count);
}

} // namespace

TEST_CASE("bspline_basis") {
  const Grid g = Grid::equidistant(57);
  const auto basis = bspline_basis(g);
  const auto knots = oracle::clamped_knots(21, 4);
  SUBCASE("matches the Cox-de Boor recursion") {
    for (std::size_t i = 0; i < 21; ++i) {
      for (std::size_t t = 0; t < 57; ++t) {
        CHECK(std::abs(basis[i * 57 + t] - oracle::bspline(knots, i, 4, g[t])) < 1e-13);
      }
    }
  }
  SUBCASE("partition of unity and clamped ends") {
    for (std::size_t t = 0; t < 57; ++t) {
      double sum = 0.0;
      for (std::size_t i = 0; i < 21; ++i) {
        CHECK(basis[i * 57 + t] >= -1e-15);
        sum += basis[i * 57 + t];
      }
      CHECK(sum == doctest::Approx(1.0).epsilon(1e-13));
    }
    CHECK(basis[0] == 1.0);
    CHECK(basis[20 * 57 + 56] == 1.0);
  }
}

TEST_CASE("fourier_basis is orthonormal") {
  const std::size_t g = 2001;
  const auto basis = fourier_basis(Grid::equidistant(g));
  // Periodic rectangle rule is exact for these trigonometric polynomials.
  for (std::size_t a = 0; a < 55; a += 6) {
    for (std::size_t b = 0; b < 55; b += 5) {
      double acc = 0.0;
      for (std::size_t t = 0; t + 1 < g; ++t) {
        acc += basis[a * g + t] * basis[b * g + t];
      }
      acc /= static_cast<double>(g - 1);
      CHECK(acc == doctest::Approx(a == b ? 1.0 : 0.0).epsilon(1e-10).scale(1.0));
    }
  }
}

TEST_CASE("B-spline error curves have the intended covariance") {
  const std::size_t g = 11;
  const Grid grid = Grid::equidistant(g);
  for (CoeffDist dist : {CoeffDist::Gaussian, CoeffDist::T5Scaled}) {
    std::vector<CurveSample> samples;
    for (std::uint64_t s = 0; s < 40; ++s) {
      samples.push_back(gen_bspline_errors(500, g, 100 + s, dist));
    }
    for (auto [s, t] : {std::pair<std::size_t, std::size_t>{0, 0}, {3, 3}, {3, 5}, {10, 10}}) {
      const double expected = oracle::bspline_cov(grid[s], grid[t]);
      CHECK(cross_moment(samples, s, t) == doctest::Approx(expected).epsilon(0.05));
    }
  }
}

TEST_CASE("fMA curves") {
  const std::size_t g = 11;
  std::vector<CurveSample> samples;
  for (std::uint64_t s = 0; s < 40; ++s) {
    samples.push_back(gen_fma(500, 0.7, 0.0, g, s, CoeffDist::Gaussian));
  }
  CHECK(cross_moment(samples, 0, 0) == doctest::Approx(1.49).epsilon(0.05));
  // lag-one cross moment at t = 0: kappa1 * Var e(0)
  double lag = 0.0;
  std::size_t count = 0;
  for (const auto& sample : samples) {
    for (std::size_t j = 1; j < sample.count(); ++j) {
      lag += sample.curve(j)[0] * sample.curve(j - 1)[0];
      ++count;
    }
  }
  CHECK(lag / static_cast<double>(count) == doctest::Approx(0.7).epsilon(0.08));
}

TEST_CASE("sin/cos model covariance") {
  const std::size_t g = 11;
  const Grid grid = Grid::equidistant(g);
  std::vector<CurveSample> samples;
  for (std::uint64_t s = 0; s < 40; ++s) {
    samples.push_back(gen_sincos_t5(500, 2, 1.0, g, s).first);
  }
  auto kernel = [](double s, double t) {
    double c = 0.0;
    for (int k = 1; k <= 10; ++k) {
      c += 2.0 / k * std::sin(std::numbers::pi * k * s) * std::sin(std::numbers::pi * k * t) +
           std::cos(2 * std::numbers::pi * k * s) * std::cos(2 * std::numbers::pi * k * t) / k;
    }
    return 5.0 / 3.0 * c;
  };
  for (auto [s, t] : {std::pair<std::size_t, std::size_t>{0, 0}, {5, 5}, {2, 7}}) {
    CHECK(cross_moment(samples, s, t) == doctest::Approx(kernel(grid[s], grid[t])).epsilon(0.06));
  }
  SUBCASE("second sample is c times an independent copy") {
    const auto [x1, y1] = gen_sincos_t5(5, 5, 1.0, g, 9);
    const auto [x2, y2] = gen_sincos_t5(5, 5, 1.6, g, 9);
    for (std::size_t p = 0; p < y1.values().size(); ++p) {
      CHECK(y2.values()[p] == doctest::Approx(1.6 * y1.values()[p]).epsilon(1e-14));
      CHECK(x1.values()[p] == x2.values()[p]);
    }
  }
}

TEST_CASE("Brownian curves") {
  const std::size_t g = 21;
  SUBCASE("start at zero with Var X(1) = 1 before the change") {
    const auto sample = gen_brownian_cp(4000, 4000, 0.0, 0.0, g, 3);
    double sq = 0.0;
    for (std::size_t j = 0; j < sample.count(); ++j) {
      CHECK(sample.curve(j)[0] == 0.0);
      sq += sample.curve(j)[g - 1] * sample.curve(j)[g - 1];
    }
    CHECK(sq / 4000.0 == doctest::Approx(1.0).epsilon(0.07));
  }
  SUBCASE("curves from k* on are scaled") {
    const auto base = gen_brownian_cp(10, 10, 0.0, 0.0, g, 5);
    const auto changed = gen_brownian_cp(10, 4, 0.3, 0.5, g, 5);
    for (std::size_t j = 0; j < 10; ++j) {
      for (std::size_t t = 0; t < g; ++t) {
        const double x = static_cast<double>(t) / (g - 1);
        const double f = j + 1 >= 4 ? 1.3 + 0.5 * (1 + std::sin(2 * std::numbers::pi * x)) : 1.0;
        CHECK(changed.curve(j)[t] == doctest::Approx(f * base.curve(j)[t]).epsilon(1e-14));
      }
    }
  }
}

TEST_CASE("fAR(1) stationary variance") {
  const std::size_t g = 11;
  const Grid grid = Grid::equidistant(g);
  const auto basis = fourier_basis(grid);
  // Lyapunov equation Sigma = Psi Sigma Psi' + diag(sigma^2) by fixed-point iteration.
  auto lyapunov = [](const std::vector<double>& sigma) {
    const std::size_t d = sigma.size();
    std::vector<double> s(d * d, 0.0), tmp(d * d), next(d * d);
    auto psi = [&](std::size_t i, std::size_t k) {
      return i == k ? 0.4 : (i + 1 == k || k + 1 == i) ? 0.1 : 0.0;
    };
    for (int it = 0; it < 200; ++it) {
      for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t k = 0; k < d; ++k) {
          double v = 0.0;
          for (std::size_t q = (i ? i - 1 : 0); q <= std::min(d - 1, i + 1); ++q) {
            v += psi(i, q) * s[q * d + k];
          }
          tmp[i * d + k] = v;
        }
      }
      for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t k = 0; k < d; ++k) {
          double v = 0.0;
          for (std::size_t q = (k ? k - 1 : 0); q <= std::min(d - 1, k + 1); ++q) {
            v += tmp[i * d + q] * psi(k, q);
          }
          next[i * d + k] = v + (i == k ? sigma[i] * sigma[i] : 0.0);
        }
      }
      s.swap(next);
    }
    return s;
  };
  struct Case {
    Far1Setting setting;
    std::vector<double> sigma;
    double sigma_eps;
  };
  std::vector<Case> cases;
  {
    std::vector<double> s1(55), s2(55), s3(55);
    for (std::size_t i = 1; i <= 55; ++i) {
      s1[i - 1] = i <= 8 ? 1.0 : 0.0;
      s2[i - 1] = std::pow(3.0, -static_cast<double>(i));
      s3[i - 1] = 1.0 / static_cast<double>(i);
    }
    cases = {{Far1Setting::S1, s1, 1.5}, {Far1Setting::S2, s2, 0.3}, {Far1Setting::S3, s3, 1.0}};
  }
  const std::size_t reps = 3000;
  const std::size_t t = 3;
  for (const auto& c : cases) {
    const auto sigma = lyapunov(c.sigma);
    double expected = 0.0;
    for (std::size_t i = 0; i < 55; ++i) {
      for (std::size_t k = 0; k < 55; ++k) {
        expected += basis[i * g + t] * sigma[i * 55 + k] * basis[k * g + t];
      }
    }
    const double before = variance_over_seeds(reps, t, [&](std::size_t r) {
      const auto s = gen_far1(2, c.setting, 5, g, 500 + r);
      return std::vector<double>(s.curve(0).begin(), s.curve(0).end());
    });
    CHECK(before == doctest::Approx(expected).epsilon(5.0 * std::sqrt(2.0 / reps)));
    double extra = 0.0;
    for (std::size_t i = 0; i < 5; ++i) {
      extra += c.sigma_eps * c.sigma_eps / 5.0 * basis[i * g + t] * basis[i * g + t];
    }
    const double after = variance_over_seeds(reps, t, [&](std::size_t r) {
      const auto s = gen_far1(2, c.setting, 5, g, 500 + r);
      return std::vector<double>(s.curve(1).begin(), s.curve(1).end());
    });
    CHECK(after == doctest::Approx(expected + extra).epsilon(5.0 * std::sqrt(2.0 / reps)));
  }
  SUBCASE("change noise does not alter the pre-change curves") {
    const auto a = gen_far1(20, Far1Setting::S3, 0, g, 7);
    const auto b = gen_far1(20, Far1Setting::S3, 30, g, 7);
    for (std::size_t j = 0; j < 10; ++j) {
      for (std::size_t q = 0; q < g; ++q) {
        CHECK(a.curve(j)[q] == b.curve(j)[q]);
      }
    }
  }
}

TEST_CASE("scenario simulation") {
  ScenarioSpec spec;
  spec.family = Family::Fiid;
  spec.m = 6;
  spec.n = 7;
  spec.grid = 9;
  spec.seed = 11;
  spec.a = 1.5;
  SUBCASE("reproducible and seed sensitive") {
    const auto a = simulate_two_sample(spec);
    const auto b = simulate_two_sample(spec);
    CHECK(std::equal(a.first.values().begin(), a.first.values().end(), b.first.values().begin()));
    CHECK(std::equal(a.second.values().begin(), a.second.values().end(),
                     b.second.values().begin()));
    spec.seed = 12;
    const auto c = simulate_two_sample(spec);
    CHECK(a.first.values()[4] != c.first.values()[4]);
  }
  SUBCASE("second sample is a times an independent draw") {
    const auto a = simulate_two_sample(spec);
    const auto y = gen_bspline_errors(7, 9, derive_seed({11, 2}), CoeffDist::Gaussian);
    for (std::size_t p = 0; p < y.values().size(); ++p) {
      CHECK(a.second.values()[p] == doctest::Approx(1.5 * y.values()[p]).epsilon(1e-15));
    }
  }
  SUBCASE("series change starts at floor(s* n)") {
    spec.design = Design::Series;
    spec.n = 10;
    spec.s_star = 0.35;
    const auto s = simulate_series(spec);
    const auto base = gen_bspline_errors(10, 9, 11, CoeffDist::Gaussian);
    for (std::size_t j = 0; j < 10; ++j) {
      const double f = j >= 3 ? 1.5 : 1.0;
      CHECK(s.curve(j)[4] == doctest::Approx(f * base.curve(j)[4]).epsilon(1e-15));
    }
  }
  SUBCASE("population facts") {
    spec.a = std::sqrt(2.0);
    auto f = population_facts(spec);
    CHECK(*f.sup_norm_distance == doctest::Approx(1.0));
    CHECK(*f.extremal_plus == "{}");
    CHECK(*f.extremal_minus == "{(0,0)}");
    spec.family = Family::Fma;
    spec.kappa1 = 0.7;
    f = population_facts(spec);
    CHECK(*f.sup_norm_distance == doctest::Approx(1.49));
    spec.family = Family::SinCosT5;
    CHECK_FALSE(population_facts(spec).sup_norm_distance.has_value());
  }
  SUBCASE("invalid designs") {
    spec.family = Family::Far1;
    spec.design = Design::TwoSample;
    CHECK_THROWS_AS(simulate_two_sample(spec), InvalidInput);
    spec.family = Family::BrownianCp;
    spec.design = Design::Series;
    spec.k_star = 0;
    CHECK_THROWS_AS(simulate_series(spec), InvalidInput);
    spec.family = Family::Far1;
    spec.m_changed = 56;
    CHECK_THROWS_AS(simulate_series(spec), InvalidInput);
  }
}

TEST_CASE("scenario JSON") {
  SUBCASE("round trip") {
    const auto j = nlohmann::json::parse(
        R"({"family":"fma","m":40,"n":60,"grid":31,"seed":5,"kappa1":0.7,"a":1.2,"coeff_dist":"t5"})");
    const auto spec = scenario_from_json(j);
    CHECK(spec.design == Design::TwoSample);
    CHECK(spec.coeff_dist == CoeffDist::T5Scaled);
    auto out = to_json(spec);
    CHECK(out["basis"]["count"] == 21);
    out.erase("basis");
    const auto again = scenario_from_json(out);
    CHECK(to_json(again) == to_json(spec));
  }
  SUBCASE("defaults by family") {
    CHECK(scenario_from_json({{"family", "far1"}}).design == Design::Series);
    CHECK(scenario_from_json({{"family", "brownian_cp"}, {"n", 100}, {"k_star", 51}}).design ==
          Design::Series);
    CHECK(scenario_from_json({{"family", "fiid"}}).design == Design::TwoSample);
  }
  SUBCASE("strict errors") {
    CHECK_THROWS_AS(scenario_from_json({{"family", "fiid"}, {"bogus", 1}}), InvalidInput);
    CHECK_THROWS_AS(scenario_from_json({{"family", "nope"}}), InvalidInput);
    CHECK_THROWS_AS(scenario_from_json({{"family", "far1"}, {"setting", 4}}), InvalidInput);
    CHECK_THROWS_AS(scenario_from_json({{"family", "fma"}, {"coeff_dist", "cauchy"}}),
                    InvalidInput);
    CHECK_THROWS_AS(scenario_from_json({{"family", "fiid"}, {"m", "ten"}}), InvalidInput);
    CHECK_THROWS_AS(scenario_from_json(nlohmann::json::array()), InvalidInput);
  }
}
