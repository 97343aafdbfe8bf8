// Copyright 2026 The covop Authors.
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <algorithm>
#include <atomic>
#include <numeric>

#include "bootstrap.hpp"
#include "errors.hpp"
#include "helpers.hpp"

using namespace covop;

namespace {

std::vector<Surface> scalars(std::initializer_list<double> values) {
  std::vector<Surface> out;
  for (double v : values) {
    out.emplace_back(1, std::vector<double>{v});
  }
  return out;
}

} // namespace

TEST_CASE("block_sums") {
  SUBCASE("scalar example with l = 1") {
    const auto b = block_sums(scalars({1.0, 2.0, 3.0}), 1);
    REQUIRE(b.size() == 3);
    CHECK(b[0](0, 0) == -1.0);
    CHECK(b[1](0, 0) == 0.0);
    CHECK(b[2](0, 0) == 1.0);
  }
  SUBCASE("l = n gives a single zero block") {
    const auto s = testing::to_surfaces(oracle::squares(testing::to_curves(testing::random_sample(5, 3, 4))));
    const auto b = block_sums(s, 5);
    REQUIRE(b.size() == 1);
    for (double v : b[0].values()) {
      CHECK(std::abs(v) < 1e-12);
    }
  }
  SUBCASE("l = 1 blocks sum to zero") {
    const auto s = testing::to_surfaces(oracle::squares(testing::to_curves(testing::random_sample(7, 3, 5))));
    const auto b = block_sums(s, 1);
    for (std::size_t p = 0; p < 9; ++p) {
      double total = 0.0;
      for (const auto& blk : b) {
        total += blk.values()[p];
      }
      CHECK(std::abs(total) < 1e-12);
    }
  }
  SUBCASE("matches the triple-loop oracle for n = 8, l = 3") {
    const auto fields = oracle::squares(testing::to_curves(testing::random_sample(8, 3, 6)));
    const auto b = block_sums(testing::to_surfaces(fields), 3);
    const auto o = oracle::block_sums(fields, 3);
    REQUIRE(b.size() == o.size());
    for (std::size_t k = 0; k < b.size(); ++k) {
      CHECK(testing::max_abs_diff(b[k], o[k]) < 1e-12);
    }
  }
  SUBCASE("invalid block lengths") {
    CHECK_THROWS_AS(block_sums(scalars({1.0, 2.0}), 0), InvalidInput);
    CHECK_THROWS_AS(block_sums(scalars({1.0, 2.0}), 3), InvalidInput);
  }
}

TEST_CASE("quantile rule") {
  std::vector<double> v(200);
  std::iota(v.begin(), v.end(), 1.0);
  std::shuffle(v.begin(), v.end(), std::mt19937_64(3));
  const BootstrapDraws draws(v);
  CHECK(quantile(draws, 0.05) == 190.0);
  CHECK(quantile(draws, 0.01) == 198.0);
  CHECK(quantile(draws, 0.1) == 180.0);
  CHECK(quantile(draws, 0.004) == 199.0);
  CHECK(quantile(draws, 1e-12) == 200.0);
  CHECK(quantile(draws, 0.999) == 1.0);    // index clamped to 1

  CHECK(quantile(BootstrapDraws({4.5}), 0.3) == 4.5);

  const auto random = testing::normals(50, 9);
  auto sorted = random;
  std::sort(sorted.begin(), sorted.end());
  CHECK(quantile(BootstrapDraws(random), 0.1) == sorted[44]);  // floor(50 * 0.9) = 45

  double prev = std::numeric_limits<double>::infinity();
  for (double a = 0.001; a < 1.0; a += 0.013) {
    const double q = quantile(draws, a);
    CHECK(q <= prev);
    prev = q;
  }
  CHECK_THROWS_AS(quantile(draws, 0.0), InvalidInput);
  CHECK_THROWS_AS(quantile(draws, 1.0), InvalidInput);
  CHECK_THROWS_AS(BootstrapDraws({}), InvalidInput);
}

TEST_CASE("gaussian multipliers") {
  CHECK(gaussian_multipliers({1, 1, MultiplierTag::First}, 0).empty());
  const auto a = gaussian_multipliers({77, 3, MultiplierTag::First}, 100);
  const auto b = gaussian_multipliers({77, 3, MultiplierTag::First}, 100);
  CHECK(a == b);
  CHECK(a != gaussian_multipliers({77, 3, MultiplierTag::Second}, 100));
  CHECK(a != gaussian_multipliers({77, 4, MultiplierTag::First}, 100));
  CHECK(a != gaussian_multipliers({78, 3, MultiplierTag::First}, 100));

  const std::size_t count = 100000;
  const auto v = gaussian_multipliers({5, 1, MultiplierTag::Series}, count);
  double mean = 0.0;
  for (double x : v) {
    mean += x;
  }
  mean /= count;
  double var = 0.0;
  for (double x : v) {
    var += (x - mean) * (x - mean);
  }
  var /= count - 1;
  CHECK(std::abs(mean) < 4.0 / std::sqrt(static_cast<double>(count)));
  CHECK(std::abs(var - 1.0) < 0.05);
}

TEST_CASE("replicate streams are uncorrelated") {
  // Statistic: mean of 20 multipliers, for replicates 1 and 2, over 500 seeds.
  std::vector<double> s1, s2;
  for (std::uint64_t seed = 0; seed < 500; ++seed) {
    auto mean = [](const std::vector<double>& v) {
      return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    };
    s1.push_back(mean(gaussian_multipliers({seed, 1, MultiplierTag::First}, 20)));
    s2.push_back(mean(gaussian_multipliers({seed, 2, MultiplierTag::First}, 20)));
  }
  auto corr = [](const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      sxy += (x[i] - mx) * (y[i] - my);
      sxx += (x[i] - mx) * (x[i] - mx);
      syy += (y[i] - my) * (y[i] - my);
    }
    return sxy / std::sqrt(sxx * syy);
  };
  CHECK(std::abs(corr(s1, s2)) < 0.1);
}

TEST_CASE("derive_seed") {
  CHECK(derive_seed({1, 2}) == derive_seed({1, 2}));
  CHECK(derive_seed({1, 2}) != derive_seed({2, 1}));
  CHECK(derive_seed({1}) != derive_seed({1, 0}));
}

TEST_CASE("parallel_for visits every index once and reports the lowest failure") {
  for (unsigned workers : {1u, 2u, 4u}) {
    std::vector<std::atomic<int>> hits(1000);
    parallel_for(1000, workers, [&](std::size_t i) { hits[i]++; });
    for (auto& h : hits) {
      CHECK(h.load() == 1);
    }
    try {
      parallel_for(100, workers, [&](std::size_t i) {
        if (i == 37 || i == 80) {
          throw InvalidInput("fail " + std::to_string(i));
        }
      });
      FAIL("expected an exception");
    } catch (const InvalidInput& e) {
      CHECK(std::string(e.what()) == "fail 37");
    }
  }
}
