// Copyright 2026 The covop Authors.
// SPDX-License-Identifier: Apache-2.0

#include "simulate.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include "bootstrap.hpp"
#include "errors.hpp"

namespace covop {

namespace {

using Engine = std::mt19937_64;

// sigma_i and sigma_eps of the three fAR(1) settings.
struct Far1Noise {
  std::vector<double> sigma;
  double sigma_eps;
};

Far1Noise far1_noise(Far1Setting setting) {
  Far1Noise out{std::vector<double>(kFourierCount, 0.0), 0.0};
  for (std::size_t i = 1; i <= kFourierCount; ++i) {
    double s = 0.0;
    switch (setting) {
    case Far1Setting::S1:
      s = i <= 8 ? 1.0 : 0.0;
      break;
    case Far1Setting::S2:
      s = std::pow(3.0, -static_cast<double>(i));
      break;
    case Far1Setting::S3:
      s = 1.0 / static_cast<double>(i);
      break;
    }
    out.sigma[i - 1] = s;
  }
  switch (setting) {
  case Far1Setting::S1:
    out.sigma_eps = 1.5;
    break;
  case Far1Setting::S2:
    out.sigma_eps = 0.3;
    break;
  case Far1Setting::S3:
    out.sigma_eps = 1.0;
    break;
  }
  return out;
}

// Adds sum_i coeff_i basis_i to `curve`.
void add_expansion(std::span<const double> coeff, const std::vector<double>& basis,
                   std::size_t g, std::span<double> curve) {
  for (std::size_t i = 0; i < coeff.size(); ++i) {
    const double c = coeff[i];
    if (c == 0.0) {
      continue;
    }
    const double* row = basis.data() + i * g;
    for (std::size_t t = 0; t < g; ++t) {
      curve[t] += c * row[t];
    }
  }
}

std::vector<double> bspline_curves(std::size_t count, const Grid& grid, Engine& engine,
                                   CoeffDist dist) {
  const std::size_t g = grid.size();
  const auto basis = bspline_basis(grid);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::student_t_distribution<double> t5(5.0);
  std::vector<double> values(count * g, 0.0);
  std::vector<double> coeff(kBSplineCount);
  for (std::size_t j = 0; j < count; ++j) {
    for (std::size_t i = 0; i < kBSplineCount; ++i) {
      const double ii = static_cast<double>(i + 1);
      coeff[i] = dist == CoeffDist::Gaussian ? normal(engine) / ii
                                             : t5(engine) * std::sqrt(3.0 / (5.0 * ii * ii));
    }
    add_expansion(coeff, basis, g, std::span<double>(values.data() + j * g, g));
  }
  return values;
}

std::vector<double> fma_curves(std::size_t count, double kappa1, double kappa2, const Grid& grid,
                               Engine& engine, CoeffDist dist) {
  const std::size_t g = grid.size();
  // rows 0, 1 are e_{-1}, e_0
  const auto e = bspline_curves(count + 2, grid, engine, dist);
  std::vector<double> values(count * g);
  for (std::size_t i = 0; i < count; ++i) {
    const double* e0 = e.data() + (i + 2) * g;
    const double* e1 = e.data() + (i + 1) * g;
    const double* e2 = e.data() + i * g;
    for (std::size_t t = 0; t < g; ++t) {
      values[i * g + t] = e0[t] + kappa1 * e1[t] + kappa2 * e2[t];
    }
  }
  return values;
}

void require(bool ok, const std::string& message) {
  if (!ok) {
    throw InvalidInput(message);
  }
}

} // namespace

std::vector<double> bspline_basis(const Grid& grid, std::size_t count, std::size_t order) {
  require(order >= 1 && count >= order, "B-spline basis needs count >= order >= 1");
  const std::size_t interior = count - order;
  std::vector<double> knots;
  knots.reserve(count + order);
  for (std::size_t i = 0; i < order; ++i) {
    knots.push_back(0.0);
  }
  for (std::size_t i = 1; i <= interior; ++i) {
    knots.push_back(static_cast<double>(i) / static_cast<double>(interior + 1));
  }
  for (std::size_t i = 0; i < order; ++i) {
    knots.push_back(1.0);
  }

  const std::size_t g = grid.size();
  std::vector<double> out(count * g, 0.0);
  std::vector<double> b(knots.size() - 1);
  for (std::size_t t = 0; t < g; ++t) {
    const double x = grid[t];
    std::fill(b.begin(), b.end(), 0.0);
    // Order-1 indicator; x = 1 belongs to the last non-empty interval.
    for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
      if (knots[i] < knots[i + 1] &&
          ((x >= knots[i] && x < knots[i + 1]) || (x == 1.0 && knots[i + 1] == 1.0))) {
        b[i] = 1.0;
        break;
      }
    }
    for (std::size_t k = 2; k <= order; ++k) {
      for (std::size_t i = 0; i + k < knots.size(); ++i) {
        double v = 0.0;
        const double left = knots[i + k - 1] - knots[i];
        const double right = knots[i + k] - knots[i + 1];
        if (left > 0.0) {
          v += (x - knots[i]) / left * b[i];
        }
        if (right > 0.0) {
          v += (knots[i + k] - x) / right * b[i + 1];
        }
        b[i] = v;
      }
    }
    for (std::size_t i = 0; i < count; ++i) {
      out[i * g + t] = b[i];
    }
  }
  return out;
}

std::vector<double> fourier_basis(const Grid& grid, std::size_t count) {
  const std::size_t g = grid.size();
  std::vector<double> out(count * g);
  const double root2 = std::numbers::sqrt2;
  for (std::size_t t = 0; t < g; ++t) {
    const double x = grid[t];
    out[t] = 1.0;
    for (std::size_t i = 1; i < count; ++i) {
      const double freq = static_cast<double>((i + 1) / 2);
      const double arg = 2.0 * std::numbers::pi * freq * x;
      out[i * g + t] = root2 * (i % 2 == 1 ? std::sin(arg) : std::cos(arg));
    }
  }
  return out;
}

std::pair<CurveSample, CurveSample> gen_sincos_t5(std::size_t m, std::size_t n, double c,
                                                  std::size_t grid, std::uint64_t seed) {
  require(m >= 2 && n >= 2, "sin/cos model needs m, n >= 2");
  const Grid g = Grid::equidistant(grid);
  constexpr std::size_t terms = 10;
  std::vector<double> sines(terms * grid), cosines(terms * grid);
  for (std::size_t k = 1; k <= terms; ++k) {
    const double kk = static_cast<double>(k);
    for (std::size_t t = 0; t < grid; ++t) {
      sines[(k - 1) * grid + t] = std::sqrt(2.0 / kk) * std::sin(std::numbers::pi * kk * g[t]);
      cosines[(k - 1) * grid + t] = std::cos(2.0 * std::numbers::pi * kk * g[t]) / std::sqrt(kk);
    }
  }
  auto draw = [&](std::size_t count, std::uint64_t s, double factor) {
    Engine engine(s);
    std::student_t_distribution<double> t5(5.0);
    std::vector<double> values(count * grid, 0.0);
    for (std::size_t j = 0; j < count; ++j) {
      double* curve = values.data() + j * grid;
      for (std::size_t k = 0; k < terms; ++k) {
        const double v = t5(engine);
        const double w = t5(engine);
        for (std::size_t t = 0; t < grid; ++t) {
          curve[t] += v * sines[k * grid + t] + w * cosines[k * grid + t];
        }
      }
      for (std::size_t t = 0; t < grid; ++t) {
        curve[t] *= factor;
      }
    }
    return CurveSample(g, std::move(values));
  };
  return {draw(m, derive_seed({seed, 1}), 1.0), draw(n, derive_seed({seed, 2}), c)};
}

CurveSample gen_bspline_errors(std::size_t count, std::size_t grid, std::uint64_t seed,
                               CoeffDist dist) {
  require(count >= 1, "need at least one curve");
  const Grid g = Grid::equidistant(grid);
  Engine engine(seed);
  return CurveSample(g, bspline_curves(count, g, engine, dist));
}

CurveSample gen_fma(std::size_t count, double kappa1, double kappa2, std::size_t grid,
                    std::uint64_t seed, CoeffDist dist) {
  require(count >= 1, "need at least one curve");
  const Grid g = Grid::equidistant(grid);
  Engine engine(seed);
  return CurveSample(g, fma_curves(count, kappa1, kappa2, g, engine, dist));
}

CurveSample gen_far1(std::size_t n, Far1Setting setting, std::size_t m_changed, std::size_t grid,
                     std::uint64_t seed) {
  require(n >= 2, "fAR(1) series needs n >= 2");
  require(m_changed <= kFourierCount, "m_changed exceeds the 55 basis directions");
  require(setting == Far1Setting::S1 || setting == Far1Setting::S2 || setting == Far1Setting::S3,
          "unknown fAR(1) setting");
  const Grid g = Grid::equidistant(grid);
  const auto basis = fourier_basis(g);
  const Far1Noise noise = far1_noise(setting);

  // Innovations and change noise use separate streams so that the
  // stationary part does not depend on m_changed.
  Engine engine(derive_seed({seed, 1}));
  Engine change_engine(derive_seed({seed, 2}));
  std::normal_distribution<double> normal(0.0, 1.0);

  constexpr std::size_t d = kFourierCount;
  std::vector<double> state(d, 0.0), next(d);
  auto step = [&] {
    // Psi: 0.4 on the diagonal, 0.1 on both off-diagonals.
    for (std::size_t i = 0; i < d; ++i) {
      double v = 0.4 * state[i];
      if (i > 0) {
        v += 0.1 * state[i - 1];
      }
      if (i + 1 < d) {
        v += 0.1 * state[i + 1];
      }
      next[i] = v + noise.sigma[i] * normal(engine);
    }
    state.swap(next);
  };
  for (std::size_t b = 0; b < kFar1BurnIn; ++b) {
    step();
  }

  const std::size_t change_after = n / 2; // floor(0.5 n)
  const double change_sd =
      m_changed > 0 ? noise.sigma_eps / std::sqrt(static_cast<double>(m_changed)) : 0.0;
  std::vector<double> values(n * grid, 0.0);
  std::vector<double> observed(d);
  for (std::size_t j = 0; j < n; ++j) {
    step();
    observed = state;
    if (j >= change_after) {
      for (std::size_t i = 0; i < m_changed; ++i) {
        observed[i] += change_sd * normal(change_engine);
      }
    }
    add_expansion(observed, basis, grid, std::span<double>(values.data() + j * grid, grid));
  }
  return CurveSample(g, std::move(values));
}

CurveSample gen_brownian_cp(std::size_t n, std::size_t k_star, double d1, double d2,
                            std::size_t grid, std::uint64_t seed) {
  require(n >= 1, "need at least one curve");
  require(k_star >= 1 && k_star <= n, "k* must lie in [1, n]");
  const Grid g = Grid::equidistant(grid);
  Engine engine(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> factor(grid);
  for (std::size_t t = 0; t < grid; ++t) {
    factor[t] = 1.0 + d1 + d2 * (1.0 + std::sin(2.0 * std::numbers::pi * g[t]));
  }
  std::vector<double> values(n * grid, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double* curve = values.data() + i * grid;
    double level = 0.0;
    curve[0] = 0.0;
    for (std::size_t t = 1; t < grid; ++t) {
      level += std::sqrt(g[t] - g[t - 1]) * normal(engine);
      curve[t] = level;
    }
    if (i + 1 >= k_star) {
      for (std::size_t t = 0; t < grid; ++t) {
        curve[t] *= factor[t];
      }
    }
  }
  return CurveSample(g, std::move(values));
}

CurveSample inject_scale_change(const CurveSample& sample, double a, double s_star) {
  require(s_star > 0.0 && s_star < 1.0, "s* must lie in (0,1)");
  const std::size_t n = sample.count();
  const auto first = static_cast<std::size_t>(std::floor(s_star * static_cast<double>(n)));
  std::vector<double> values(sample.values().begin(), sample.values().end());
  const std::size_t g = sample.grid_size();
  for (std::size_t j = first; j < n; ++j) {
    for (std::size_t t = 0; t < g; ++t) {
      values[j * g + t] *= a;
    }
  }
  return CurveSample(sample.grid(), std::move(values));
}

void ScenarioSpec::validate() const {
  require(grid >= 2, "grid needs at least 2 points");
  if (design == Design::TwoSample) {
    require(family == Family::SinCosT5 || family == Family::Fiid ||
                family == Family::NonGaussT5 || family == Family::Fma,
            std::string("family ") + to_string(family) + " has no two-sample design");
    require(m >= 2 && n >= 2, "two-sample designs need m, n >= 2");
  } else {
    require(family != Family::SinCosT5, "sincos_t5 only has a two-sample design");
    require(n >= 2, "series designs need n >= 2");
    if (family == Family::Fiid || family == Family::NonGaussT5 || family == Family::Fma) {
      require(s_star > 0.0 && s_star < 1.0, "s* must lie in (0,1)");
    }
  }
  if (family == Family::Far1) {
    require(m_changed <= kFourierCount, "m_changed exceeds the 55 basis directions");
  }
  if (family == Family::BrownianCp) {
    require(k_star >= 1 && k_star <= n, "k* must lie in [1, n]");
  }
}

PopulationFacts population_facts(const ScenarioSpec& spec) {
  PopulationFacts facts;
  double scale = 0.0;
  switch (spec.family) {
  case Family::Fiid:
  case Family::NonGaussT5:
    scale = 1.0;
    break;
  case Family::Fma:
    scale = 1.0 + spec.kappa1 * spec.kappa1 + spec.kappa2 * spec.kappa2;
    break;
  default:
    return facts;
  }
  // C1 - C2 = (1 - a^2) C1, largest in absolute value at (0,0).
  const double gap = 1.0 - spec.a * spec.a;
  facts.sup_norm_distance = std::abs(gap) * scale;
  if (gap > 0.0) {
    facts.extremal_plus = "{(0,0)}";
    facts.extremal_minus = "{}";
  } else if (gap < 0.0) {
    facts.extremal_plus = "{}";
    facts.extremal_minus = "{(0,0)}";
  }
  return facts;
}

std::pair<CurveSample, CurveSample> simulate_two_sample(const ScenarioSpec& spec) {
  ScenarioSpec s = spec;
  s.design = Design::TwoSample;
  s.validate();
  switch (spec.family) {
  case Family::SinCosT5:
    return gen_sincos_t5(spec.m, spec.n, spec.c, spec.grid, spec.seed);
  case Family::Fiid:
  case Family::NonGaussT5: {
    const auto dist = spec.family == Family::Fiid ? CoeffDist::Gaussian : CoeffDist::T5Scaled;
    auto x = gen_bspline_errors(spec.m, spec.grid, derive_seed({spec.seed, 1}), dist);
    auto y = gen_bspline_errors(spec.n, spec.grid, derive_seed({spec.seed, 2}), dist);
    return {std::move(x), y.scaled(spec.a)};
  }
  case Family::Fma: {
    auto x = gen_fma(spec.m, spec.kappa1, spec.kappa2, spec.grid, derive_seed({spec.seed, 1}),
                     spec.coeff_dist);
    auto y = gen_fma(spec.n, spec.kappa1, spec.kappa2, spec.grid, derive_seed({spec.seed, 2}),
                     spec.coeff_dist);
    return {std::move(x), y.scaled(spec.a)};
  }
  default:
    throw InvalidInput(std::string("family ") + to_string(spec.family) +
                       " has no two-sample design");
  }
}

CurveSample simulate_series(const ScenarioSpec& spec) {
  ScenarioSpec s = spec;
  s.design = Design::Series;
  s.validate();
  switch (spec.family) {
  case Family::Fiid:
  case Family::NonGaussT5: {
    const auto dist = spec.family == Family::Fiid ? CoeffDist::Gaussian : CoeffDist::T5Scaled;
    return inject_scale_change(gen_bspline_errors(spec.n, spec.grid, spec.seed, dist), spec.a,
                               spec.s_star);
  }
  case Family::Fma:
    return inject_scale_change(
        gen_fma(spec.n, spec.kappa1, spec.kappa2, spec.grid, spec.seed, spec.coeff_dist), spec.a,
        spec.s_star);
  case Family::Far1:
    return gen_far1(spec.n, spec.setting, spec.m_changed, spec.grid, spec.seed);
  case Family::BrownianCp:
    return gen_brownian_cp(spec.n, spec.k_star, spec.d1, spec.d2, spec.grid, spec.seed);
  default:
    throw InvalidInput(std::string("family ") + to_string(spec.family) + " has no series design");
  }
}

const char* to_string(Family family) {
  switch (family) {
  case Family::SinCosT5:
    return "sincos_t5";
  case Family::Fiid:
    return "fiid";
  case Family::NonGaussT5:
    return "nongauss_t5";
  case Family::Fma:
    return "fma";
  case Family::Far1:
    return "far1";
  case Family::BrownianCp:
    return "brownian_cp";
  }
  return "unknown";
}

Family family_from_string(const std::string& name) {
  for (Family f : {Family::SinCosT5, Family::Fiid, Family::NonGaussT5, Family::Fma, Family::Far1,
                   Family::BrownianCp}) {
    if (name == to_string(f)) {
      return f;
    }
  }
  throw InvalidInput("unknown scenario family '" + name + "'");
}

namespace {

Design default_design(Family f) {
  return f == Family::Far1 || f == Family::BrownianCp ? Design::Series : Design::TwoSample;
}

} // namespace

ScenarioSpec scenario_from_json(const nlohmann::json& j) {
  if (!j.is_object()) {
    throw InvalidInput("scenario must be a JSON object");
  }
  static const std::set<std::string> known = {
      "family", "design", "m",      "n",        "grid",      "seed", "c",  "a",  "s_star",
      "kappa1", "kappa2", "coeff_dist", "setting", "m_changed", "d1", "d2", "k_star",
      "basis",  "burn_in"};
  for (const auto& [key, value] : j.items()) {
    if (!known.count(key)) {
      throw InvalidInput("unknown scenario key '" + key + "'");
    }
  }
  try {
    ScenarioSpec s;
    s.family = family_from_string(j.at("family").get<std::string>());
    s.design = default_design(s.family);
    if (j.contains("design")) {
      const auto d = j["design"].get<std::string>();
      if (d == "two_sample") {
        s.design = Design::TwoSample;
      } else if (d == "series") {
        s.design = Design::Series;
      } else {
        throw InvalidInput("design must be 'two_sample' or 'series'");
      }
    }
    s.m = j.value("m", s.m);
    s.n = j.value("n", s.n);
    s.grid = j.value("grid", s.grid);
    s.seed = j.value("seed", s.seed);
    s.c = j.value("c", s.c);
    s.a = j.value("a", s.a);
    s.s_star = j.value("s_star", s.s_star);
    s.kappa1 = j.value("kappa1", s.kappa1);
    s.kappa2 = j.value("kappa2", s.kappa2);
    if (j.contains("coeff_dist")) {
      const auto d = j["coeff_dist"].get<std::string>();
      if (d == "gaussian") {
        s.coeff_dist = CoeffDist::Gaussian;
      } else if (d == "t5") {
        s.coeff_dist = CoeffDist::T5Scaled;
      } else {
        throw InvalidInput("coeff_dist must be 'gaussian' or 't5'");
      }
    }
    if (j.contains("setting")) {
      const int setting = j["setting"].get<int>();
      if (setting < 1 || setting > 3) {
        throw InvalidInput("fAR(1) setting must be 1, 2 or 3");
      }
      s.setting = static_cast<Far1Setting>(setting);
    }
    s.m_changed = j.value("m_changed", s.m_changed);
    s.d1 = j.value("d1", s.d1);
    s.d2 = j.value("d2", s.d2);
    s.k_star = j.value("k_star", s.k_star);
    s.validate();
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("malformed scenario: ") + e.what());
  }
}

nlohmann::json to_json(const PopulationFacts& facts) {
  nlohmann::json j = nlohmann::json::object();
  if (facts.sup_norm_distance) {
    j["sup_norm_distance"] = *facts.sup_norm_distance;
  }
  if (facts.extremal_plus) {
    j["extremal_plus"] = *facts.extremal_plus;
  }
  if (facts.extremal_minus) {
    j["extremal_minus"] = *facts.extremal_minus;
  }
  return j;
}

nlohmann::json to_json(const ScenarioSpec& s) {
  nlohmann::json j;
  j["family"] = to_string(s.family);
  j["design"] = s.design == Design::TwoSample ? "two_sample" : "series";
  if (s.design == Design::TwoSample) {
    j["m"] = s.m;
  }
  j["n"] = s.n;
  j["grid"] = s.grid;
  j["seed"] = s.seed;
  switch (s.family) {
  case Family::SinCosT5:
    j["c"] = s.c;
    break;
  case Family::Fma:
    j["kappa1"] = s.kappa1;
    j["kappa2"] = s.kappa2;
    j["coeff_dist"] = s.coeff_dist == CoeffDist::Gaussian ? "gaussian" : "t5";
    [[fallthrough]];
  case Family::Fiid:
  case Family::NonGaussT5:
    j["a"] = s.a;
    if (s.design == Design::Series) {
      j["s_star"] = s.s_star;
    }
    j["basis"] = {{"kind", "bspline"}, {"count", kBSplineCount}, {"order", kBSplineOrder}};
    break;
  case Family::Far1:
    j["setting"] = static_cast<int>(s.setting);
    j["m_changed"] = s.m_changed;
    j["burn_in"] = kFar1BurnIn;
    j["basis"] = {{"kind", "fourier"}, {"count", kFourierCount}};
    break;
  case Family::BrownianCp:
    j["d1"] = s.d1;
    j["d2"] = s.d2;
    j["k_star"] = s.k_star;
    break;
  }
  return j;
}

} // namespace covop
