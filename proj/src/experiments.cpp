// Copyright 2026 The covop Authors.
// SPDX-License-Identifier: Apache-2.0

#include "experiments.hpp"

#include <chrono>
#include <cmath>
#include <mutex>
#include <set>
#include <sstream>

#include "bootstrap.hpp"
#include "csv_io.hpp"
#include "errors.hpp"

namespace covop {

namespace {

const std::set<std::string> kTestKeys = {"kind", "delta",      "l1",   "l2",
                                         "block_len", "replicates", "extremal_const", "vartheta"};

bool is_two_sample(TestKind k) { return k == TestKind::TsClassical || k == TestKind::TsRelevant; }
bool is_relevant(TestKind k) { return k == TestKind::TsRelevant || k == TestKind::CpRelevant; }

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

struct ResolvedPoint {
  ScenarioSpec scenario;
  TestSpec test;
  std::string label;
  nlohmann::json scenario_json;
  nlohmann::json test_json;
};

ResolvedPoint resolve_point(const ExperimentPlan& plan, const nlohmann::json& overrides,
                            std::size_t index) {
  nlohmann::json scenario = plan.scenario;
  nlohmann::json test = plan.test;
  ResolvedPoint out;
  out.label = "point " + std::to_string(index);
  for (const auto& [key, value] : overrides.items()) {
    if (key == "label") {
      out.label = value.get<std::string>();
    } else if (kTestKeys.count(key)) {
      test[key] = value;
    } else {
      scenario[key] = value;
    }
  }
  if (!scenario.contains("design")) {
    scenario["design"] = is_two_sample(test_spec_from_json(test).kind) ? "two_sample" : "series";
  }
  out.scenario = scenario_from_json(scenario);
  out.test = test_spec_from_json(test);
  out.scenario_json = to_json(out.scenario);
  out.scenario_json.erase("seed");
  out.test_json = to_json(out.test);
  return out;
}

void require(bool ok, const std::string& message) {
  if (!ok) {
    throw InvalidInput(message);
  }
}

} // namespace

const char* to_string(TestKind kind) {
  switch (kind) {
  case TestKind::TsClassical:
    return "ts_classical";
  case TestKind::TsRelevant:
    return "ts_relevant";
  case TestKind::CpClassical:
    return "cp_classical";
  case TestKind::CpRelevant:
    return "cp_relevant";
  }
  return "unknown";
}

TestKind test_kind_from_string(const std::string& name) {
  for (TestKind k :
       {TestKind::TsClassical, TestKind::TsRelevant, TestKind::CpClassical, TestKind::CpRelevant}) {
    if (name == to_string(k)) {
      return k;
    }
  }
  throw InvalidInput("unknown test kind '" + name + "'");
}

TestSpec test_spec_from_json(const nlohmann::json& j) {
  require(j.is_object(), "test must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    require(kTestKeys.count(key) > 0, "unknown test key '" + key + "'");
  }
  try {
    TestSpec t;
    t.kind = test_kind_from_string(j.at("kind").get<std::string>());
    t.delta = j.value("delta", t.delta);
    t.l1 = j.value("l1", t.l1);
    t.l2 = j.value("l2", t.l2);
    t.block_len = j.value("block_len", t.block_len);
    t.replicates = j.value("replicates", t.replicates);
    t.extremal_const = j.value("extremal_const", t.extremal_const);
    t.vartheta = j.value("vartheta", t.vartheta);
    if (is_relevant(t.kind)) {
      require(t.delta > 0.0, std::string(to_string(t.kind)) + " needs delta > 0");
    } else {
      require(t.delta == 0.0, std::string(to_string(t.kind)) + " takes no delta");
    }
    return t;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("malformed test: ") + e.what());
  }
}

nlohmann::json to_json(const TestSpec& t) {
  nlohmann::json j;
  j["kind"] = to_string(t.kind);
  if (is_relevant(t.kind)) {
    j["delta"] = t.delta;
    j["extremal_const"] = t.extremal_const;
  }
  if (is_two_sample(t.kind)) {
    j["l1"] = t.l1;
    j["l2"] = t.l2;
  } else {
    j["block_len"] = t.block_len;
    j["vartheta"] = t.vartheta;
  }
  j["replicates"] = t.replicates;
  return j;
}

std::vector<nlohmann::json> default_power_sweep() {
  std::vector<nlohmann::json> out;
  for (int tenths = 16; tenths <= 38; ++tenths) {
    out.push_back({{"a", std::sqrt(tenths / 10.0)}});
  }
  return out;
}

void ExperimentPlan::validate() const {
  require(runs >= 1, "runs must be >= 1");
  require(!alphas.empty(), "at least one alpha is required");
  for (double a : alphas) {
    require(a > 0.0 && a < 1.0, "alpha must lie in (0,1)");
  }
  require(scenario.is_object(), "scenario must be a JSON object");
  test_spec_from_json(test);
  for (const auto& ref : reference) {
    require(ref.point < sweep.size(), "reference names sweep point " + std::to_string(ref.point) +
                                          " but the sweep has " + std::to_string(sweep.size()));
  }
  if (power_curve) {
    double prev = 0.0;
    int direction = 0;
    for (std::size_t i = 0; i < sweep.size(); ++i) {
      const auto& s = sweep[i];
      const double a = s.contains("a") ? s["a"].get<double>() : scenario.value("a", 1.0);
      if (i > 0) {
        const int d = a > prev ? 1 : (a < prev ? -1 : 0);
        require(d != 0 && (direction == 0 || d == direction),
                "power-curve sweep values of a must be strictly monotone");
        direction = d;
      }
      prev = a;
    }
  }
}

ExperimentPlan plan_from_json(const nlohmann::json& j) {
  require(j.is_object(), "plan must be a JSON object");
  static const std::set<std::string> known = {"name",   "scenario",  "test",      "sweep",
                                              "runs",   "alphas",    "base_seed", "reference",
                                              "power_curve"};
  for (const auto& [key, value] : j.items()) {
    require(known.count(key) > 0, "unknown plan key '" + key + "'");
  }
  try {
    ExperimentPlan p;
    p.name = j.value("name", p.name);
    p.scenario = j.at("scenario");
    p.test = j.at("test");
    p.runs = j.value("runs", p.runs);
    if (j.contains("alphas")) {
      p.alphas = j["alphas"].get<std::vector<double>>();
    }
    p.base_seed = j.value("base_seed", p.base_seed);
    p.power_curve = j.value("power_curve", false);
    if (j.contains("sweep")) {
      require(j["sweep"].is_array(), "sweep must be an array");
      for (const auto& s : j["sweep"]) {
        require(s.is_object(), "sweep entries must be objects");
        p.sweep.push_back(s);
      }
    } else if (p.power_curve) {
      p.sweep = default_power_sweep();
    } else {
      p.sweep.push_back(nlohmann::json::object());
    }
    if (j.contains("reference")) {
      for (const auto& r : j["reference"]) {
        p.reference.push_back(
            {r.at("point").get<std::size_t>(), r.at("alpha").get<double>(), r.at("value").get<double>()});
      }
    }
    p.validate();
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("malformed plan: ") + e.what());
  }
}

nlohmann::json to_json(const ExperimentPlan& p) {
  nlohmann::json j;
  j["name"] = p.name;
  j["scenario"] = p.scenario;
  j["test"] = p.test;
  j["sweep"] = p.sweep;
  j["runs"] = p.runs;
  j["alphas"] = p.alphas;
  j["base_seed"] = p.base_seed;
  j["power_curve"] = p.power_curve;
  auto refs = nlohmann::json::array();
  for (const auto& r : p.reference) {
    refs.push_back({{"point", r.point}, {"alpha", r.alpha}, {"value", r.percent}});
  }
  j["reference"] = refs;
  return j;
}

RunSeeds run_seeds(std::uint64_t base_seed, std::size_t run) {
  const std::uint64_t run_seed = derive_seed({base_seed, static_cast<std::uint64_t>(run)});
  return {derive_seed({run_seed, kDataStream}), derive_seed({run_seed, kBootstrapStream})};
}

std::vector<bool> single_run(const ScenarioSpec& scenario, const TestSpec& test,
                             const std::vector<double>& alphas, const RunSeeds& seeds) {
  ScenarioSpec s = scenario;
  s.seed = seeds.data;
  std::vector<bool> out;
  out.reserve(alphas.size());
  if (is_two_sample(test.kind)) {
    const auto [x, y] = simulate_two_sample(s);
    TwoSampleConfig cfg;
    cfg.alpha = alphas.front();
    cfg.delta = test.kind == TestKind::TsRelevant ? test.delta : 0.0;
    cfg.block_len_1 = test.l1;
    cfg.block_len_2 = test.l2;
    cfg.replicates = test.replicates;
    cfg.extremal_const = test.extremal_const;
    cfg.seed = seeds.bootstrap;
    cfg.workers = 1;
    const auto analysis = analyze_two_sample(x, y, cfg);
    for (double a : alphas) {
      out.push_back(analysis.reject(cfg, a));
    }
  } else {
    const auto sample = simulate_series(s);
    ChangePointConfig cfg;
    cfg.alpha = alphas.front();
    cfg.delta = test.kind == TestKind::CpRelevant ? test.delta : 0.0;
    cfg.block_len = test.block_len;
    cfg.replicates = test.replicates;
    cfg.extremal_const = test.extremal_const;
    cfg.vartheta = test.vartheta;
    cfg.seed = seeds.bootstrap;
    cfg.workers = 1;
    const auto analysis = analyze_change_point(sample, cfg);
    for (double a : alphas) {
      out.push_back(analysis.reject(cfg, a));
    }
  }
  return out;
}

ExperimentResult run_experiment(const ExperimentPlan& plan, unsigned workers) {
  plan.validate();
  const auto start = std::chrono::steady_clock::now();
  ExperimentResult result;
  result.plan = plan;
  for (std::size_t p = 0; p < plan.sweep.size(); ++p) {
    const auto point_start = std::chrono::steady_clock::now();
    PointResult point;
    point.index = p;
    point.overrides = plan.sweep[p];
    std::optional<ResolvedPoint> resolved;
    try {
      resolved = resolve_point(plan, plan.sweep[p], p);
      point.label = resolved->label;
      point.scenario = resolved->scenario_json;
      point.test = resolved->test_json;
      point.population = to_json(population_facts(resolved->scenario));
    } catch (const Error& e) {
      point.label = "point " + std::to_string(p);
      point.failure = e.what();
    }
    if (resolved) {
      const std::size_t na = plan.alphas.size();
      std::vector<char> flags(plan.runs * na, 0);
      std::vector<std::string> errors(plan.runs);
      std::vector<char> failed(plan.runs, 0);
      parallel_for(plan.runs, workers, [&](std::size_t r) {
        try {
          const auto f = single_run(resolved->scenario, resolved->test, plan.alphas,
                                    run_seeds(plan.base_seed, r));
          for (std::size_t a = 0; a < na; ++a) {
            flags[r * na + a] = f[a] ? 1 : 0;
          }
        } catch (const std::exception& e) {
          failed[r] = 1;
          errors[r] = e.what();
        }
      });
      for (std::size_t r = 0; r < plan.runs; ++r) {
        if (failed[r]) {
          point.failure = "run " + std::to_string(r) + ": " + errors[r];
          break;
        }
      }
      if (!point.failure) {
        for (std::size_t a = 0; a < na; ++a) {
          CellResult cell;
          cell.alpha = plan.alphas[a];
          cell.runs = plan.runs;
          for (std::size_t r = 0; r < plan.runs; ++r) {
            cell.rejections += static_cast<std::size_t>(flags[r * na + a]);
          }
          const double runs = static_cast<double>(plan.runs);
          cell.frequency = static_cast<double>(cell.rejections) / runs;
          cell.standard_error = std::sqrt(cell.frequency * (1.0 - cell.frequency) / runs);
          for (const auto& ref : plan.reference) {
            if (ref.point == p && std::abs(ref.alpha - cell.alpha) < 1e-12) {
              cell.reference_percent = ref.percent;
              const double diff = std::abs(cell.frequency - ref.percent / 100.0);
              if (cell.standard_error > 0.0) {
                cell.diff_over_se = diff / cell.standard_error;
              } else if (diff == 0.0) {
                cell.diff_over_se = 0.0;
              }
            }
          }
          point.cells.push_back(cell);
        }
      }
    }
    point.runtime_seconds = seconds_since(point_start);
    result.points.push_back(std::move(point));
  }
  result.runtime_seconds = seconds_since(start);
  return result;
}

nlohmann::json to_json(const ExperimentResult& result) {
  nlohmann::json j;
  j["schema"] = 1;
  j["plan"] = to_json(result.plan);
  j["notes"] = {"suprema are maxima over the stored grid",
                "curves are generated directly on the grid without basis smoothing"};
  auto points = nlohmann::json::array();
  for (const auto& p : result.points) {
    nlohmann::json pj;
    pj["index"] = p.index;
    pj["label"] = p.label;
    pj["overrides"] = p.overrides;
    pj["scenario"] = p.scenario;
    pj["test"] = p.test;
    if (!p.population.empty()) {
      pj["population"] = p.population;
    }
    if (p.failure) {
      pj["failure"] = *p.failure;
    }
    auto cells = nlohmann::json::array();
    for (const auto& c : p.cells) {
      nlohmann::json cj;
      cj["alpha"] = c.alpha;
      cj["rejections"] = c.rejections;
      cj["runs"] = c.runs;
      cj["frequency"] = c.frequency;
      cj["standard_error"] = c.standard_error;
      if (c.reference_percent) {
        cj["reference_percent"] = *c.reference_percent;
        cj["abs_diff_over_se"] =
            c.diff_over_se ? nlohmann::json(*c.diff_over_se) : nlohmann::json(nullptr);
      }
      cells.push_back(cj);
    }
    pj["cells"] = cells;
    pj["runtime_seconds"] = p.runtime_seconds;
    points.push_back(pj);
  }
  j["points"] = points;
  j["runtime_seconds"] = result.runtime_seconds;
  return j;
}

std::string result_table_csv(const ExperimentResult& result) {
  std::ostringstream out;
  out << "point,label,alpha,rejections,runs,frequency,se,reference_percent,abs_diff_over_se,"
         "failure\n";
  auto quote = [](const std::string& s) {
    std::string q = "\"";
    for (char ch : s) {
      if (ch == '"') {
        q += '"';
      }
      q += ch;
    }
    return q + "\"";
  };
  for (const auto& p : result.points) {
    if (p.failure) {
      out << p.index << ',' << quote(p.label) << ",,,,,,,," << quote(*p.failure) << '\n';
      continue;
    }
    for (const auto& c : p.cells) {
      out << p.index << ',' << quote(p.label) << ',' << format_double(c.alpha) << ','
          << c.rejections << ',' << c.runs << ',' << format_double(c.frequency) << ','
          << format_double(c.standard_error) << ','
          << (c.reference_percent ? format_double(*c.reference_percent) : "") << ','
          << (c.diff_over_se ? format_double(*c.diff_over_se) : "") << ",\n";
    }
  }
  return out.str();
}

std::string power_curve_csv(const ExperimentResult& result) {
  std::ostringstream out;
  out << "a,alpha,frequency,se\n";
  for (const auto& p : result.points) {
    if (p.failure || !p.scenario.contains("a")) {
      continue;
    }
    const double a = p.scenario["a"].get<double>();
    for (const auto& c : p.cells) {
      out << format_double(a) << ',' << format_double(c.alpha) << ','
          << format_double(c.frequency) << ',' << format_double(c.standard_error) << '\n';
    }
  }
  return out.str();
}

} // namespace covop
