// Copyright 2026 The covop Authors.
// SPDX-License-Identifier: Apache-2.0

// covop command-line front end. Talks to the library only through the C API.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>

#include "covop/covop.h"

namespace {

using nlohmann::json;

struct Failure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void check(covop_status status, const std::string& what) {
  if (status != COVOP_OK) {
    throw Failure(what + ": " + covop_status_string(status) + ": " + covop_last_error());
  }
}

struct SampleFree {
  void operator()(covop_sample* s) const { covop_sample_free(s); }
};
struct ReportFree {
  void operator()(covop_report* r) const { covop_report_free(r); }
};
struct ExperimentFree {
  void operator()(covop_experiment* e) const { covop_experiment_free(e); }
};
using SamplePtr = std::unique_ptr<covop_sample, SampleFree>;
using ReportPtr = std::unique_ptr<covop_report, ReportFree>;
using ExperimentPtr = std::unique_ptr<covop_experiment, ExperimentFree>;

std::string take_string(char* s) {
  std::string out(s ? s : "");
  covop_string_free(s);
  return out;
}

SamplePtr read_sample(const std::string& path) {
  covop_sample* s = nullptr;
  check(covop_sample_read_csv(path.c_str(), &s), "reading " + path);
  return SamplePtr(s);
}

std::string digest(const std::string& path) {
  char* out = nullptr;
  check(covop_file_digest(path.c_str(), &out), "hashing " + path);
  return take_string(out);
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// Manifest embedded in every JSON output. Only "timing" varies between
// identical invocations.
json manifest(const std::string& subcommand, const json& config, const json& inputs,
              std::chrono::steady_clock::time_point start) {
  return {{"subcommand", subcommand},
          {"config", config},
          {"inputs", inputs},
          {"version", covop_version()},
          {"timing", {{"timestamp", utc_timestamp()}, {"runtime_seconds", seconds_since(start)}}}};
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Failure("cannot open '" + path.string() + "' for writing");
  }
  out << text;
  if (!out.flush()) {
    throw Failure("write failure on '" + path.string() + "'");
  }
}

unsigned default_workers() {
  if (const char* env = std::getenv("COVOP_WORKERS")) {
    try {
      const long v = std::stol(env);
      if (v >= 1) {
        return static_cast<unsigned>(v);
      }
    } catch (const std::exception&) {
    }
    std::cerr << "warning: ignoring invalid COVOP_WORKERS='" << env << "'\n";
  }
  return 1;
}

void print_decision(const json& report) {
  std::cout << report.at("decision").get<std::string>() << '\n';
  std::cout << "statistic      " << report.at("statistic").dump() << '\n';
  std::cout << "critical value " << report.at("critical_value").dump() << '\n';
  std::cout << "quantile       " << report.at("quantile").dump() << '\n';
  if (report.contains("warnings")) {
    for (const auto& w : report["warnings"]) {
      std::cerr << "warning: " << w.get<std::string>() << '\n';
    }
  }
}

// ---------------------------------------------------------------------------

struct SimulateArgs {
  std::string family;
  std::string design;
  std::size_t count = 50;
  std::size_t count_y = 0;
  std::size_t grid = 101;
  std::uint64_t seed = 0;
  double c = 1.0, a = 1.0, s_star = 0.5, kappa1 = 0.0, kappa2 = 0.0, d1 = 0.0, d2 = 0.0;
  std::string coeff_dist = "gaussian";
  int setting = 1;
  std::size_t m_changed = 0;
  std::size_t k_star = 0;
  std::string out, out_y;
};

int run_simulate(const SimulateArgs& a, CLI::App& app) {
  json scenario = {{"family", a.family}, {"grid", a.grid}, {"seed", a.seed}};
  if (!a.design.empty()) {
    scenario["design"] = a.design;
  }
  const bool series = a.design == "series" ||
                      (a.design.empty() && (a.family == "far1" || a.family == "brownian_cp"));
  if (series) {
    scenario["n"] = a.count;
  } else {
    scenario["m"] = a.count;
    scenario["n"] = a.count_y ? a.count_y : a.count;
  }
  auto set_if = [&](const char* flag, const char* key, const json& value) {
    if (app.count(flag) > 0) {
      scenario[key] = value;
    }
  };
  set_if("--c", "c", a.c);
  set_if("--a", "a", a.a);
  set_if("--s-star", "s_star", a.s_star);
  set_if("--kappa1", "kappa1", a.kappa1);
  set_if("--kappa2", "kappa2", a.kappa2);
  set_if("--coeff-dist", "coeff_dist", a.coeff_dist);
  set_if("--setting", "setting", a.setting);
  set_if("--m-changed", "m_changed", a.m_changed);
  set_if("--d1", "d1", a.d1);
  set_if("--d2", "d2", a.d2);
  if (app.count("--k-star") > 0) {
    scenario["k_star"] = a.k_star;
  } else if (a.family == "brownian_cp") {
    scenario["k_star"] = a.count / 2 + 1;
  }

  covop_sample* first = nullptr;
  covop_sample* second = nullptr;
  check(covop_simulate(scenario.dump().c_str(), &first, &second), "simulate");
  SamplePtr x(first), y(second);
  check(covop_sample_write_csv(x.get(), a.out.c_str()), "writing " + a.out);
  std::cout << "wrote " << covop_sample_count(x.get()) << " curves to " << a.out << '\n';
  if (y) {
    std::string out_y = a.out_y;
    if (out_y.empty()) {
      const std::filesystem::path p(a.out);
      out_y = (p.parent_path() / (p.stem().string() + "_y" + p.extension().string())).string();
    }
    check(covop_sample_write_csv(y.get(), out_y.c_str()), "writing " + out_y);
    std::cout << "wrote " << covop_sample_count(y.get()) << " curves to " << out_y << '\n';
  }
  return 0;
}

struct TwoSampleArgs {
  std::string x, y, out;
  covop_two_sample_config config{};
};

int run_two_sample(const TwoSampleArgs& a) {
  const auto start = std::chrono::steady_clock::now();
  auto x = read_sample(a.x);
  auto y = read_sample(a.y);
  covop_report* raw = nullptr;
  check(covop_two_sample_test(x.get(), y.get(), &a.config, &raw), "two-sample test");
  ReportPtr report(raw);
  char* text = nullptr;
  check(covop_report_json(report.get(), &text), "report");
  json j = json::parse(take_string(text));
  const auto& c = a.config;
  json config = {{"alpha", c.alpha},
                 {"delta", c.delta},
                 {"l1", c.block_len_1},
                 {"l2", c.block_len_2},
                 {"replicates", c.replicates},
                 {"extremal_const", c.extremal_const},
                 {"seed", c.seed},
                 {"workers", c.workers}};
  json inputs = {{{"role", "x"}, {"path", a.x}, {"sha256", digest(a.x)}},
                 {{"role", "y"}, {"path", a.y}, {"sha256", digest(a.y)}}};
  j["manifest"] = manifest("two-sample", config, inputs, start);
  if (!a.out.empty()) {
    write_text(a.out, j.dump(2) + "\n");
  }
  print_decision(j);
  return 0;
}

struct ChangePointArgs {
  std::string data, out;
  covop_change_point_config config{};
};

int run_change_point(const ChangePointArgs& a) {
  const auto start = std::chrono::steady_clock::now();
  auto series = read_sample(a.data);
  covop_report* raw = nullptr;
  check(covop_change_point_test(series.get(), &a.config, &raw), "change-point test");
  ReportPtr report(raw);
  char* text = nullptr;
  check(covop_report_json(report.get(), &text), "report");
  json j = json::parse(take_string(text));
  const auto& c = a.config;
  json config = {{"alpha", c.alpha},
                 {"delta", c.delta},
                 {"block_len", c.block_len},
                 {"vartheta", c.vartheta},
                 {"replicates", c.replicates},
                 {"extremal_const", c.extremal_const},
                 {"seed", c.seed},
                 {"workers", c.workers}};
  json inputs = {{{"role", "data"}, {"path", a.data}, {"sha256", digest(a.data)}}};
  j["manifest"] = manifest("change-point", config, inputs, start);
  if (!a.out.empty()) {
    write_text(a.out, j.dump(2) + "\n");
  }
  print_decision(j);
  return 0;
}

struct ExperimentArgs {
  std::string plan, out;
  std::size_t runs = 0;
  unsigned workers = 1;
};

int run_experiment(const ExperimentArgs& a) {
  const auto start = std::chrono::steady_clock::now();
  std::ifstream in(a.plan, std::ios::binary);
  if (!in) {
    throw Failure("cannot open plan '" + a.plan + "'");
  }
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string plan_text = buf.str();

  covop_experiment* raw = nullptr;
  check(covop_experiment_run(plan_text.c_str(), a.runs, a.workers, &raw), "experiment");
  ExperimentPtr experiment(raw);

  char* text = nullptr;
  check(covop_experiment_json(experiment.get(), &text), "experiment results");
  json results = json::parse(take_string(text));
  check(covop_experiment_table_csv(experiment.get(), &text), "experiment table");
  const std::string table = take_string(text);
  check(covop_experiment_power_curve_csv(experiment.get(), &text), "power curve");
  const std::string curve = take_string(text);

  json config = {{"plan", a.plan}, {"workers", a.workers}};
  if (a.runs > 0) {
    config["runs"] = a.runs;
  }
  json inputs = {{{"role", "plan"}, {"path", a.plan}, {"sha256", digest(a.plan)}}};
  results["manifest"] = manifest("experiment", config, inputs, start);

  const std::filesystem::path dir(a.out);
  std::filesystem::create_directories(dir);
  write_text(dir / "results.json", results.dump(2) + "\n");
  write_text(dir / "results.csv", table);
  if (results["plan"].value("power_curve", false)) {
    write_text(dir / "power_curve.csv", curve);
  }

  std::size_t failed = 0;
  for (const auto& p : results["points"]) {
    if (p.contains("failure")) {
      ++failed;
      std::cerr << "point " << p["index"].get<std::size_t>() << " ("
                << p["label"].get<std::string>() << ") failed: " << p["failure"].get<std::string>()
                << '\n';
      continue;
    }
    for (const auto& c : p["cells"]) {
      std::cout << p["label"].get<std::string>() << "  alpha=" << c["alpha"].dump()
                << "  rejection rate=" << c["frequency"].dump() << " (se "
                << c["standard_error"].dump() << ")";
      if (c.contains("reference_percent")) {
        std::cout << "  reference=" << c["reference_percent"].dump() << "%";
      }
      std::cout << '\n';
    }
  }
  std::cout << "results written to " << dir.string() << '\n';
  return failed == results["points"].size() && failed > 0 ? 1 : 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"covop: sup-norm bootstrap tests for covariance operators of functional data.\n"
               "Curves are read from CSV: a header row of grid points in [0,1], then one row per "
               "curve."};
  app.set_version_flag("--version", std::string(covop_version()));
  app.require_subcommand(1);
  const unsigned workers = default_workers();

  // simulate
  SimulateArgs sim;
  auto* simulate = app.add_subcommand(
      "simulate", "Generate synthetic curves from one of the built-in scenario families.");
  simulate
      ->add_option("--family", sim.family,
                   "sincos_t5: Y = c times an independent copy of X, X a sum of 10 sine/cosine "
                   "terms with t5 "
                   "coefficients; fiid / nongauss_t5: 21 cubic B-splines with coefficient sd 1/i "
                   "(Gaussian or scaled t5), second sample or post-change curves multiplied by a; "
                   "fma: functional moving average e_i + kappa1 e_(i-1) + kappa2 e_(i-2) of "
                   "B-spline curves; far1: functional autoregression on 55 Fourier functions "
                   "with an added noise change after n/2; brownian_cp: Brownian motions "
                   "multiplied by 1 + d1 + d2 (1 + sin 2 pi t) from curve k* on")
      ->required()
      ->check(CLI::IsMember({"sincos_t5", "fiid", "nongauss_t5", "fma", "far1", "brownian_cp"}));
  simulate
      ->add_option("--design", sim.design,
                   "two_sample (two independent samples) or series (one sequence, possibly with a "
                   "change); default depends on the family")
      ->check(CLI::IsMember({"two_sample", "series"}));
  simulate->add_option("--count", sim.count, "Curves in the first sample, or series length")
      ->check(CLI::PositiveNumber);
  simulate->add_option("--count-y", sim.count_y, "Curves in the second sample (default: --count)");
  simulate->add_option("--grid", sim.grid, "Number of equidistant grid points on [0,1]")
      ->check(CLI::Range(std::size_t{2}, std::size_t{100000}));
  simulate->add_option("--seed", sim.seed, "Random seed");
  simulate->add_option("--c", sim.c, "sincos_t5: factor applied to the second sample");
  simulate->add_option("--a", sim.a, "Scale factor of the second sample / post-change curves");
  simulate->add_option("--s-star", sim.s_star,
                       "Series designs: curves after floor(s* n) are multiplied by a");
  simulate->add_option("--kappa1", sim.kappa1, "fma: lag-1 weight");
  simulate->add_option("--kappa2", sim.kappa2, "fma: lag-2 weight");
  simulate->add_option("--coeff-dist", sim.coeff_dist, "fma: gaussian or t5 coefficients")
      ->check(CLI::IsMember({"gaussian", "t5"}));
  simulate->add_option("--setting", sim.setting,
                       "far1 noise setting: 1 (sd 1 on 8 directions), 2 (sd 3^-i), 3 (sd 1/i)")
      ->check(CLI::Range(1, 3));
  simulate->add_option("--m-changed", sim.m_changed,
                       "far1: number of Fourier directions receiving extra noise after n/2");
  simulate->add_option("--d1", sim.d1, "brownian_cp: constant part of the scale change");
  simulate->add_option("--d2", sim.d2, "brownian_cp: sinusoidal part of the scale change");
  simulate->add_option("--k-star", sim.k_star,
                       "brownian_cp: first changed curve, 1-based (default n/2 + 1)");
  simulate->add_option("--out", sim.out, "Output CSV (first sample or series)")->required();
  simulate->add_option("--out-y", sim.out_y,
                       "Output CSV of the second sample (default: <out>_y.csv)");

  // two-sample
  TwoSampleArgs ts;
  covop_two_sample_config_init(&ts.config);
  ts.config.workers = workers;
  auto* two_sample = app.add_subcommand(
      "two-sample",
      "Compare the covariance operators of two samples. The statistic is the maximum over the "
      "grid of |C1(s,t) - C2(s,t)| for the empirical covariances (divisor n-1). Bootstrap "
      "replicates multiply centred block sums of the squared curves by independent standard "
      "normal weights; the classical test (delta = 0) rejects when the statistic exceeds the "
      "(1-alpha) bootstrap quantile of the maximal replicate divided by sqrt(m+n). The relevant "
      "test (delta > 0) restricts the replicates to the estimated sets where the difference is "
      "within c log(m+n)/sqrt(m+n) of its extreme, and rejects when the statistic exceeds "
      "delta + quantile/sqrt(m+n).");
  two_sample->add_option("--x", ts.x, "CSV with the first sample")->required();
  two_sample->add_option("--y", ts.y, "CSV with the second sample")->required();
  two_sample->add_option("--alpha", ts.config.alpha, "Nominal level in (0,1)")
      ->check(CLI::Range(0.0, 1.0));
  two_sample->add_option("--delta", ts.config.delta,
                         "Relevance threshold for the maximal covariance difference; 0 tests "
                         "exact equality")
      ->check(CLI::NonNegativeNumber);
  two_sample->add_option("--l1", ts.config.block_len_1, "Block length for the first sample")
      ->check(CLI::PositiveNumber);
  two_sample->add_option("--l2", ts.config.block_len_2, "Block length for the second sample")
      ->check(CLI::PositiveNumber);
  two_sample->add_option("--replicates", ts.config.replicates, "Number of bootstrap replicates")
      ->check(CLI::PositiveNumber);
  two_sample->add_option("--seed", ts.config.seed, "Seed of the bootstrap multipliers");
  two_sample->add_option("--extremal-const", ts.config.extremal_const,
                         "Constant c of the extremal-set threshold c log(m+n)/sqrt(m+n)")
      ->check(CLI::PositiveNumber);
  two_sample->add_option("--workers", ts.config.workers,
                         "Worker threads (results do not depend on it; default $COVOP_WORKERS "
                         "or 1)")
      ->check(CLI::PositiveNumber);
  two_sample->add_option("--out", ts.out, "Write the JSON report here");

  // change-point
  ChangePointArgs cp;
  covop_change_point_config_init(&cp.config);
  cp.config.workers = workers;
  auto* change_point = app.add_subcommand(
      "change-point",
      "Test one series of curves for a change in its covariance operator. The CUSUM field "
      "U(k/n) = (1/n)(sum of the first k squared centred curves - (k/n) sum of all) is "
      "maximised over k and the grid. The change location is the maximising k/n clamped to "
      "[vartheta, 1-vartheta]. Bootstrap replicates multiply centred block sums of the squared "
      "curves, with the estimated change removed, by standard normal weights. The classical "
      "test rejects when the statistic exceeds the bootstrap quantile divided by sqrt(n); the "
      "relevant test compares statistic / (s (1-s)) with delta + quantile/sqrt(n).");
  change_point->add_option("--data", cp.data, "CSV with the series, in time order")->required();
  change_point->add_option("--alpha", cp.config.alpha, "Nominal level in (0,1)")
      ->check(CLI::Range(0.0, 1.0));
  change_point->add_option("--delta", cp.config.delta,
                           "Relevance threshold for the size of the change; 0 tests for no "
                           "change")
      ->check(CLI::NonNegativeNumber);
  change_point->add_option("--block-len", cp.config.block_len, "Block length l")
      ->check(CLI::PositiveNumber);
  change_point->add_option("--vartheta", cp.config.vartheta,
                           "The change location is assumed in [vartheta, 1-vartheta]")
      ->check(CLI::Range(0.0, 0.5));
  change_point->add_option("--replicates", cp.config.replicates, "Number of bootstrap replicates")
      ->check(CLI::PositiveNumber);
  change_point->add_option("--seed", cp.config.seed, "Seed of the bootstrap multipliers");
  change_point->add_option("--extremal-const", cp.config.extremal_const,
                           "Constant c of the extremal-set threshold c log(n)/sqrt(n)")
      ->check(CLI::PositiveNumber);
  change_point->add_option("--workers", cp.config.workers,
                           "Worker threads (results do not depend on it; default "
                           "$COVOP_WORKERS or 1)")
      ->check(CLI::PositiveNumber);
  change_point->add_option("--out", cp.out, "Write the JSON report here");

  // experiment
  ExperimentArgs ex;
  ex.workers = workers;
  auto* experiment = app.add_subcommand(
      "experiment",
      "Run a Monte Carlo plan (JSON) and tabulate rejection frequencies with standard errors "
      "sqrt(p(1-p)/runs). Writes results.json, results.csv and, for power-curve plans, "
      "power_curve.csv.");
  experiment->add_option("--plan", ex.plan, "Plan file")->required()->check(CLI::ExistingFile);
  experiment->add_option("--runs", ex.runs, "Override the number of Monte Carlo runs");
  experiment->add_option("--workers", ex.workers,
                         "Worker threads (results do not depend on it; default $COVOP_WORKERS "
                         "or 1)")
      ->check(CLI::PositiveNumber);
  experiment->add_option("--out", ex.out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << '\n' << app.help();
    return 2;
  }

  try {
    if (*simulate) {
      return run_simulate(sim, *simulate);
    }
    if (*two_sample) {
      return run_two_sample(ts);
    }
    if (*change_point) {
      return run_change_point(cp);
    }
    if (*experiment) {
      return run_experiment(ex);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
