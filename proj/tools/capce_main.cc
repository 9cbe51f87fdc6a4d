/*
 * Copyright 2026 The CAPCE Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// capce: command-line front end for simulation, fitting, benchmarking and
// bootstrap inference.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "capce/config.h"
#include "capce/data_model.h"
#include "capce/error.h"
#include "capce/evaluation.h"
#include "capce/pipeline.h"
#include "capce/report.h"
#include "capce/scm_bench.h"
#include "capce/serialization.h"

namespace {

using namespace capce;

struct Globals {
  std::uint64_t seed = 1;
  std::string out_dir = "capce_out";
  std::string config_path;
  int threads = 0;
  RunConfig config;
};

struct DataFlags {
  std::string data, data1, data2;
  std::string treatment, outcome, instrument;
  std::vector<std::string> covariates;
  std::string setting;
  Eigen::Index n = 10000;

  void Add(CLI::App* app) {
    app->add_option("--data", data, "joint CSV (both samples share rows)");
    app->add_option("--data1", data1, "sample 1 CSV: treatment, covariates, instrument");
    app->add_option("--data2", data2, "sample 2 CSV: outcome, instrument");
    app->add_option("--treatment", treatment, "treatment column");
    app->add_option("--outcome", outcome, "outcome column");
    app->add_option("--instrument", instrument, "instrument column");
    app->add_option("--covariates", covariates, "covariate columns")->delimiter(',');
    app->add_option("--setting", setting, "simulate synthetic data from a setting (A-F)");
    app->add_option("--n", n, "synthetic sample size")->check(CLI::PositiveNumber);
  }

  bool synthetic() const { return !setting.empty(); }

  DataSource Source(const RunConfig& cfg) const {
    DataSource src = cfg.data;
    if (!data.empty() || !data1.empty() || !data2.empty()) {
      src.path = data;
      src.path1 = data1;
      src.path2 = data2;
    }
    if (!treatment.empty()) src.columns.treatment = treatment;
    if (!outcome.empty()) src.columns.outcome = outcome;
    if (!instrument.empty()) src.columns.instrument = instrument;
    if (!covariates.empty()) src.columns.covariates = covariates;
    const ColumnSchema fallback = DefaultSchema(
        src.columns.covariates.empty() ? 1
                                       : static_cast<Eigen::Index>(src.columns.covariates.size()));
    if (src.columns.treatment.empty()) src.columns.treatment = fallback.treatment;
    if (src.columns.outcome.empty()) src.columns.outcome = fallback.outcome;
    if (src.columns.instrument.empty()) src.columns.instrument = fallback.instrument;
    if (src.columns.covariates.empty()) src.columns.covariates = fallback.covariates;
    return src;
  }
};

struct EstimatorFlags {
  std::string method;
  std::string label;
  std::vector<std::string> terms;
  std::string basis_kind;
  int x_deg = -1;
  int w_deg = -1;
  std::optional<int> p_degree;
  std::optional<double> z0;
  std::vector<double> zeta_grid;

  void Add(CLI::App* app) {
    app->add_option("--method", method,
                    "p_capce | s_capce | rkhs_capce | ptsls | ntsls | kernel_iv");
    app->add_option("--estimator", label, "estimator label from the config file");
    app->add_option("--terms", terms, "explicit basis terms, e.g. 1,W,X")->delimiter(',');
    app->add_option("--basis-kind", basis_kind, "hermite_product | monomial_product");
    app->add_option("--x-deg", x_deg, "basis degree in x");
    app->add_option("--w-deg", w_deg, "basis degree in each covariate");
    app->add_option("--p-degree", p_degree, "instrument power-series length P");
    app->add_option("--z0", z0, "anchor instrument value");
    app->add_option("--zeta-grid", zeta_grid, "ridge multipliers to select from")
        ->delimiter(',');
  }

  EstimatorConfig Build(const RunConfig& cfg, int d, std::uint64_t seed) const {
    EstimatorConfig est;
    bool from_file = false;
    if (!label.empty() || (method.empty() && !cfg.estimators.empty())) {
      for (const auto& e : cfg.estimators) {
        if (label.empty() || e.label == label) {
          est = e;
          from_file = true;
          break;
        }
      }
      if (!from_file && !label.empty()) {
        Fail(ErrorCode::kInvalidArgument, "no estimator labelled '" + label + "' in config");
      }
    }
    if (!method.empty()) {
      const Method m = MethodFromName(method);
      if (!from_file || est.method != m) est = DefaultEstimator(m);
      from_file = false;
    } else if (!from_file) {
      est = DefaultEstimator(Method::kParametric);
    }
    if (!from_file) est.lambda.seed = seed;
    if (!terms.empty()) {
      est.basis = BasisSpec::ExplicitTerms(terms, d);
    } else if (!basis_kind.empty()) {
      if (x_deg < 0 || w_deg < 0) {
        Fail(ErrorCode::kInvalidArgument, "--basis-kind needs --x-deg and --w-deg");
      }
      if (basis_kind == "hermite_product") {
        est.basis = BasisSpec::HermiteProduct(x_deg, w_deg, d);
      } else if (basis_kind == "monomial_product") {
        est.basis = BasisSpec::MonomialProduct(x_deg, w_deg, d);
      } else {
        Fail(ErrorCode::kInvalidArgument, "unknown basis kind '" + basis_kind + "'");
      }
    }
    if (p_degree) est.p_degree = *p_degree;
    if (z0) est.z0 = *z0;
    if (!zeta_grid.empty()) est.zeta_grid = zeta_grid;
    est.Validate(d);
    return est;
  }
};

std::uint64_t SeedOr(const Globals& g, const CLI::App& root) {
  if (root.count("--seed") == 0 && g.config.seed) return *g.config.seed;
  return g.seed;
}

std::string OutDir(const Globals& g, const CLI::App& root) {
  if (root.count("--out-dir") == 0 && g.config.out_dir) return *g.config.out_dir;
  return g.out_dir;
}

void PrintCoefficients(const FittedEstimator& fit) {
  const auto labels = fit.CoefficientLabels();
  const auto coef = fit.Coefficients();
  std::cout << "method: " << MethodName(fit.method)
            << "  zeta: " << FormatFixed(fit.hyper().zeta, 6) << "\n";
  for (size_t i = 0; i < labels.size(); ++i) {
    std::cout << "  " << labels[i] << " = " << FormatFixed(coef(static_cast<Eigen::Index>(i)), 5)
              << "\n";
  }
  if (const auto& k = fit.hyper().kernel) {
    std::cout << "  kernel c1=" << k->c1 << " c2=" << k->c2 << " c3=" << k->c3
              << " c4=" << k->c4 << " lambda1=" << k->lambda1 << " lambda2=" << k->lambda2
              << " lambda3=" << k->lambda3 << " xi=" << k->xi << "\n";
  }
}

// Train and held-out data for selection: independent draws for synthetic
// settings, a seeded split otherwise.
struct Prepared {
  TwoSampleDataset full;
  std::optional<TwoSampleDataset> held_out;
};

Prepared PrepareData(const DataFlags& flags, const RunConfig& cfg, std::uint64_t seed) {
  if (flags.synthetic()) {
    const ScmSetting s = ScmSetting::FromName(flags.setting);
    return {Simulate(s, flags.n, seed), Simulate(s, flags.n, DeriveSeed(seed, 1))};
  }
  const DataSource src = flags.Source(cfg);
  if (src.empty()) Fail(ErrorCode::kInvalidArgument, "give --data, --data1/--data2 or --setting");
  return {src.Load(), std::nullopt};
}

int RunSimulate(const Globals& g, const CLI::App& root, const std::string& setting,
                Eigen::Index n, const std::string& out, const std::string& out1,
                const std::string& out2) {
  const ScmSetting s = ScmSetting::FromName(setting);
  const auto data = Simulate(s, n, SeedOr(g, root));
  const ColumnSchema schema = DefaultSchema(1);
  for (const auto* path : {&out, &out1, &out2}) {
    const auto parent = std::filesystem::path(*path).parent_path();
    if (!parent.empty()) std::filesystem::create_directories(parent);
  }
  if (!out.empty()) WriteJointCsv(data, schema, out);
  if (!out1.empty()) WriteSample1Csv(data, schema, out1);
  if (!out2.empty()) WriteSample2Csv(data, schema, out2);
  if (out.empty() && out1.empty() && out2.empty()) {
    Fail(ErrorCode::kInvalidArgument, "give --out or --out1/--out2");
  }
  std::cerr << "simulated " << n << " rows of setting " << s.name << "\n";
  return 0;
}

int RunFit(const Globals& g, const CLI::App& root, const DataFlags& df,
           const EstimatorFlags& ef, double test_fraction, const std::string& model_out) {
  const std::uint64_t seed = SeedOr(g, root);
  Prepared data = PrepareData(df, g.config, seed);
  EstimatorConfig est = ef.Build(g.config, static_cast<int>(data.full.d()), seed);
  if (df.synthetic() && !est.z0) est.z0 = -1.0;
  FittedEstimator fit = data.held_out ? FitSelected(est, data.full, *data.held_out)
                                      : FitSplitRefit(est, data.full, test_fraction, seed);
  PrintCoefficients(fit);
  const std::string dir = OutDir(g, root);
  std::filesystem::create_directories(dir);
  const std::string model_path = model_out.empty() ? dir + "/model.json" : model_out;
  SaveEstimator(fit, model_path);
  WriteTextFile(dir + "/report.json", DiagnosticsJson(fit));
  if (df.synthetic()) {
    const double mse = EvaluateMse(fit.Surface(), ScmSetting::FromName(df.setting),
                                   DefaultEvalGrid());
    std::cout << "grid MSE vs true CAPCE: " << FormatFixed(mse) << "\n";
  }
  std::cerr << "wrote " << model_path << " and " << dir << "/report.json\n";
  return 0;
}

int RunBenchmarkCmd(const Globals& g, const CLI::App& root, const CLI::App& cmd,
                    std::vector<std::string> settings, std::vector<Eigen::Index> sizes,
                    int reps, std::vector<std::string> methods, std::vector<double> curve_w) {
  BenchmarkPlan plan = g.config.has_benchmark ? g.config.benchmark : BenchmarkPlan{};
  if (!g.config.has_benchmark) {
    plan.settings = {ScmSetting::FromName("A"), ScmSetting::FromName("B")};
    plan.sample_sizes = {1000, 10000};
    plan.estimators = DefaultEstimators();
  }
  if (cmd.count("--settings")) {
    plan.settings.clear();
    for (const auto& s : settings) plan.settings.push_back(ScmSetting::FromName(s));
  }
  if (cmd.count("--sizes")) plan.sample_sizes = sizes;
  if (cmd.count("--reps")) plan.replications = reps;
  if (cmd.count("--estimators")) {
    plan.estimators.clear();
    for (const auto& m : methods) {
      if (!m.empty()) plan.estimators.push_back(DefaultEstimator(MethodFromName(m)));
    }
  }
  if (cmd.count("--curve-w")) plan.curve_w = curve_w;
  if (root.count("--seed") || g.config.seed) plan.base_seed = SeedOr(g, root);
  if (root.count("--threads")) plan.threads = g.threads;
  plan.Validate();
  std::cerr << "benchmark: " << plan.settings.size() << " setting(s) x "
            << plan.sample_sizes.size() << " size(s) x " << plan.replications
            << " replication(s), " << plan.estimators.size() << " estimator(s)\n";
  const BenchmarkResults results = RunBenchmark(plan);
  const std::string dir = OutDir(g, root);
  EmitBenchmarkReport(results, dir);
  std::cout << BenchmarkMarkdown(results);
  std::cerr << "wrote " << dir << "/results.csv, results.md, report.json and curves\n";
  return 0;
}

int RunBootstrapCmd(const Globals& g, const CLI::App& root, const CLI::App& cmd,
                    const DataFlags& df, const EstimatorFlags& ef, int resamples,
                    double test_fraction, std::vector<double> table_x,
                    std::vector<double> table_w) {
  const std::uint64_t seed = SeedOr(g, root);
  Prepared data = PrepareData(df, g.config, seed);
  EstimatorConfig est = ef.Build(g.config, static_cast<int>(data.full.d()), seed);
  if (df.synthetic() && !est.z0) est.z0 = -1.0;
  BootstrapOptions opts = g.config.bootstrap;
  if (cmd.count("--resamples")) opts.resamples = resamples;
  if (root.count("--seed") || g.config.seed) opts.seed = seed;
  if (root.count("--threads")) opts.threads = g.threads;
  if (!table_x.empty()) opts.table_x = table_x;
  if (!table_w.empty()) opts.table_w = table_w;
  FittedEstimator point = data.held_out ? FitSelected(est, data.full, *data.held_out)
                                        : FitSplitRefit(est, data.full, test_fraction, seed);
  std::cout << "point fit on the full data\n";
  PrintCoefficients(point);
  est.z0 = ResolveAnchor(est, data.full);
  std::cerr << "bootstrap: " << opts.resamples << " resamples\n";
  const BootstrapReport report = Bootstrap(data.full, est, point.hyper(), opts);
  const std::string dir = OutDir(g, root);
  EmitBootstrapReport(report, dir);
  SaveEstimator(point, dir + "/model.json");
  std::cout << BootstrapMarkdown(report);
  if (report.failed > 0) {
    std::cerr << report.failed << " resample(s) failed; first: "
              << report.failure_samples.front() << "\n";
  }
  return 0;
}

int RunEval(const Globals& g, const CLI::App& root, const std::string& model_path,
            const std::string& setting, std::vector<double> xs, std::vector<double> ws,
            const std::string& out) {
  const FittedEstimator fit = LoadEstimator(model_path);
  if (!setting.empty()) {
    const double mse = EvaluateMse(fit.Surface(), ScmSetting::FromName(setting),
                                   g.config.has_benchmark ? g.config.benchmark.grid
                                                          : DefaultEvalGrid());
    std::cout << "grid MSE vs true CAPCE (setting " << setting << "): " << FormatFixed(mse)
              << "\n";
  }
  if (xs.empty() && ws.empty()) return 0;
  if (xs.empty() || ws.empty()) Fail(ErrorCode::kInvalidArgument, "give both --x and --w");
  std::ostringstream csv;
  csv << "x,w,capce\n";
  for (double x : xs) {
    for (double w : ws) {
      csv << FormatFixed(x, 6) << "," << FormatFixed(w, 6) << ","
          << FormatFixed(fit.Evaluate(x, Eigen::VectorXd::Constant(1, w)), 6) << "\n";
    }
  }
  if (out.empty()) {
    std::cout << csv.str();
  } else {
    WriteTextFile(out, csv.str());
  }
  (void)root;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Conditional average partial causal effect estimation"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--seed", g.seed, "base random seed");
  app.add_option("--out-dir", g.out_dir, "output directory");
  app.add_option("--config", g.config_path, "TOML configuration file")->check(CLI::ExistingFile);
  app.add_option("--threads", g.threads, "worker threads (0: all cores)");

  auto* sim = app.add_subcommand("simulate", "draw a synthetic dataset");
  std::string sim_setting, sim_out, sim_out1, sim_out2;
  Eigen::Index sim_n = 10000;
  sim->add_option("--setting", sim_setting, "A-F")->required();
  sim->add_option("--n", sim_n, "rows")->check(CLI::PositiveNumber);
  sim->add_option("--out", sim_out, "joint CSV");
  sim->add_option("--out1", sim_out1, "sample 1 CSV");
  sim->add_option("--out2", sim_out2, "sample 2 CSV");

  auto* fit = app.add_subcommand("fit", "fit one estimator and save it as JSON");
  DataFlags fit_data;
  EstimatorFlags fit_est;
  double fit_frac = 0.2;
  std::string fit_model;
  fit_data.Add(fit);
  fit_est.Add(fit);
  fit->add_option("--test-fraction", fit_frac, "held-out share for selection on real data")
      ->check(CLI::Range(0.01, 0.99));
  fit->add_option("--model-out", fit_model, "model JSON path (default <out-dir>/model.json)");

  auto* bench = app.add_subcommand("benchmark", "synthetic MSE benchmark");
  std::vector<std::string> b_settings, b_methods;
  std::vector<Eigen::Index> b_sizes;
  std::vector<double> b_curve_w;
  int b_reps = 100;
  bench->add_option("--settings", b_settings, "settings, e.g. A,B")->delimiter(',');
  bench->add_option("--sizes", b_sizes, "sample sizes, e.g. 1000,10000")->delimiter(',');
  bench->add_option("--reps", b_reps, "replications")->check(CLI::PositiveNumber);
  bench->add_option("--estimators", b_methods, "methods to run")->delimiter(',');
  bench->add_option("--curve-w", b_curve_w, "covariate values for CAPCE curves")
      ->delimiter(',');

  auto* boot = app.add_subcommand("bootstrap", "bootstrap statistics on observational data");
  DataFlags boot_data;
  EstimatorFlags boot_est;
  int boot_b = 1000;
  double boot_frac = 0.2;
  std::vector<double> boot_x, boot_w;
  boot_data.Add(boot);
  boot_est.Add(boot);
  boot->add_option("--resamples", boot_b, "bootstrap resamples B")->check(CLI::PositiveNumber);
  boot->add_option("--test-fraction", boot_frac, "held-out share for selecting zeta")
      ->check(CLI::Range(0.01, 0.99));
  boot->add_option("--table-x", boot_x, "treatment values of the predicted table")
      ->delimiter(',');
  boot->add_option("--table-w", boot_w, "covariate values of the predicted table")
      ->delimiter(',');

  auto* eval = app.add_subcommand("eval", "evaluate a saved model");
  std::string eval_model, eval_setting, eval_out;
  std::vector<double> eval_x, eval_w;
  eval->add_option("--model", eval_model, "model JSON")->required()->check(CLI::ExistingFile);
  eval->add_option("--setting", eval_setting, "report grid MSE against this setting");
  eval->add_option("--x", eval_x, "treatment values")->delimiter(',');
  eval->add_option("--w", eval_w, "covariate values")->delimiter(',');
  eval->add_option("--out", eval_out, "CSV output (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (!g.config_path.empty()) g.config = LoadConfig(g.config_path);
    if (*sim) return RunSimulate(g, app, sim_setting, sim_n, sim_out, sim_out1, sim_out2);
    if (*fit) return RunFit(g, app, fit_data, fit_est, fit_frac, fit_model);
    if (*bench) {
      return RunBenchmarkCmd(g, app, *bench, b_settings, b_sizes, b_reps, b_methods, b_curve_w);
    }
    if (*boot) {
      return RunBootstrapCmd(g, app, *boot, boot_data, boot_est, boot_b, boot_frac, boot_x,
                             boot_w);
    }
    if (*eval) return RunEval(g, app, eval_model, eval_setting, eval_x, eval_w, eval_out);
  } catch (const capce::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
