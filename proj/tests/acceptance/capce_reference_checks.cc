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

// Single-run and summary-statistic comparisons against published reference
// values. Prints one PASS / FAIL / SKIPPED line per check; exits non-zero
// when any check fails.
//
//   capce_reference_checks [--wage PATH] [--threads N]

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include "capce/benchmark.h"
#include "capce/bootstrap.h"
#include "capce/data_model.h"
#include "capce/pipeline.h"
#include "capce/report.h"
#include "capce/scm_bench.h"
#include "checks.h"

namespace capce::acceptance {
namespace {

constexpr Eigen::Index kN = 10000;
int g_threads = 0;

BenchmarkPlan Plan(const std::vector<std::string>& settings, int reps,
                   const std::vector<Method>& methods) {
  BenchmarkPlan plan;
  for (const auto& s : settings) plan.settings.push_back(ScmSetting::FromName(s));
  plan.sample_sizes = {kN};
  plan.replications = reps;
  for (Method m : methods) plan.estimators.push_back(DefaultEstimator(m));
  plan.base_seed = 1;
  plan.curve_w = {};
  plan.threads = g_threads;
  return plan;
}

std::string Fmt(double v) { return FormatFixed(v, 3); }

const BenchmarkResults& SingleRun() {
  static const BenchmarkResults r = RunBenchmark(
      Plan({"A", "B"}, 1,
           {Method::kParametric, Method::kPtsls, Method::kSieve, Method::kNtsls, Method::kRkhs,
            Method::kKernelIv}));
  return r;
}

Outcome MseAtMost(const std::string& setting, Method m, double bound, double reference) {
  const double v = FindCell(SingleRun(), setting, kN, MethodName(m)).mean_mse;
  return Verdict(v <= bound, "MSE " + Fmt(v) + ", bound " + Fmt(bound) + ", reference " +
                                 Fmt(reference));
}

// Mean coefficients over 100 replications against reference means. The
// tolerance is three standard errors of a difference of two 100-replication
// means with the SD observed here.
Outcome MeansMatch(const std::string& setting, Method m, const std::vector<double>& reference) {
  const auto r = RunBenchmark(Plan({setting}, 100, {m}));
  const auto& c = FindCell(r, setting, kN, MethodName(m));
  const std::vector<std::string> labels = {"1", "W", "X"};
  bool ok = true;
  std::string detail;
  for (size_t i = 0; i < labels.size(); ++i) {
    const double mean = Coefficient(c, labels[i]);
    const double tol = 3 * std::sqrt(2.0) * Coefficient(c, labels[i], true) / std::sqrt(100.0);
    ok = ok && std::abs(mean - reference[i]) <= tol;
    detail += std::string(detail.empty() ? "" : ", ") + labels[i] + ": " + Fmt(mean) + " vs " +
              Fmt(reference[i]) + " (tol " + Fmt(tol) + ")";
  }
  return Verdict(ok, detail);
}

// Replication SDs; a sample SD from 100 draws has relative SE about
// 1 / sqrt(2 * 99), doubled for the difference of two such estimates.
Outcome SdsMatch(const std::string& setting, Method m, const std::vector<double>& reference) {
  const auto r = RunBenchmark(Plan({setting}, 100, {m}));
  const auto& c = FindCell(r, setting, kN, MethodName(m));
  const std::vector<std::string> labels = {"1", "W", "X"};
  bool ok = true;
  std::string detail;
  for (size_t i = 0; i < labels.size(); ++i) {
    const double sd = Coefficient(c, labels[i], true);
    const double tol = 3 * std::sqrt(2.0) * reference[i] / std::sqrt(2.0 * 99);
    ok = ok && std::abs(sd - reference[i]) <= tol;
    detail += std::string(detail.empty() ? "" : ", ") + labels[i] + ": " + Fmt(sd) + " vs " +
              Fmt(reference[i]) + " (tol " + Fmt(tol) + ")";
  }
  return Verdict(ok, detail);
}

const ColumnSchema kWage{"educ", "wage", "meduc", {"IQ"}};

Outcome WageRows(const std::string& path) {
  if (!std::filesystem::exists(path)) return {Status::kSkipped, "no wage data"};
  const auto data = LoadJointCsv(path, kWage);
  return Verdict(data.n1() == 857 && data.n2() == 857, "rows " + std::to_string(data.n1()));
}

Outcome WageBootstrap(const std::string& path) {
  if (!std::filesystem::exists(path)) return {Status::kSkipped, "no wage data"};
  const auto data = LoadJointCsv(path, kWage);
  auto cfg = DefaultEstimator(Method::kParametric);
  cfg.basis = BasisSpec::ExplicitTerms({"1", "W", "W2", "X", "XW", "XW2"});
  cfg.z0 = 8.0;
  const auto point = FitSplitRefit(cfg, data, 0.2, 1);
  BootstrapOptions opt;
  opt.resamples = 1000;
  opt.seed = 1;
  opt.threads = g_threads;
  opt.table_x = {8.0};
  opt.table_w = {100.0};
  const auto rep = Bootstrap(data, cfg, point.hyper(), opt);
  const double v = rep.predicted_mean(0, 0);
  return Verdict(std::abs(v - 49.645) <= 0.25 * 49.645 && rep.succeeded > 0,
                 "mean CAPCE(8, 100) " + Fmt(v) + " vs 49.645 over " +
                     std::to_string(rep.succeeded) + " resamples");
}

}  // namespace
}  // namespace capce::acceptance

int main(int argc, char** argv) {
  using namespace capce;
  using namespace capce::acceptance;
#ifdef CAPCE_WAGE_CSV
  std::string wage = CAPCE_WAGE_CSV;
#else
  std::string wage;
#endif
  for (int i = 1; i + 1 < argc; i += 2) {
    const std::string flag = argv[i];
    if (flag == "--wage") {
      wage = argv[i + 1];
    } else if (flag == "--threads") {
      g_threads = std::atoi(argv[i + 1]);
    } else {
      std::fprintf(stderr, "usage: %s [--wage PATH] [--threads N]\n", argv[0]);
      return 2;
    }
  }
  Runner runner;
  runner.Add("ref 1", "wage rows after filtering", [&] { return WageRows(wage); });
  runner.Add("ref 2", "S-CAPCE setting B single run, MSE <= 10",
             [] { return MseAtMost("B", Method::kSieve, 10, 3.579); });
  runner.Add("ref 3", "RKHS-CAPCE setting B single run, MSE <= 25",
             [] { return MseAtMost("B", Method::kRkhs, 25, 8.985); });
  runner.Add("ref 4", "NTSLS setting B single run, MSE <= 60",
             [] { return MseAtMost("B", Method::kNtsls, 60, 20.990); });
  runner.Add("ref 5", "Kernel IV setting A at least 5x RKHS-CAPCE, single run", [] {
    const double kiv = FindCell(SingleRun(), "A", kN, "kernel_iv").mean_mse;
    const double rkhs = FindCell(SingleRun(), "A", kN, "rkhs_capce").mean_mse;
    return Verdict(kiv >= 5 * rkhs, "kernel_iv " + Fmt(kiv) + " (reference 495.742), rkhs_capce " +
                                        Fmt(rkhs) + ", ratio " + FormatFixed(kiv / rkhs, 2));
  });
  runner.Add("ref 6", "P-CAPCE setting A coefficient means", [] {
    return MeansMatch("A", Method::kParametric, {1.226, 0.963, 19.971});
  });
  runner.Add("ref 7", "PTSLS setting A derivative coefficient means",
             [] { return MeansMatch("A", Method::kPtsls, {1.101, 51.181, 19.763}); });
  runner.Add("ref 8", "P-CAPCE setting C coefficient means",
             [] { return MeansMatch("C", Method::kParametric, {0.999, 0.966, 19.998}); });
  runner.Add("ref 9", "P-CAPCE setting C coefficient SDs",
             [] { return SdsMatch("C", Method::kParametric, {0.106, 4.851, 0.305}); });
  runner.Add("ref 10", "wage bootstrap CAPCE(8, 100)", [&] { return WageBootstrap(wage); });
  const int failures = runner.Run();
  std::printf("%d reference checks failed\n", failures);
  return failures == 0 ? 0 : 1;
}
