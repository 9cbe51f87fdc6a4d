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

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <regex>
#include <sstream>

#include <gtest/gtest.h>

#include "capce/benchmark.h"
#include "capce/bootstrap.h"
#include "capce/evaluation.h"
#include "capce/report.h"
#include "capce/scm_bench.h"
#include "capce/stats.h"
#include "test_util.h"

namespace capce {
namespace {

using testing::ReadFile;
using testing::TempDir;

CapceSurface OracleShift(const ScmSetting& s, double shift) {
  return [s, shift](const Eigen::VectorXd& x, const Eigen::MatrixXd& w) {
    Eigen::VectorXd out(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) out(i) = TrueCapce(s, x(i), w(i, 0)) + shift;
    return out;
  };
}

TEST(EvaluateMse, OracleAndOffset) {
  for (const char* name : {"A", "B", "C", "D", "E", "F"}) {
    const auto s = ScmSetting::FromName(name);
    EXPECT_EQ(EvaluateMse(OracleShift(s, 0.0), s, DefaultEvalGrid()), 0.0);
    EXPECT_NEAR(EvaluateMse(OracleShift(s, 1.0), s, DefaultEvalGrid()), 1.0, 1e-12);
  }
}

TEST(EvaluateMse, TwoPointHandGrid) {
  // Setting C at w = 0: CAPCE = 20x + 1, zero at x = -0.05.
  const auto s = ScmSetting::FromName("C");
  ASSERT_NEAR(TrueCapce(s, -0.05, 0.0), 0.0, 1e-12);
  EvalGrid grid;
  grid.x_points = {-0.05, -0.05 + 1e-9};
  grid.w_points = {0.0};
  const CapceSurface surface = [](const Eigen::VectorXd& x, const Eigen::MatrixXd&) {
    Eigen::VectorXd v(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) v(i) = i == 0 ? 1.0 : 3.0;
    return v;
  };
  EXPECT_NEAR(EvaluateMse(surface, s, grid), 5.0, 1e-6);
}

TEST(EvaluateMse, NonFiniteEstimateThrows) {
  const auto s = ScmSetting::FromName("A");
  const CapceSurface surface = [](const Eigen::VectorXd& x, const Eigen::MatrixXd&) {
    return Eigen::VectorXd::Constant(x.size(), std::nan(""));
  };
  EXPECT_CAPCE_ERROR(EvaluateMse(surface, s, DefaultEvalGrid()), kNonFiniteEstimate);
}

TEST(Stats, HandValues) {
  EXPECT_EQ(Mean({1, 2, 3, 6}), 3.0);
  EXPECT_NEAR(SampleSd({1, 2, 3, 4, 5}), std::sqrt(2.5), 1e-15);
  EXPECT_EQ(SampleSd({4}), 0.0);
  EXPECT_EQ(Quantile({10, 0}, 0.25), 2.5);
  EXPECT_EQ(Quantile({3, 1, 2}, 0.5), 2.0);
  const auto c = Summarize("b", {5, 1, 4, 2, 3});
  EXPECT_EQ(c.min, 1.0);
  EXPECT_EQ(c.q1, 2.0);
  EXPECT_EQ(c.median, 3.0);
  EXPECT_EQ(c.q3, 4.0);
  EXPECT_EQ(c.max, 5.0);
  EXPECT_EQ(c.mean, 3.0);
}

BenchmarkPlan SmallPlan(int threads) {
  BenchmarkPlan plan;
  plan.settings = {ScmSetting::FromName("A"), ScmSetting::FromName("D")};
  plan.sample_sizes = {300};
  plan.replications = 3;
  plan.estimators = {DefaultEstimator(Method::kParametric), DefaultEstimator(Method::kPtsls),
                     DefaultEstimator(Method::kNtsls)};
  plan.threads = threads;
  plan.curve_w = {1.0};
  return plan;
}

TEST(RunBenchmark, ByteIdenticalAcrossRunsAndThreads) {
  TempDir a;
  const auto r1 = RunBenchmark(SmallPlan(1));
  const auto r2 = RunBenchmark(SmallPlan(3));
  EmitBenchmarkReport(r1, a.File("one"));
  EmitBenchmarkReport(r2, a.File("two"));
  EXPECT_EQ(ReadFile(a.File("one/results.csv")), ReadFile(a.File("two/results.csv")));
  EXPECT_EQ(ReplicationsCsv(r1), ReplicationsCsv(r2));
  EXPECT_EQ(r1.cells.size(), 6u);
  EXPECT_EQ(r1.records.size(), 18u);
}

TEST(RunBenchmark, SeedsFollowReplicationIndex) {
  auto plan = SmallPlan(1);
  plan.base_seed = 40;
  const auto r = RunBenchmark(plan);
  for (const auto& rec : r.records) {
    EXPECT_EQ(rec.seed, 40u + static_cast<std::uint64_t>(rec.replication));
  }
}

TEST(RunBenchmark, EmptyEstimatorListGivesEmptyTable) {
  auto plan = SmallPlan(1);
  plan.estimators.clear();
  const auto r = RunBenchmark(plan);
  EXPECT_TRUE(r.cells.empty());
  EXPECT_TRUE(r.records.empty());
  const std::string csv = BenchmarkCsv(r);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 1);
}

TEST(RunBenchmark, InvalidPlan) {
  auto plan = SmallPlan(1);
  plan.replications = 0;
  EXPECT_CAPCE_ERROR(RunBenchmark(plan), kInvalidArgument);
}

TEST(Report, OneCellCsv) {
  auto plan = SmallPlan(1);
  plan.settings = {ScmSetting::FromName("C")};
  plan.estimators = {DefaultEstimator(Method::kParametric)};
  plan.replications = 2;
  const auto r = RunBenchmark(plan);
  const std::string csv = BenchmarkCsv(r);
  std::istringstream in(csv);
  std::string header, row, extra;
  std::getline(in, header);
  std::getline(in, row);
  EXPECT_FALSE(std::getline(in, extra));
  EXPECT_EQ(header.rfind("setting,n,estimator,succeeded,failed,mean_mse,sd_mse,median_mse", 0), 0u);
  EXPECT_EQ(row.rfind("C,300,p_capce,2,0,", 0), 0u);
  EXPECT_NE(header.find("coef_X_mean"), std::string::npos);
}

TEST(Report, MarkdownMatchesCsv) {
  const auto r = RunBenchmark(SmallPlan(1));
  const std::string csv = BenchmarkCsv(r);
  const std::string md = BenchmarkMarkdown(r);
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  int rows = 0;
  while (std::getline(in, line)) {
    std::stringstream fields(line);
    std::string f;
    std::vector<std::string> cells;
    while (std::getline(fields, f, ',')) cells.push_back(f);
    std::string md_row = "|";
    for (const auto& c : cells) md_row += " " + c + " |";
    EXPECT_NE(md.find(md_row), std::string::npos) << md_row;
    ++rows;
  }
  EXPECT_EQ(rows, 6);
}

TEST(Report, CurveAtWOneCarriesLinearOracle) {
  TempDir dir;
  auto plan = SmallPlan(1);
  plan.settings = {ScmSetting::FromName("A")};
  const auto r = RunBenchmark(plan);
  for (double x : r.curve_x) {
    EXPECT_NEAR(TrueCapce(ScmSetting::FromName("A"), x, 1.0), 20 * x + 2, 1e-12);
  }
  EmitBenchmarkReport(r, dir.path());
  const auto path = dir.File("curves_A_300_w1p00.svg");
  ASSERT_TRUE(std::filesystem::exists(path));
  const std::string svg = ReadFile(path);
  const std::regex oracle_re("<polyline class=\"oracle\" points=\"([^\"]*)\"");
  std::smatch m;
  ASSERT_TRUE(std::regex_search(svg, m, oracle_re));
  std::vector<std::pair<double, double>> pts;
  std::istringstream in(m[1].str());
  std::string p;
  while (in >> p) {
    const auto comma = p.find(',');
    pts.emplace_back(std::stod(p.substr(0, comma)), std::stod(p.substr(comma + 1)));
  }
  ASSERT_EQ(pts.size(), r.curve_x.size());
  // Collinear up to the 2-decimal rounding of pixel coordinates.
  const auto& a = pts.front();
  const auto& b = pts.back();
  for (const auto& q : pts) {
    const double cross = (b.first - a.first) * (q.second - a.second) -
                         (b.second - a.second) * (q.first - a.first);
    EXPECT_LT(std::abs(cross) / std::hypot(b.first - a.first, b.second - a.second), 0.02);
  }
  EXPECT_NE(svg.find("p_capce"), std::string::npos);
  EXPECT_NE(svg.find("bands: replication 5-95%"), std::string::npos);
  for (const char* f : {"results.csv", "results.md", "replications.csv", "report.json"}) {
    EXPECT_TRUE(std::filesystem::exists(dir.File(f))) << f;
  }
}

TEST(FormatFixed, Rounding) {
  EXPECT_EQ(FormatFixed(1.23456), "1.235");
  EXPECT_EQ(FormatFixed(-0.0001), "0.000");
  EXPECT_EQ(FormatFixed(std::nan("")), "nan");
  EXPECT_EQ(FormatFixed(-INFINITY), "-inf");
}

TEST(Bootstrap, SingleResampleCollapses) {
  const auto data = Simulate(ScmSetting::FromName("C"), 500, 3);
  BootstrapOptions opt;
  opt.resamples = 1;
  opt.table_x = {0.0};
  opt.table_w = {0.0};
  const auto cfg = DefaultEstimator(Method::kParametric);
  const auto rep = Bootstrap(data, cfg, Hyper{0.01, std::nullopt}, opt);
  EXPECT_EQ(rep.succeeded, 1);
  ASSERT_EQ(rep.coefficients.size(), 3u);
  for (const auto& c : rep.coefficients) {
    EXPECT_EQ(c.min, c.max);
    EXPECT_EQ(c.min, c.mean);
    EXPECT_EQ(c.sd, 0.0);
  }
  EXPECT_TRUE(rep.joint_resampling);
}

TEST(Bootstrap, OrderedStatisticsAndDeterminism) {
  const auto data = Simulate(ScmSetting::FromName("C"), 500, 3);
  BootstrapOptions opt;
  opt.resamples = 40;
  opt.seed = 9;
  const auto cfg = DefaultEstimator(Method::kPtsls);
  const auto a = Bootstrap(data, cfg, Hyper{0.01, std::nullopt}, opt);
  opt.threads = 3;
  const auto b = Bootstrap(data, cfg, Hyper{0.01, std::nullopt}, opt);
  EXPECT_EQ(BootstrapCoefficientsCsv(a), BootstrapCoefficientsCsv(b));
  EXPECT_EQ(a.succeeded + a.failed, 40);
  for (const auto& c : a.coefficients) {
    EXPECT_LE(c.min, c.q1);
    EXPECT_LE(c.q1, c.median);
    EXPECT_LE(c.median, c.q3);
    EXPECT_LE(c.q3, c.max);
    EXPECT_GT(c.sd, 0.0);
  }
  EXPECT_EQ(a.predicted_mean.rows(), 11);
  EXPECT_EQ(a.predicted_mean.cols(), 11);
}

TEST(Bootstrap, SeparateSamplesResampleIndependently) {
  const auto joint = Simulate(ScmSetting::FromName("C"), 400, 8);
  const TwoSampleDataset split(joint.sample1(), joint.sample2());
  BootstrapOptions opt;
  opt.resamples = 5;
  const auto rep = Bootstrap(split, DefaultEstimator(Method::kParametric), Hyper{0.1, std::nullopt}, opt);
  EXPECT_FALSE(rep.joint_resampling);
  EXPECT_EQ(rep.succeeded, 5);
}

}  // namespace
}  // namespace capce
