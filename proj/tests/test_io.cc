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

#include <gtest/gtest.h>

#include "capce/config.h"
#include "capce/scm_bench.h"
#include "capce/serialization.h"
#include "test_util.h"

namespace capce {
namespace {

using testing::TempDir;

constexpr char kFullConfig[] = R"(
seed = 7
out_dir = "runs/x"

[data]
path = "wage.csv"
treatment = "educ"
outcome = "wage"
instrument = "feduc"
covariates = ["IQ"]

[benchmark]
settings = ["A", "C"]
sample_sizes = [500, 1000]
replications = 4
base_seed = 11
curve_w = [0.5]
threads = 2

[benchmark.grid]
x_lo = -1.0
x_hi = 1.0
w_lo = -0.5
w_hi = 0.5
nx = 5
nw = 3

[bootstrap]
resamples = 50
seed = 3
table_x = [8.0, 9.0]
table_w = [100.0]

[[estimator]]
label = "pc"
method = "p_capce"
terms = ["1", "W", "W2", "X", "XW", "XW2"]
p_degree = 3
zeta_grid = [1.0, 0.5]
z0 = 8.0

[[estimator]]
label = "sc"
method = "s_capce"
basis = { kind = "hermite_product", x_deg = 1, w_deg = 2 }
[estimator.lambda]
kappa = 3.0
n_mc = 2000
seed = 5

[[estimator]]
method = "rkhs_capce"
[estimator.kernel]
c1 = 2.0
c2 = 3
lambda3 = 10.0
)";

TEST(ParseConfig, FullDocument) {
  const auto c = ParseConfig(kFullConfig);
  EXPECT_EQ(c.seed, 7u);
  EXPECT_EQ(c.out_dir, "runs/x");
  EXPECT_EQ(c.data.path, "wage.csv");
  EXPECT_EQ(c.data.columns.covariates, std::vector<std::string>{"IQ"});
  ASSERT_TRUE(c.has_benchmark);
  EXPECT_EQ(c.benchmark.settings.size(), 2u);
  EXPECT_EQ(c.benchmark.settings[1].Name(), "C");
  EXPECT_EQ(c.benchmark.sample_sizes, (std::vector<Eigen::Index>{500, 1000}));
  EXPECT_EQ(c.benchmark.replications, 4);
  EXPECT_EQ(c.benchmark.base_seed, 11u);
  EXPECT_EQ(c.benchmark.grid.x_points.size(), 5u);
  EXPECT_EQ(c.benchmark.grid.w_points.size(), 3u);
  EXPECT_EQ(c.bootstrap.resamples, 50);
  EXPECT_EQ(c.bootstrap.table_x, (std::vector<double>{8, 9}));
  ASSERT_EQ(c.estimators.size(), 3u);
  EXPECT_EQ(c.estimators[0].label, "pc");
  EXPECT_EQ(c.estimators[0].basis->size(), 6);
  EXPECT_EQ(c.estimators[0].z0, 8.0);
  EXPECT_EQ(c.estimators[0].zeta_grid, (std::vector<double>{1.0, 0.5}));
  EXPECT_EQ(c.estimators[1].method, Method::kSieve);
  EXPECT_EQ(*c.estimators[1].basis, BasisSpec::HermiteProduct(1, 2));
  EXPECT_EQ(c.estimators[1].lambda.kappa, 3.0);
  EXPECT_EQ(c.estimators[1].lambda.n_mc, 2000);
  ASSERT_TRUE(c.estimators[2].kernel.has_value());
  EXPECT_EQ(c.estimators[2].kernel->c2, 3);
  EXPECT_EQ(c.estimators[2].kernel->lambda3, 10.0);
  EXPECT_EQ(c.estimators[2].kernel->xi, KernelConfig{}.xi);
}

TEST(ParseConfig, EmptyKeepsDefaults) {
  const auto c = ParseConfig("");
  EXPECT_FALSE(c.seed.has_value());
  EXPECT_FALSE(c.has_benchmark);
  EXPECT_TRUE(c.data.empty());
  EXPECT_TRUE(c.estimators.empty());
}

TEST(ParseConfig, Errors) {
  EXPECT_CAPCE_ERROR(ParseConfig("sede = 1"), kParseError);
  EXPECT_CAPCE_ERROR(ParseConfig("[benchmark]\nsettings = [\"Q\"]"), kUnknownSetting);
  EXPECT_CAPCE_ERROR(ParseConfig("seed = "), kParseError);
  EXPECT_CAPCE_ERROR(ParseConfig("[[estimator]]\nmethod = \"p_capce\"\nbogus = 1"), kParseError);
  EXPECT_CAPCE_ERROR(LoadConfig("/nonexistent/capce.toml"), kIoError);
}

TEST(ParseConfig, LoadsFromFile) {
  TempDir dir;
  testing::WriteFile(dir.File("c.toml"), kFullConfig);
  EXPECT_EQ(LoadConfig(dir.File("c.toml")).estimators.size(), 3u);
}

TEST(BasisConfig, RoundTrip) {
  for (const auto& spec : {BasisSpec::HermiteProduct(2, 2), BasisSpec::HermiteProduct(3, 1, 2),
                           BasisSpec::ExplicitTerms({"1", "W", "X", "XW2"}),
                           BasisSpec::ExplicitTerms({"X", "XW_2^2"}, 2)}) {
    EXPECT_EQ(BasisFromConfig(BasisToConfig(spec), spec.d()), spec) << BasisToConfig(spec);
    EXPECT_EQ(BasisFromConfig("basis = " + BasisToConfig(spec), spec.d()), spec);
  }
}

class Serialization : public ::testing::Test {
 protected:
  TwoSampleDataset train_ = Simulate(ScmSetting::FromName("B"), 300, 1);
  TwoSampleDataset test_ = Simulate(ScmSetting::FromName("B"), 300, 2);

  static void ExpectSameSurface(const FittedEstimator& a, const FittedEstimator& b) {
    for (double x : {-1.7, 0.0, 0.4, 2.0}) {
      for (double w : {-0.9, 0.3}) {
        const Eigen::VectorXd wv = Eigen::VectorXd::Constant(1, w);
        EXPECT_EQ(a.Evaluate(x, wv), b.Evaluate(x, wv));
      }
    }
  }
};

TEST_F(Serialization, EveryMethodRoundTripsBitIdentically) {
  auto configs = DefaultEstimators();
  KernelConfig k;
  k.c2 = 2;
  k.c4 = 3;
  for (auto& c : configs) {
    c.lambda.n_mc = 2000;
    if (c.method == Method::kRkhs || c.method == Method::kKernelIv) c.kernel = k;
  }
  for (const auto& c : configs) {
    const auto fitted = FitSelected(c, train_, test_);
    const std::string json = ToJson(fitted);
    const auto back = FittedEstimatorFromJson(json);
    EXPECT_EQ(back.method, fitted.method) << MethodName(c.method);
    ExpectSameSurface(fitted, back);
    EXPECT_EQ(ToJson(back), json) << MethodName(c.method);
    EXPECT_EQ(back.CoefficientLabels(), fitted.CoefficientLabels());
  }
}

TEST_F(Serialization, FileRoundTrip) {
  TempDir dir;
  const auto fitted = FitSelected(DefaultEstimator(Method::kParametric), train_, test_);
  SaveEstimator(fitted, dir.File("m.json"));
  ExpectSameSurface(fitted, LoadEstimator(dir.File("m.json")));
  EXPECT_FALSE(DiagnosticsJson(fitted).empty());
}

TEST_F(Serialization, RejectsMalformed) {
  EXPECT_CAPCE_ERROR(FittedEstimatorFromJson("{"), kParseError);
  EXPECT_CAPCE_ERROR(FittedEstimatorFromJson("{\"format\": 1, \"kind\": \"nope\"}"), kParseError);
  const auto fitted = FitSelected(DefaultEstimator(Method::kPtsls), train_, test_);
  EXPECT_CAPCE_ERROR(CapceModelFromJson(ToJson(*fitted.structural)), kParseError);
  EXPECT_CAPCE_ERROR(LoadEstimator("/nonexistent/m.json"), kIoError);
}

}  // namespace
}  // namespace capce
