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

#include "capce/baselines.h"

#include <algorithm>
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "capce/scm_bench.h"
#include "oracles.h"
#include "test_util.h"

namespace capce {
namespace {

TwoSampleDataset LinearNoNoise(int n) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(-1, 1);
  Eigen::VectorXd x(n), y(n);
  Eigen::MatrixXd w(n, 1);
  for (int i = 0; i < n; ++i) {
    x(i) = 2 * u(rng);
    w(i, 0) = u(rng);
    y(i) = 2 * x(i);
  }
  return TwoSampleDataset::Joint(x, w, x, y);
}

TEST(FitPtsls, ExogenousLinearRecoversSlope) {
  const auto m = FitPtslsAt(LinearNoNoise(100), BasisSpec::ExplicitTerms({"1", "X"}),
                            InstrumentBasis(2), 0.0);
  EXPECT_NEAR(m.coefficients()(1), 2.0, 1e-10);
  EXPECT_NEAR(m.coefficients()(0), 0.0, 1e-10);
  for (double x : {-1.0, 0.5, 3.0}) EXPECT_NEAR(m.EvaluateDx(x, 0.2), 2.0, 1e-10);
}

TEST(StructuralModel, SquareDifferentiatesToTwoX) {
  const auto m = StructuralModel::Series(StructuralKind::kPtsls,
                                         BasisSpec::ExplicitTerms({"1", "X2", "XW"}),
                                         Eigen::Vector3d(5, 1, 3), FitInfo{});
  const auto terms = m.DerivativeTerms();
  ASSERT_EQ(terms.size(), 2u);
  EXPECT_EQ(terms[0].first, "X");
  EXPECT_EQ(terms[0].second, 2.0);
  EXPECT_EQ(terms[1].first, "W");
  EXPECT_EQ(terms[1].second, 3.0);
  EXPECT_DOUBLE_EQ(m.EvaluateDx(1.5, 2.0), 2 * 1.5 + 3 * 2.0);
}

TEST(StructuralModel, DerivativeTermsMergeLikeTerms) {
  const auto m = StructuralModel::Series(StructuralKind::kPtsls,
                                         BasisSpec::ExplicitTerms({"X", "XW", "X2W"}),
                                         Eigen::Vector3d(1, 2, 0.5), FitInfo{});
  const auto terms = m.DerivativeTerms();
  ASSERT_EQ(terms.size(), 3u);
  EXPECT_EQ(terms[0].first, "1");
  EXPECT_EQ(terms[2].first, "XW");
  EXPECT_EQ(terms[2].second, 1.0);
}

TEST(StructuralModel, HermiteProductDerivative) {
  const auto spec = BasisSpec::HermiteProduct(2, 1);
  const auto labels = spec.Labels();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(spec.size());
  for (Eigen::Index j = 0; j < spec.size(); ++j) {
    if (labels[static_cast<size_t>(j)] == "h2(X)h1(W)") b(j) = 1.0;
  }
  ASSERT_EQ(b.sum(), 1.0);
  const auto m = StructuralModel::Series(StructuralKind::kNtsls, spec, b, FitInfo{});
  for (double x : {-1.0, 0.3, 2.0}) {
    for (double w : {-0.5, 1.5}) EXPECT_NEAR(m.EvaluateDx(x, w), 2 * x * w, 1e-12);
  }
}

TEST(StructuralModel, AnalyticMatchesDifferences) {
  const auto data = Simulate(ScmSetting::FromName("B"), 2000, 9);
  const auto test = Simulate(ScmSetting::FromName("B"), 2000, 10);
  const auto models = {
      FitNtsls(data, BasisSpec::HermiteProduct(2, 2), InstrumentBasis(4), DefaultZetaGrid(), test),
      FitPtsls(data, BasisSpec::ExplicitTerms({"1", "W", "X", "XW", "X2"}), InstrumentBasis(3),
               DefaultZetaGrid(), test)};
  for (const auto& m : models) {
    for (double x : {-1.0, 0.0, 1.2}) {
      const Eigen::VectorXd w = Eigen::VectorXd::Constant(1, 0.4);
      const double h = 1e-5;
      const double fd = (m.EvaluateLevel(x + h, w) - m.EvaluateLevel(x - h, w)) / (2 * h);
      EXPECT_NEAR(fd, m.EvaluateDx(x, w), 1e-6 * std::max(1.0, std::abs(fd)));
    }
  }
}

TEST(FitNtsls, ConstantOutcomeFlatSurface) {
  // Enough instrument terms to identify all nine level terms; unpenalized.
  const auto base = Simulate(ScmSetting::FromName("A"), 1000, 21);
  const auto flat = TwoSampleDataset::Joint(base.sample1().x, base.sample1().w, base.sample1().z,
                                            Eigen::VectorXd::Constant(1000, 7.0));
  const auto m = FitNtslsAt(flat, BasisSpec::HermiteProduct(2, 2), InstrumentBasis(10), 0.0);
  EXPECT_NEAR(m.coefficients()(0), 7.0, 1e-6);
  EXPECT_LT(m.coefficients().tail(m.coefficients().size() - 1).cwiseAbs().maxCoeff(), 1e-6);
  for (double x : {-2.0, 0.0, 2.0}) EXPECT_LT(std::abs(m.EvaluateDx(x, 0.5)), 1e-6);
}

TEST(FitNtsls, ZeroOutcomeZeroSurfaceUnderRidge) {
  const auto base = Simulate(ScmSetting::FromName("A"), 1000, 21);
  const auto flat = TwoSampleDataset::Joint(base.sample1().x, base.sample1().w, base.sample1().z,
                                            Eigen::VectorXd::Zero(1000));
  const auto m = FitNtslsAt(flat, BasisSpec::HermiteProduct(2, 2), InstrumentBasis(4), 0.1);
  EXPECT_EQ(m.coefficients().cwiseAbs().maxCoeff(), 0.0);
}

TEST(StructuralKind, Names) {
  for (auto k : {StructuralKind::kPtsls, StructuralKind::kNtsls, StructuralKind::kKernelIv}) {
    EXPECT_EQ(StructuralKindFromName(StructuralKindName(k)), k);
  }
  EXPECT_CAPCE_ERROR(StructuralKindFromName("2sls"), kInvalidArgument);
}

double Kpoly(double a, double b, double c, int m) { return std::pow(a * b + c, m); }

TEST(FitKernelIv, MatchesDualBruteForce) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-1, 1);
  const int n = 8;
  Eigen::VectorXd x(n), z1(n), z2(n), y(n);
  Eigen::MatrixXd w(n, 1);
  for (int i = 0; i < n; ++i) {
    z1(i) = u(rng);
    w(i, 0) = u(rng);
    x(i) = z1(i) + 0.5 * w(i, 0) + 0.2 * u(rng);
    z2(i) = u(rng);
    y(i) = 2 * z2(i) * z2(i) - z2(i) + 0.1 * u(rng);
  }
  KernelConfig k;
  k.c1 = 1;
  k.c2 = 2;
  k.c3 = 1;
  k.c4 = 2;
  k.lambda1 = 0.1;
  k.xi = 0.5;
  Eigen::MatrixXd k11(n, n), k12(n, n), kxx(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      k11(i, j) = Kpoly(z1(i), z1(j), k.c1, k.c2);
      k12(i, j) = Kpoly(z1(i), z2(j), k.c1, k.c2);
      kxx(i, j) = std::pow(x(i) * x(j) + w(i, 0) * w(j, 0) + k.c3, k.c4);
    }
  }
  const Eigen::MatrixXd wmat =
      kxx * (k11 + n * k.lambda1 * Eigen::MatrixXd::Identity(n, n)).ldlt().solve(k12);
  // J(a) = |y - W^T a|^2 + N2 xi a^T Kxx a
  const Eigen::VectorXd a = testing::MinimizeQuadratic(2 * (wmat * wmat.transpose() + n * k.xi * kxx), 2 * wmat * y);

  const auto m = FitKernelIv(TwoSampleDataset(Sample1{x, w, z1}, Sample2{y, z2}), k);
  for (double px : {-1.0, 0.2, 0.9}) {
    for (double pw : {-0.4, 0.6}) {
      double level = 0.0;
      for (int i = 0; i < n; ++i) level += a(i) * std::pow(x(i) * px + w(i, 0) * pw + k.c3, k.c4);
      EXPECT_NEAR(m.EvaluateLevel(px, Eigen::VectorXd::Constant(1, pw)), level,
                  1e-4 * std::max(1.0, std::abs(level)));
    }
  }
}

TEST(KernelIvSelect, ReturnsGridMember) {
  const auto data = Simulate(ScmSetting::FromName("B"), 200, 4);
  const auto validation = Simulate(ScmSetting::FromName("B"), 200, 5);
  RkhsGrids grids;
  const auto cfg = KernelIvSelect(data, validation, grids);
  EXPECT_NE(std::find(grids.c4.begin(), grids.c4.end(), cfg.c4), grids.c4.end());
  EXPECT_NE(std::find(grids.xi.begin(), grids.xi.end(), cfg.xi), grids.xi.end());
  EXPECT_NE(std::find(grids.lambda1.begin(), grids.lambda1.end(), cfg.lambda1), grids.lambda1.end());
}

}  // namespace
}  // namespace capce
