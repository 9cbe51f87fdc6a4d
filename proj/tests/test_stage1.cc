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

#include "capce/stage1.h"

#include <random>

#include <gtest/gtest.h>

#include "capce/linalg.h"
#include "test_util.h"

namespace capce {
namespace {

TwoSampleDataset RandomData(Eigen::Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1, 1);
  Eigen::VectorXd x(n), z(n), y(n);
  Eigen::MatrixXd w(n, 1);
  for (Eigen::Index i = 0; i < n; ++i) {
    z(i) = u(rng);
    w(i, 0) = u(rng);
    x(i) = z(i) + w(i, 0) + 0.3 * u(rng);
    y(i) = 2 * x(i) + u(rng);
  }
  return TwoSampleDataset::Joint(x, w, z, y);
}

TEST(PseudoInverse, ContractOnRankDeficient) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  Eigen::MatrixXd a(6, 3);
  for (int i = 0; i < 6; ++i) {
    a(i, 0) = g(rng);
    a(i, 1) = g(rng);
  }
  a.col(2) = a.col(0) - 2 * a.col(1);
  const Eigen::MatrixXd m = a.transpose() * a;
  const PseudoInverse p = ComputePseudoInverse(m);
  EXPECT_EQ(p.rank, 2);
  EXPECT_LT((m * p.matrix * m - m).norm(), 1e-8);
  EXPECT_LT((p.matrix * m * p.matrix - p.matrix).norm(), 1e-8);
}

TEST(PseudoInverse, FullRankIsInverse) {
  Eigen::Matrix3d m;
  m << 4, 1, 0, 1, 3, 1, 0, 1, 2;
  const PseudoInverse p = ComputePseudoInverse(m);
  EXPECT_EQ(p.rank, 3);
  EXPECT_LT((p.matrix * m - Eigen::Matrix3d::Identity()).norm(), 1e-12);
}

TEST(SolveSpd, FallsBackOnSingular) {
  Eigen::Matrix2d a;
  a << 1, 1, 1, 1;
  bool fallback = false;
  const Eigen::MatrixXd x = SolveSpd(a, Eigen::Vector2d(2, 2), &fallback);
  EXPECT_TRUE(fallback);
  EXPECT_LT((a * x - Eigen::Vector2d(2, 2)).norm(), 1e-10);
}

TEST(SolveGram, SingularAfterJitterThrows) {
  const Eigen::Matrix2d zero = Eigen::Matrix2d::Zero();
  EXPECT_CAPCE_ERROR(SolveGram(zero, Eigen::Vector2d(1, 1)), kGramSingular);
}

TEST(FitStage1, ConstantOutcome) {
  auto base = RandomData(40, 1);
  const TwoSampleDataset data = TwoSampleDataset::Joint(
      base.sample1().x, base.sample1().w, base.sample1().z, Eigen::VectorXd::Constant(40, 3.0));
  const auto fit = FitStage1(data, BasisSpec::ExplicitTerms({"1", "W", "X"}), InstrumentBasis(3), -1.0);
  for (double z : {-1.0, 0.0, 0.6}) EXPECT_NEAR(fit.PredictOutcome(z), 3.0, 1e-12);
  const auto m = PredictDifferences(fit, data);
  EXPECT_LT(m.c.cwiseAbs().maxCoeff(), 1e-12);
}

TEST(FitStage1, ExactLinearTarget) {
  Eigen::VectorXd z = Eigen::VectorXd::LinSpaced(20, -1, 1);
  Eigen::VectorXd x = 2 * z;
  const auto data = TwoSampleDataset::Joint(x, Eigen::MatrixXd::Zero(20, 1), z, z);
  const auto fit = FitStage1(data, BasisSpec::ExplicitTerms({"1"}), InstrumentBasis(2), 0.0);
  for (double zz : {-0.5, 0.3, 1.0}) EXPECT_NEAR(fit.PredictTargets(zz)(0), 2 * zz, 1e-10);
  Eigen::VectorXd one(1);
  one << 1.0;
  EXPECT_NEAR(PredictDifferences(fit, one).d(0, 0), 2.0, 1e-10);
}

TEST(FitStage1, ResidualsOrthogonalToFeatures) {
  const auto data = RandomData(50, 5);
  const auto spec = BasisSpec::HermiteProduct(2, 2);
  const InstrumentBasis q(3);
  const auto fit = FitStage1(data, spec, q, -1.0);
  const Eigen::MatrixXd q1 = q.Matrix(data.sample1().z);
  const Eigen::MatrixXd t = AntiderivativeMatrix(spec, data.sample1().x, data.sample1().w);
  const Eigen::MatrixXd g = q1.transpose() * (t - q1 * fit.nu);
  EXPECT_LT(g.cwiseAbs().maxCoeff(), 1e-8 * (1 + t.cwiseAbs().maxCoeff()));
  const Eigen::MatrixXd q2 = q.Matrix(data.sample2().z);
  EXPECT_LT((q2.transpose() * (data.sample2().y - q2 * fit.omega)).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(FitStage1, PseudoInverseContractWithDuplicatedInstruments) {
  Eigen::VectorXd z(12);
  z << -1, -1, -1, -1, 1, 1, 1, 1, -1, 1, -1, 1;
  Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(12, 0, 1);
  const auto data = TwoSampleDataset::Joint(x, Eigen::MatrixXd::Zero(12, 1), z, x);
  const auto fit = FitStage1(data, BasisSpec::ExplicitTerms({"1", "X"}), InstrumentBasis(4), -1.0);
  EXPECT_TRUE(fit.diagnostics.rank_deficient);
  EXPECT_EQ(fit.diagnostics.m1_rank, 2);
  EXPECT_LT((fit.m1 * fit.m1_pinv * fit.m1 - fit.m1).norm(), 1e-8);
  EXPECT_LT((fit.m2 * fit.m2_pinv * fit.m2 - fit.m2).norm(), 1e-8);
}

TEST(PredictDifferences, AnchorRowIsZero) {
  const auto data = RandomData(30, 9);
  const double z0 = data.sample1().z(4);
  const auto fit = FitStage1(data, BasisSpec::HermiteProduct(2, 1), InstrumentBasis(4), z0);
  const auto m = PredictDifferences(fit, data);
  EXPECT_EQ(m.c(4), 0.0);
  EXPECT_TRUE((m.d.row(4).array() == 0.0).all());
  EXPECT_EQ(m.c.size(), data.n1() + data.n2());
}

TEST(PredictDifferences, ScalingOutcome) {
  const auto data = RandomData(30, 10);
  const auto scaled = TwoSampleDataset::Joint(data.sample1().x, data.sample1().w,
                                              data.sample1().z, 3.5 * data.sample2().y);
  const auto spec = BasisSpec::ExplicitTerms({"1", "W", "X"});
  const auto a = PredictDifferences(FitStage1(data, spec, InstrumentBasis(3), -1), data);
  const auto b = PredictDifferences(FitStage1(scaled, spec, InstrumentBasis(3), -1), scaled);
  EXPECT_LT((b.c - 3.5 * a.c).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_EQ(a.d, b.d);
}

TEST(FitStage1, TooFewSamples) {
  const auto data = RandomData(3, 1);
  EXPECT_CAPCE_ERROR(FitStage1(data, BasisSpec::ExplicitTerms({"1"}), InstrumentBasis(4), 0.0),
                     kTooFewSamples);
}

TEST(FitStage1, LevelTargetsAreUndifferenced) {
  const auto data = RandomData(40, 12);
  const auto spec = BasisSpec::ExplicitTerms({"1", "X"});
  const auto fit = FitStage1(data, spec, InstrumentBasis(2), 0.0, Stage1Target::kLevel);
  const auto lv = PredictLevels(fit, Eigen::Vector2d(0.0, 0.5));
  EXPECT_NEAR(lv.d(0, 0), 1.0, 1e-12);  // E[1 | z] = 1
}

TEST(DefaultAnchor, MinimumOfBothSamples) {
  Sample1 s1{Eigen::Vector2d(0, 0), Eigen::MatrixXd::Zero(2, 1), Eigen::Vector2d(0.5, -0.2)};
  Sample2 s2{Eigen::Vector2d(0, 0), Eigen::Vector2d(-0.7, 3)};
  EXPECT_DOUBLE_EQ(DefaultAnchor(TwoSampleDataset(s1, s2)), -0.7);
}

}  // namespace
}  // namespace capce
