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

#include <cmath>
#include <string>

#include "capce/error.h"
#include "capce/linalg.h"

namespace capce {
namespace {

double RSquared(const Eigen::VectorXd& y, const Eigen::VectorXd& fitted) {
  const double mean = y.mean();
  const double tss = (y.array() - mean).square().sum();
  const double rss = (y - fitted).squaredNorm();
  if (tss <= 0.0) return rss <= 0.0 ? 1.0 : 0.0;
  return 1.0 - rss / tss;
}

}  // namespace

double Stage1Fit::PredictOutcome(double z) const {
  return qbasis.Eval(z).dot(omega);
}

Eigen::VectorXd Stage1Fit::PredictTargets(double z) const {
  return nu.transpose() * qbasis.Eval(z);
}

Stage1Fit FitStage1(const TwoSampleDataset& data, const BasisSpec& spec,
                    const InstrumentBasis& qbasis, double z0,
                    Stage1Target target) {
  const int p = qbasis.degree();
  if (data.n1() < p || data.n2() < p) {
    Fail(ErrorCode::kTooFewSamples,
         "stage 1 needs at least P = " + std::to_string(p) +
             " records in each sample");
  }
  if (!std::isfinite(z0)) Fail(ErrorCode::kInvalidArgument, "z0 must be finite");
  if (spec.d() != data.d()) {
    Fail(ErrorCode::kDimensionMismatch, "basis d differs from dataset d");
  }
  const auto& s1 = data.sample1();
  const auto& s2 = data.sample2();
  const double n1 = static_cast<double>(data.n1());
  const double n2 = static_cast<double>(data.n2());

  Stage1Fit fit;
  fit.qbasis = qbasis;
  fit.target = target;
  fit.z0 = z0;

  const Eigen::MatrixXd q1 = qbasis.Matrix(s1.z);
  const Eigen::MatrixXd q2 = qbasis.Matrix(s2.z);
  const Eigen::MatrixXd t =
      target == Stage1Target::kAntiderivative
          ? AntiderivativeMatrix(spec, s1.x, s1.w)
          : BasisMatrix(spec, s1.x, s1.w);

  fit.m1 = q1.transpose() * q1 / n1;
  fit.m2 = q2.transpose() * q2 / n2;
  const PseudoInverse pinv1 = ComputePseudoInverse(fit.m1);
  const PseudoInverse pinv2 = ComputePseudoInverse(fit.m2);
  fit.m1_pinv = pinv1.matrix;
  fit.m2_pinv = pinv2.matrix;
  fit.omega = fit.m2_pinv * (q2.transpose() * s2.y / n2);
  fit.nu = fit.m1_pinv * (q1.transpose() * t / n1);

  auto& diag = fit.diagnostics;
  diag.m1_condition = pinv1.condition;
  diag.m2_condition = pinv2.condition;
  diag.m1_rank = pinv1.rank;
  diag.m2_rank = pinv2.rank;
  diag.rank_deficient = pinv1.rank < p || pinv2.rank < p;
  diag.outcome_r2 = RSquared(s2.y, q2 * fit.omega);
  const Eigen::MatrixXd t_fit = q1 * fit.nu;
  diag.target_r2.resize(spec.size());
  for (Eigen::Index j = 0; j < spec.size(); ++j) {
    diag.target_r2(j) = RSquared(t.col(j), t_fit.col(j));
  }
  return fit;
}

Stage1Moments PredictDifferences(const Stage1Fit& fit, const Eigen::VectorXd& z) {
  Eigen::MatrixXd dq = fit.qbasis.Matrix(z);
  dq.rowwise() -= fit.qbasis.Eval(fit.z0).transpose();
  return {dq * fit.omega, dq * fit.nu};
}

Stage1Moments PredictDifferences(const Stage1Fit& fit,
                                 const TwoSampleDataset& data) {
  return PredictDifferences(fit, data.StackedInstruments());
}

Stage1Moments PredictLevels(const Stage1Fit& fit, const Eigen::VectorXd& z) {
  const Eigen::MatrixXd q = fit.qbasis.Matrix(z);
  return {q * fit.omega, q * fit.nu};
}

double DefaultAnchor(const TwoSampleDataset& data) {
  return data.StackedInstruments().minCoeff();
}

}  // namespace capce
