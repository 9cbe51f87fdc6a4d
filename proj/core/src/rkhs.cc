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
#include <functional>
#include <limits>

#include "capce/error.h"
#include "capce/estimators.h"
#include "capce/linalg.h"
#include "kernel_internal.h"

namespace capce {
namespace {

template <typename T>
std::vector<T> Sorted(std::vector<T> v, bool descending) {
  if (descending) {
    std::sort(v.begin(), v.end(), std::greater<T>());
  } else {
    std::sort(v.begin(), v.end());
  }
  return v;
}

using internal::Improves;

Eigen::RowVectorXd AnchorFeatures(const PolynomialKernel& kz, double z0) {
  return kz.Features(Eigen::MatrixXd::Constant(1, 1, z0)).row(0);
}

// Pieces of the factored second stage that do not depend on (l3, xi).
struct SecondStage {
  Eigen::MatrixXd psi;  // N1 x b
  Eigen::MatrixXd gram; // Psi^T Psi
  Eigen::MatrixXd m;    // b x N2, O = Psi m
  Eigen::VectorXd u;    // N2
  Eigen::MatrixXd map;  // b x a
};

SecondStage BuildSecondStage(const TwoSampleDataset& train, const KernelConfig& k,
                             double z0) {
  const PolynomialKernel kz = k.InstrumentKernel();
  const auto emb = internal::FitEmbedding(train, kz, k.TreatmentKernel(), k.lambda1);
  const Eigen::MatrixXd phi2 = kz.Features(ScalarPoints(train.sample2().z));
  Eigen::MatrixXd delta2 = phi2;
  delta2.rowwise() -= AnchorFeatures(kz, z0);
  SecondStage s;
  s.psi = emb.psi;
  s.gram = emb.psi.transpose() * emb.psi;
  s.m = emb.map * delta2.transpose();
  s.u = delta2 * internal::OutcomeWeights(phi2, train.sample2().y, k.lambda2);
  s.map = emb.map;
  return s;
}

// Returns v with alpha = Psi v.
Eigen::VectorXd SolveSecondStage(const SecondStage& s, double n2, double lambda3,
                                 double xi) {
  Eigen::MatrixXd sm = s.m * s.m.transpose();
  sm.diagonal().array() += n2 * xi;
  Eigen::MatrixXd lhs = sm * s.gram;
  lhs.diagonal().array() += n2 * lambda3;
  Eigen::MatrixXd rhs = s.m * s.u;
  return SolveGeneral(lhs, rhs).col(0);
}

CapceModel FitDense(const TwoSampleDataset& train, const KernelConfig& k, double z0) {
  const PolynomialKernel kz = k.InstrumentKernel();
  const PolynomialKernel kxw = k.TreatmentKernel();
  const double n1 = static_cast<double>(train.n1());
  const double n2 = static_cast<double>(train.n2());
  const Eigen::MatrixXd z1 = ScalarPoints(train.sample1().z);
  const Eigen::MatrixXd z2 = ScalarPoints(train.sample2().z);
  const Eigen::MatrixXd zz0 = Eigen::MatrixXd::Constant(1, 1, z0);
  const Eigen::MatrixXd s1 = TreatmentPoints(train.sample1().x, train.sample1().w);

  Eigen::MatrixXd k11 = kz.Gram(z1, z1);
  k11.diagonal().array() += n1 * k.lambda1;
  Eigen::MatrixXd k12 = kz.Gram(z1, z2);
  k12.colwise() -= kz.Gram(z1, zz0).col(0);
  const Eigen::MatrixXd kxx = kxw.Gram(s1, s1);
  const Eigen::MatrixXd o = kxx * SolveGram(k11, k12);

  const Eigen::MatrixXd k22raw = kz.Gram(z2, z2);
  Eigen::MatrixXd k22 = k22raw;
  k22.diagonal().array() += n2 * k.lambda2;
  Eigen::MatrixXd k22d = k22raw;
  k22d.colwise() -= kz.Gram(z2, zz0).col(0);
  const Eigen::VectorXd u =
      k22d.transpose() * SolveGram(k22, train.sample2().y).col(0);

  Eigen::MatrixXd lhs = o * o.transpose() + n2 * k.xi * kxx;
  lhs.diagonal().array() += n2 * k.lambda3;
  Eigen::VectorXd alpha = SolveGram(lhs, o * u).col(0);
  return CapceModel::Rkhs(k, s1, std::move(alpha), z0, FitInfo{});
}

}  // namespace

namespace internal {

bool Improves(double loss, double best) {
  if (!std::isfinite(loss)) return false;
  if (!std::isfinite(best)) return true;
  return loss < best - 1e-12 * std::max(1.0, std::abs(best));
}

InstrumentChoice SelectInstrumentKernel(const TwoSampleDataset& train,
                                        const TwoSampleDataset& validation,
                                        std::vector<double> c1s, std::vector<int> c2s,
                                        std::vector<double> lambda2s) {
  c1s = Sorted(std::move(c1s), false);
  c2s = Sorted(std::move(c2s), false);
  lambda2s = Sorted(std::move(lambda2s), true);
  InstrumentChoice out;
  double best = std::numeric_limits<double>::infinity();
  for (int c2 : c2s) {
    for (double c1 : c1s) {
      const PolynomialKernel kz(c1, c2);
      const Eigen::MatrixXd phi = kz.Features(ScalarPoints(train.sample2().z));
      const Eigen::MatrixXd phi_v = kz.Features(ScalarPoints(validation.sample2().z));
      for (double l2 : lambda2s) {
        const Eigen::VectorXd a = OutcomeWeights(phi, train.sample2().y, l2);
        const double loss = (validation.sample2().y - phi_v * a).squaredNorm() /
                            static_cast<double>(validation.n2());
        if (Improves(loss, best)) {
          best = loss;
          out = {c1, c2, l2, loss};
        }
      }
    }
  }
  if (!std::isfinite(best)) Fail(ErrorCode::kGramSingular, "no finite outcome regression");
  return out;
}

double SelectEmbeddingLambda(const TwoSampleDataset& train,
                             const TwoSampleDataset& validation,
                             const PolynomialKernel& kz, const PolynomialKernel& kxw,
                             std::vector<double> lambda1s, double* loss) {
  lambda1s = Sorted(std::move(lambda1s), true);
  const Eigen::MatrixXd phi1_v = kz.Features(ScalarPoints(validation.sample1().z));
  const Eigen::MatrixXd psi_v =
      kxw.Features(TreatmentPoints(validation.sample1().x, validation.sample1().w));
  double best = std::numeric_limits<double>::infinity();
  double chosen = lambda1s.front();
  for (double l1 : lambda1s) {
    const auto emb = FitEmbedding(train, kz, kxw, l1);
    const double l = (psi_v - phi1_v * emb.map.transpose()).squaredNorm() /
                     static_cast<double>(validation.n1());
    if (Improves(l, best)) {
      best = l;
      chosen = l1;
    }
  }
  *loss = best;
  return chosen;
}

}  // namespace internal

CapceModel FitRkhs(const TwoSampleDataset& train, const KernelConfig& kernel,
                   double z0, RkhsSolver solver) {
  kernel.Validate();
  if (train.n1() < 2 || train.n2() < 2) {
    Fail(ErrorCode::kTooFewSamples, "RKHS fit needs at least 2 records per sample");
  }
  if (!std::isfinite(z0)) Fail(ErrorCode::kInvalidArgument, "z0 must be finite");
  if (solver == RkhsSolver::kDense) return FitDense(train, kernel, z0);

  const SecondStage s = BuildSecondStage(train, kernel, z0);
  const Eigen::VectorXd v =
      SolveSecondStage(s, static_cast<double>(train.n2()), kernel.lambda3, kernel.xi);
  Eigen::VectorXd alpha = s.psi * v;
  if (!alpha.allFinite()) Fail(ErrorCode::kGramSingular, "dual weights are not finite");
  const Eigen::MatrixXd anchors = TreatmentPoints(train.sample1().x, train.sample1().w);
  return CapceModel::Rkhs(kernel, anchors, std::move(alpha), z0, FitInfo{});
}

RkhsSelection RkhsSelect(const TwoSampleDataset& train,
                         const TwoSampleDataset& validation, double z0,
                         const RkhsGrids& grids) {
  if (grids.c1.empty() || grids.c2.empty() || grids.c3.empty() || grids.c4.empty() ||
      grids.lambda1.empty() || grids.lambda2.empty() || grids.lambda3.empty() ||
      grids.xi.empty()) {
    Fail(ErrorCode::kInvalidArgument, "every RKHS grid needs at least one value");
  }
  const auto c3s = Sorted(grids.c3, false);
  const auto c4s = Sorted(grids.c4, false);
  const auto l3s = Sorted(grids.lambda3, true);
  const auto xis = Sorted(grids.xi, true);
  const double inf = std::numeric_limits<double>::infinity();

  RkhsSelection out;
  KernelConfig& cfg = out.config;

  const auto inst = internal::SelectInstrumentKernel(train, validation, grids.c1,
                                                     grids.c2, grids.lambda2);
  cfg.c1 = inst.c1;
  cfg.c2 = inst.c2;
  cfg.lambda2 = inst.lambda2;
  out.outcome_loss = inst.loss;

  const PolynomialKernel kz = cfg.InstrumentKernel();
  const Eigen::RowVectorXd phi0 = AnchorFeatures(kz, z0);
  Eigen::MatrixXd delta2_v = kz.Features(ScalarPoints(validation.sample2().z));
  const Eigen::VectorXd a_v = internal::OutcomeWeights(
      delta2_v, validation.sample2().y, cfg.lambda2);
  delta2_v.rowwise() -= phi0;
  const Eigen::VectorXd u_v = delta2_v * a_v;

  double best_final = inf;
  KernelConfig chosen = cfg;
  for (int c4 : c4s) {
    for (double c3 : c3s) {
      KernelConfig k = cfg;
      k.c3 = c3;
      k.c4 = c4;
      const PolynomialKernel kxw = k.TreatmentKernel();

      double best_l1 = inf;
      k.lambda1 = internal::SelectEmbeddingLambda(train, validation, kz, kxw,
                                                  grids.lambda1, &best_l1);
      if (!std::isfinite(best_l1)) continue;

      const SecondStage s = BuildSecondStage(train, k, z0);
      const Eigen::MatrixXd pred_map = delta2_v * s.map.transpose();  // N2' x b
      for (double l3 : l3s) {
        for (double xi : xis) {
          const Eigen::VectorXd v =
              SolveSecondStage(s, static_cast<double>(train.n2()), l3, xi);
          const Eigen::VectorXd theta = s.gram * v;
          const double loss = (u_v - pred_map * theta).squaredNorm() /
                              static_cast<double>(validation.n2());
          if (Improves(loss, best_final)) {
            best_final = loss;
            chosen = k;
            chosen.lambda3 = l3;
            chosen.xi = xi;
            out.embedding_loss = best_l1;
          }
        }
      }
    }
  }
  if (!std::isfinite(best_final)) Fail(ErrorCode::kGramSingular, "no finite RKHS candidate");
  out.config = chosen;
  out.validation_loss = best_final;
  return out;
}

}  // namespace capce
