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
#include <limits>

#include "capce/error.h"
#include "capce/linalg.h"
#include "kernel_internal.h"
#include "series_internal.h"

namespace capce {
namespace {

Eigen::VectorXd PointRow(double x, const Eigen::VectorXd& w) {
  Eigen::VectorXd p(1 + w.size());
  p << x, w;
  return p;
}

StructuralModel FinishTwoStage(StructuralKind kind, const BasisSpec& spec,
                               const internal::SeriesProblem& problem,
                               Eigen::VectorXd coef, double zeta, ZetaPath path) {
  FitInfo info;
  info.p_degree = problem.fit.qbasis.degree();
  info.zeta = zeta;
  info.zeta_path = std::move(path);
  info.stage1 = problem.fit.diagnostics;
  const auto& m = problem.moments;
  const Eigen::VectorXd penalty = Eigen::VectorXd::Ones(spec.size());
  info.normal_residual = RidgeResidual(m.d, m.c, zeta, penalty, coef);
  info.rhs_scale = (m.d.transpose() * m.c).cwiseAbs().maxCoeff();
  return StructuralModel::Series(kind, spec, std::move(coef), std::move(info));
}

StructuralModel FitTwoStage(StructuralKind kind, const TwoSampleDataset& train,
                            const BasisSpec& spec, const InstrumentBasis& qbasis,
                            const std::vector<double>& zeta_grid,
                            const TwoSampleDataset& test) {
  // The anchor is unused for level targets.
  const auto problem =
      internal::BuildSeriesProblem(train, spec, qbasis, 0.0, Stage1Target::kLevel);
  const auto held_out =
      internal::BuildSeriesProblem(test, spec, qbasis, 0.0, Stage1Target::kLevel);
  const Eigen::VectorXd penalty = Eigen::VectorXd::Ones(spec.size());
  auto choice = SelectRidge(problem.moments, held_out.moments, zeta_grid, penalty);
  return FinishTwoStage(kind, spec, problem, std::move(choice.coefficients), choice.zeta,
                        std::move(choice.path));
}

StructuralModel FitTwoStageAt(StructuralKind kind, const TwoSampleDataset& train,
                              const BasisSpec& spec, const InstrumentBasis& qbasis,
                              double zeta) {
  const auto problem =
      internal::BuildSeriesProblem(train, spec, qbasis, 0.0, Stage1Target::kLevel);
  const Eigen::VectorXd penalty = Eigen::VectorXd::Ones(spec.size());
  Eigen::VectorXd coef = SolveRidge(problem.moments.d, problem.moments.c, zeta, penalty);
  if (!coef.allFinite()) Fail(ErrorCode::kSingularSystem, "ridge solve is not finite");
  return FinishTwoStage(kind, spec, problem, std::move(coef), zeta, ZetaPath{{zeta}, {}, 0});
}

}  // namespace

std::string StructuralKindName(StructuralKind kind) {
  switch (kind) {
    case StructuralKind::kPtsls: return "ptsls";
    case StructuralKind::kNtsls: return "ntsls";
    case StructuralKind::kKernelIv: return "kernel_iv";
  }
  return "unknown";
}

StructuralKind StructuralKindFromName(const std::string& name) {
  if (name == "ptsls") return StructuralKind::kPtsls;
  if (name == "ntsls") return StructuralKind::kNtsls;
  if (name == "kernel_iv") return StructuralKind::kKernelIv;
  Fail(ErrorCode::kInvalidArgument, "unknown baseline kind '" + name + "'");
}

StructuralModel StructuralModel::Series(StructuralKind kind, BasisSpec basis,
                                        Eigen::VectorXd coefficients, FitInfo info) {
  if (kind == StructuralKind::kKernelIv) {
    Fail(ErrorCode::kInvalidArgument, "kernel IV is not a series model");
  }
  if (coefficients.size() != basis.size()) {
    Fail(ErrorCode::kDimensionMismatch, "coefficient count differs from basis size");
  }
  StructuralModel m;
  m.kind_ = kind;
  m.d_ = basis.d();
  m.basis_ = std::move(basis);
  m.coefficients_ = std::move(coefficients);
  m.info_ = std::move(info);
  return m;
}

StructuralModel StructuralModel::KernelIv(KernelConfig kernel, int d,
                                          Eigen::VectorXd theta, double step,
                                          FitInfo info) {
  kernel.Validate();
  if (theta.size() != kernel.TreatmentKernel().FeatureCount(1 + d)) {
    Fail(ErrorCode::kDimensionMismatch, "kernel IV weights differ from feature count");
  }
  if (!(step > 0.0)) Fail(ErrorCode::kInvalidArgument, "difference step must be positive");
  StructuralModel m;
  m.kind_ = StructuralKind::kKernelIv;
  m.d_ = d;
  m.kernel_ = kernel;
  m.coefficients_ = std::move(theta);
  m.step_ = step;
  m.info_ = std::move(info);
  return m;
}

const BasisSpec& StructuralModel::basis() const {
  if (!basis_) Fail(ErrorCode::kInvalidArgument, "kernel IV model has no basis");
  return *basis_;
}

double StructuralModel::EvaluateLevel(double x, const Eigen::VectorXd& w) const {
  if (basis_) return EvalBasis(*basis_, x, w).dot(coefficients_);
  if (w.size() != d_) Fail(ErrorCode::kDimensionMismatch, "covariate length mismatch");
  const Eigen::MatrixXd point = PointRow(x, w).transpose();
  return kernel_.TreatmentKernel().Features(point).row(0).dot(coefficients_);
}

double StructuralModel::EvaluateDx(double x, const Eigen::VectorXd& w) const {
  if (basis_) return EvalBasisDx(*basis_, x, w).dot(coefficients_);
  return (EvaluateLevel(x + step_, w) - EvaluateLevel(x - step_, w)) / (2.0 * step_);
}

double StructuralModel::EvaluateDx(double x, double w) const {
  return EvaluateDx(x, Eigen::VectorXd::Constant(1, w));
}

Eigen::VectorXd StructuralModel::EvaluateDxMany(const Eigen::VectorXd& x,
                                                const Eigen::MatrixXd& w) const {
  if (basis_) return BasisDxMatrix(*basis_, x, w) * coefficients_;
  const PolynomialKernel k = kernel_.TreatmentKernel();
  const Eigen::VectorXd hi = k.Features(TreatmentPoints(x.array() + step_, w)) * coefficients_;
  const Eigen::VectorXd lo = k.Features(TreatmentPoints(x.array() - step_, w)) * coefficients_;
  return (hi - lo) / (2.0 * step_);
}

std::vector<std::pair<std::string, double>> StructuralModel::DerivativeTerms() const {
  if (!basis_ || basis_->hermite()) {
    Fail(ErrorCode::kInvalidArgument, "derivative terms need a monomial basis");
  }
  std::vector<BasisTerm> order;
  std::vector<double> values;
  for (size_t j = 0; j < basis_->terms().size(); ++j) {
    const BasisTerm& t = basis_->terms()[j];
    if (t.x == 0) continue;
    BasisTerm dt{t.x - 1, t.w};
    const double v = t.x * coefficients_(static_cast<Eigen::Index>(j));
    auto it = std::find_if(order.begin(), order.end(), [&](const BasisTerm& o) {
      return o.x == dt.x && o.w == dt.w;
    });
    if (it == order.end()) {
      order.push_back(dt);
      values.push_back(v);
    } else {
      values[static_cast<size_t>(it - order.begin())] += v;
    }
  }
  std::vector<std::pair<std::string, double>> out;
  if (order.empty()) return out;
  std::vector<std::string> names;
  for (const auto& t : order) {
    std::string s;
    if (t.x > 0) s += "X" + (t.x > 1 ? std::to_string(t.x) : std::string());
    for (size_t k = 0; k < t.w.size(); ++k) {
      if (t.w[k] == 0) continue;
      if (t.w.size() == 1) {
        s += "W" + (t.w[k] > 1 ? std::to_string(t.w[k]) : std::string());
      } else {
        s += "W_" + std::to_string(k + 1) + (t.w[k] > 1 ? "^" + std::to_string(t.w[k]) : "");
      }
    }
    names.push_back(s.empty() ? "1" : s);
  }
  for (size_t k = 0; k < order.size(); ++k) out.emplace_back(names[k], values[k]);
  return out;
}

StructuralModel FitPtsls(const TwoSampleDataset& train, const BasisSpec& level_terms,
                         const InstrumentBasis& qbasis,
                         const std::vector<double>& zeta_grid,
                         const TwoSampleDataset& test) {
  return FitTwoStage(StructuralKind::kPtsls, train, level_terms, qbasis, zeta_grid, test);
}

StructuralModel FitPtslsAt(const TwoSampleDataset& train, const BasisSpec& level_terms,
                           const InstrumentBasis& qbasis, double zeta) {
  return FitTwoStageAt(StructuralKind::kPtsls, train, level_terms, qbasis, zeta);
}

StructuralModel FitNtsls(const TwoSampleDataset& train, const BasisSpec& hermite_spec,
                         const InstrumentBasis& qbasis,
                         const std::vector<double>& zeta_grid,
                         const TwoSampleDataset& test) {
  return FitTwoStage(StructuralKind::kNtsls, train, hermite_spec, qbasis, zeta_grid, test);
}

StructuralModel FitNtslsAt(const TwoSampleDataset& train, const BasisSpec& hermite_spec,
                           const InstrumentBasis& qbasis, double zeta) {
  return FitTwoStageAt(StructuralKind::kNtsls, train, hermite_spec, qbasis, zeta);
}

namespace {

struct KivStage {
  Eigen::MatrixXd m;    // b x N2
  Eigen::MatrixXd map;  // b x a
};

KivStage BuildKiv(const TwoSampleDataset& train, const KernelConfig& k) {
  const PolynomialKernel kz = k.InstrumentKernel();
  const auto emb = internal::FitEmbedding(train, kz, k.TreatmentKernel(), k.lambda1);
  const Eigen::MatrixXd phi2 = kz.Features(ScalarPoints(train.sample2().z));
  return {emb.map * phi2.transpose(), emb.map};
}

Eigen::VectorXd SolveKiv(const KivStage& s, const Eigen::VectorXd& y, double xi) {
  Eigen::MatrixXd lhs = s.m * s.m.transpose();
  lhs.diagonal().array() += static_cast<double>(y.size()) * xi;
  return SolveGram(lhs, s.m * y).col(0);
}

double DifferenceStep(const TwoSampleDataset& train) {
  const double range = train.sample1().x.maxCoeff() - train.sample1().x.minCoeff();
  return 1e-3 * (range > 0.0 ? range : 1.0);
}

}  // namespace

StructuralModel FitKernelIv(const TwoSampleDataset& train, const KernelConfig& kernel) {
  kernel.Validate();
  if (train.n1() < 2 || train.n2() < 2) {
    Fail(ErrorCode::kTooFewSamples, "kernel IV needs at least 2 records per sample");
  }
  const KivStage s = BuildKiv(train, kernel);
  Eigen::VectorXd theta = SolveKiv(s, train.sample2().y, kernel.xi);
  if (!theta.allFinite()) Fail(ErrorCode::kGramSingular, "kernel IV weights are not finite");
  return StructuralModel::KernelIv(kernel, static_cast<int>(train.d()), std::move(theta),
                                   DifferenceStep(train), FitInfo{});
}

KernelConfig KernelIvSelect(const TwoSampleDataset& train,
                            const TwoSampleDataset& validation, const RkhsGrids& grids) {
  if (grids.c1.empty() || grids.c2.empty() || grids.c3.empty() || grids.c4.empty() ||
      grids.lambda1.empty() || grids.lambda2.empty() || grids.xi.empty()) {
    Fail(ErrorCode::kInvalidArgument, "every kernel IV grid needs at least one value");
  }
  const auto inst = internal::SelectInstrumentKernel(train, validation, grids.c1,
                                                     grids.c2, grids.lambda2);
  KernelConfig base;
  base.c1 = inst.c1;
  base.c2 = inst.c2;
  base.lambda2 = inst.lambda2;
  const PolynomialKernel kz = base.InstrumentKernel();
  const Eigen::MatrixXd phi2_v = kz.Features(ScalarPoints(validation.sample2().z));

  auto c3s = grids.c3;
  auto c4s = grids.c4;
  auto xis = grids.xi;
  std::sort(c3s.begin(), c3s.end());
  std::sort(c4s.begin(), c4s.end());
  std::sort(xis.begin(), xis.end(), std::greater<double>());

  double best = std::numeric_limits<double>::infinity();
  KernelConfig chosen = base;
  for (int c4 : c4s) {
    for (double c3 : c3s) {
      KernelConfig k = base;
      k.c3 = c3;
      k.c4 = c4;
      double l1_loss = 0.0;
      k.lambda1 = internal::SelectEmbeddingLambda(train, validation, kz,
                                                  k.TreatmentKernel(), grids.lambda1,
                                                  &l1_loss);
      if (!std::isfinite(l1_loss)) continue;
      const KivStage s = BuildKiv(train, k);
      const Eigen::MatrixXd pred_map = phi2_v * s.map.transpose();
      for (double xi : xis) {
        const Eigen::VectorXd theta = SolveKiv(s, train.sample2().y, xi);
        const double loss = (validation.sample2().y - pred_map * theta).squaredNorm() /
                            static_cast<double>(validation.n2());
        if (internal::Improves(loss, best)) {
          best = loss;
          chosen = k;
          chosen.xi = xi;
        }
      }
    }
  }
  if (!std::isfinite(best)) Fail(ErrorCode::kGramSingular, "no finite kernel IV candidate");
  return chosen;
}

}  // namespace capce
