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

#include "capce/estimators.h"

#include <cmath>
#include <limits>
#include <random>

#include "capce/error.h"
#include "capce/linalg.h"
#include "series_internal.h"

namespace capce {

std::vector<double> DefaultZetaGrid() { return {1.0, 0.1, 0.01, 0.001}; }

LambdaMatrix MonteCarloLambda(const BasisSpec& spec, const Eigen::VectorXd& anchor,
                              const LambdaConfig& config) {
  const int d = spec.d();
  if (config.kappa != 0.0 && !(config.kappa > (1.0 + d) / 2.0)) {
    Fail(ErrorCode::kKappaTooSmall,
         "kappa = " + std::to_string(config.kappa) + " must exceed (1 + d) / 2 = " +
             std::to_string((1.0 + d) / 2.0));
  }
  if (config.n_mc < 1000) Fail(ErrorCode::kInvalidArgument, "n_mc must be >= 1000");
  if (config.order < 0) Fail(ErrorCode::kInvalidArgument, "order must be >= 0");
  if (!(config.x_lo < config.x_hi) || !(config.w_lo < config.w_hi)) {
    Fail(ErrorCode::kBadBox, "integration box is empty");
  }
  if (anchor.size() != spec.size()) {
    Fail(ErrorCode::kDimensionMismatch, "anchor length differs from basis size");
  }
  const Eigen::Index j = spec.size();
  const double volume = (config.x_hi - config.x_lo) *
                        std::pow(config.w_hi - config.w_lo, d);
  const auto indices = MultiIndices(d, config.order);

  std::seed_seq seq{config.seed, std::uint64_t{0x1a4}};
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> ux(config.x_lo, config.x_hi);
  std::uniform_real_distribution<double> uw(config.w_lo, config.w_hi);

  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(j, j);
  Eigen::MatrixXd sum_sq = Eigen::MatrixXd::Zero(j, j);
  Eigen::VectorXd w(d);
  Eigen::MatrixXd term(j, j);
  for (Eigen::Index s = 0; s < config.n_mc; ++s) {
    const double x = ux(rng);
    for (int k = 0; k < d; ++k) w(k) = uw(rng);
    const double norm2 = x * x + w.squaredNorm();
    const double weight = config.kappa == 0.0 ? 1.0 : std::pow(1.0 + norm2, config.kappa);
    term.setZero();
    for (const auto& lambda : indices) {
      Eigen::VectorXd v = EvalBasisPartial(spec, lambda, x, w, config.order);
      bool zero_order = true;
      for (int a : lambda) zero_order = zero_order && a == 0;
      if (zero_order) v -= anchor;
      term.noalias() += v * v.transpose();
    }
    term *= weight * volume;
    sum += term;
    sum_sq += term.cwiseProduct(term);
  }
  const double n = static_cast<double>(config.n_mc);
  LambdaMatrix out;
  out.config = config;
  out.values = sum / n;
  out.values = 0.5 * (out.values + out.values.transpose()).eval();
  const Eigen::MatrixXd var =
      (sum_sq / n - out.values.cwiseProduct(out.values)).cwiseMax(0.0) * n / (n - 1.0);
  out.standard_errors = (var / n).cwiseSqrt();
  return out;
}

LambdaMatrix MonteCarloLambda(const BasisSpec& spec, const Stage1Fit& fit,
                              const LambdaConfig& config) {
  if (fit.target != Stage1Target::kAntiderivative) {
    Fail(ErrorCode::kInvalidArgument, "penalty needs an antiderivative stage-1 fit");
  }
  return MonteCarloLambda(spec, fit.PredictTargets(fit.z0), config);
}

Eigen::VectorXd SolveRidge(const Eigen::MatrixXd& d, const Eigen::VectorXd& c,
                           double zeta, const Eigen::VectorXd& penalty) {
  if (d.rows() != c.size() || penalty.size() != d.cols()) {
    Fail(ErrorCode::kDimensionMismatch, "ridge system shapes disagree");
  }
  Eigen::MatrixXd lhs = d.transpose() * d;
  lhs.diagonal() += zeta * penalty;
  return SolveSpd(lhs, d.transpose() * c);
}

double RidgeResidual(const Eigen::MatrixXd& d, const Eigen::VectorXd& c,
                     double zeta, const Eigen::VectorXd& penalty,
                     const Eigen::VectorXd& b) {
  Eigen::MatrixXd lhs = d.transpose() * d;
  lhs.diagonal() += zeta * penalty;
  return (lhs * b - d.transpose() * c).cwiseAbs().maxCoeff();
}

RidgeChoice SelectRidge(const Stage1Moments& train, const Stage1Moments& test,
                        const std::vector<double>& zeta_grid,
                        const Eigen::VectorXd& penalty) {
  if (zeta_grid.empty()) Fail(ErrorCode::kInvalidArgument, "zeta grid is empty");
  for (double z : zeta_grid) {
    if (!(z >= 0.0) || !std::isfinite(z)) {
      Fail(ErrorCode::kInvalidArgument, "zeta values must be finite and >= 0");
    }
  }
  RidgeChoice out;
  out.path.zetas = zeta_grid;
  out.path.test_risk.assign(zeta_grid.size(), std::numeric_limits<double>::quiet_NaN());
  bool found = false;
  double best = 0.0;
  for (size_t k = 0; k < zeta_grid.size(); ++k) {
    Eigen::VectorXd b = SolveRidge(train.d, train.c, zeta_grid[k], penalty);
    if (!b.allFinite()) continue;
    const double risk = (test.c - test.d * b).squaredNorm() / static_cast<double>(test.c.size());
    if (!std::isfinite(risk)) continue;
    out.path.test_risk[k] = risk;
    const double tol = 1e-12 * std::max(1.0, std::abs(best));
    const bool better = !found || risk < best - tol ||
                        (std::abs(risk - best) <= tol && zeta_grid[k] > out.zeta);
    if (better) {
      found = true;
      best = risk;
      out.zeta = zeta_grid[k];
      out.coefficients = std::move(b);
      out.path.chosen = k;
    }
  }
  if (!found) Fail(ErrorCode::kSingularSystem, "no regularization value gave a finite solution");
  return out;
}

void KernelConfig::Validate() const {
  (void)InstrumentKernel();
  (void)TreatmentKernel();
  for (double v : {lambda1, lambda2, lambda3, xi}) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      Fail(ErrorCode::kInvalidArgument, "kernel regularizers must be finite and >= 0");
    }
  }
}

std::string CapceKindName(CapceKind kind) {
  switch (kind) {
    case CapceKind::kSieve: return "sieve";
    case CapceKind::kParametric: return "parametric";
    case CapceKind::kRkhs: return "rkhs";
  }
  return "unknown";
}

CapceKind CapceKindFromName(const std::string& name) {
  if (name == "sieve") return CapceKind::kSieve;
  if (name == "parametric") return CapceKind::kParametric;
  if (name == "rkhs") return CapceKind::kRkhs;
  Fail(ErrorCode::kInvalidArgument, "unknown estimator kind '" + name + "'");
}

CapceModel CapceModel::Series(CapceKind kind, BasisSpec basis,
                              Eigen::VectorXd coefficients, double z0, FitInfo info) {
  if (kind == CapceKind::kRkhs) Fail(ErrorCode::kInvalidArgument, "series model cannot be rkhs");
  if (coefficients.size() != basis.size()) {
    Fail(ErrorCode::kDimensionMismatch, "coefficient count differs from basis size");
  }
  CapceModel m;
  m.kind_ = kind;
  m.basis_ = std::move(basis);
  m.coefficients_ = std::move(coefficients);
  m.z0_ = z0;
  m.info_ = std::move(info);
  return m;
}

CapceModel CapceModel::Rkhs(KernelConfig kernel, Eigen::MatrixXd anchors,
                            Eigen::VectorXd alpha, double z0, FitInfo info) {
  if (alpha.size() != anchors.rows()) {
    Fail(ErrorCode::kDimensionMismatch, "dual weight count differs from anchor count");
  }
  kernel.Validate();
  CapceModel m;
  m.kind_ = CapceKind::kRkhs;
  m.kernel_ = kernel;
  m.primal_ = kernel.TreatmentKernel().Features(anchors).transpose() * alpha;
  m.anchors_ = std::move(anchors);
  m.coefficients_ = std::move(alpha);
  m.z0_ = z0;
  m.info_ = std::move(info);
  return m;
}

int CapceModel::d() const {
  if (basis_) return basis_->d();
  return static_cast<int>(anchors_.cols()) - 1;
}

const BasisSpec& CapceModel::basis() const {
  if (!basis_) Fail(ErrorCode::kInvalidArgument, "rkhs model has no basis");
  return *basis_;
}

double CapceModel::Evaluate(double x, const Eigen::VectorXd& w) const {
  if (basis_) return EvalBasis(*basis_, x, w).dot(coefficients_);
  if (w.size() != d()) Fail(ErrorCode::kDimensionMismatch, "covariate length mismatch");
  Eigen::MatrixXd point(1, 1 + w.size());
  point << x, w.transpose();
  return kernel_.TreatmentKernel().FeaturesDx(point).row(0).dot(primal_);
}

double CapceModel::Evaluate(double x, double w) const {
  return Evaluate(x, Eigen::VectorXd::Constant(1, w));
}

Eigen::VectorXd CapceModel::EvaluateMany(const Eigen::VectorXd& x,
                                         const Eigen::MatrixXd& w) const {
  if (basis_) return BasisMatrix(*basis_, x, w) * coefficients_;
  return kernel_.TreatmentKernel().FeaturesDx(TreatmentPoints(x, w)) * primal_;
}

double CapceModel::EvaluateAntiderivative(double x, const Eigen::VectorXd& w) const {
  if (basis_) return EvalAntiderivative(*basis_, x, w).dot(coefficients_);
  if (w.size() != d()) Fail(ErrorCode::kDimensionMismatch, "covariate length mismatch");
  Eigen::MatrixXd point(1, 1 + w.size());
  point << x, w.transpose();
  return kernel_.TreatmentKernel().Features(point).row(0).dot(primal_);
}

namespace {

CapceModel FinishSeries(CapceKind kind, const BasisSpec& spec,
                        const internal::SeriesProblem& problem,
                        Eigen::VectorXd coef, double zeta, const Eigen::VectorXd& penalty,
                        ZetaPath path) {
  FitInfo info;
  info.p_degree = problem.fit.qbasis.degree();
  info.zeta = zeta;
  info.zeta_path = std::move(path);
  info.stage1 = problem.fit.diagnostics;
  if (kind == CapceKind::kSieve) info.lambda_diagonal = penalty;
  const auto& m = problem.moments;
  info.normal_residual = RidgeResidual(m.d, m.c, zeta, penalty, coef);
  info.rhs_scale = (m.d.transpose() * m.c).cwiseAbs().maxCoeff();
  return CapceModel::Series(kind, spec, std::move(coef), problem.fit.z0, std::move(info));
}

Eigen::VectorXd SievePenalty(const BasisSpec& spec, const Stage1Fit& fit,
                             const LambdaConfig& lambda) {
  return MonteCarloLambda(spec, fit, lambda).values.diagonal();
}

}  // namespace

CapceModel FitSieve(const TwoSampleDataset& train, const BasisSpec& spec,
                    const InstrumentBasis& qbasis, double z0,
                    const std::vector<double>& zeta_grid,
                    const TwoSampleDataset& test, const LambdaConfig& lambda) {
  const auto problem = internal::BuildSeriesProblem(train, spec, qbasis, z0,
                                                    Stage1Target::kAntiderivative);
  const auto held_out = internal::BuildSeriesProblem(test, spec, qbasis, z0,
                                                     Stage1Target::kAntiderivative);
  const Eigen::VectorXd penalty = SievePenalty(spec, problem.fit, lambda);
  auto choice = SelectRidge(problem.moments, held_out.moments, zeta_grid, penalty);
  return FinishSeries(CapceKind::kSieve, spec, problem, std::move(choice.coefficients),
                      choice.zeta, penalty, std::move(choice.path));
}

CapceModel FitSieveAt(const TwoSampleDataset& train, const BasisSpec& spec,
                      const InstrumentBasis& qbasis, double z0, double zeta,
                      const LambdaConfig& lambda) {
  const auto problem = internal::BuildSeriesProblem(train, spec, qbasis, z0,
                                                    Stage1Target::kAntiderivative);
  const Eigen::VectorXd penalty = SievePenalty(spec, problem.fit, lambda);
  Eigen::VectorXd coef = SolveRidge(problem.moments.d, problem.moments.c, zeta, penalty);
  if (!coef.allFinite()) Fail(ErrorCode::kSingularSystem, "ridge solve is not finite");
  return FinishSeries(CapceKind::kSieve, spec, problem, std::move(coef), zeta, penalty,
                      ZetaPath{{zeta}, {}, 0});
}

CapceModel FitParametric(const TwoSampleDataset& train, const BasisSpec& terms,
                         const InstrumentBasis& qbasis, double z0,
                         const std::vector<double>& zeta_grid,
                         const TwoSampleDataset& test) {
  const auto problem = internal::BuildSeriesProblem(train, terms, qbasis, z0,
                                                    Stage1Target::kAntiderivative);
  const auto held_out = internal::BuildSeriesProblem(test, terms, qbasis, z0,
                                                     Stage1Target::kAntiderivative);
  const Eigen::VectorXd penalty = Eigen::VectorXd::Ones(terms.size());
  auto choice = SelectRidge(problem.moments, held_out.moments, zeta_grid, penalty);
  return FinishSeries(CapceKind::kParametric, terms, problem,
                      std::move(choice.coefficients), choice.zeta, penalty,
                      std::move(choice.path));
}

CapceModel FitParametricAt(const TwoSampleDataset& train, const BasisSpec& terms,
                           const InstrumentBasis& qbasis, double z0, double zeta) {
  const auto problem = internal::BuildSeriesProblem(train, terms, qbasis, z0,
                                                    Stage1Target::kAntiderivative);
  const Eigen::VectorXd penalty = Eigen::VectorXd::Ones(terms.size());
  Eigen::VectorXd coef = SolveRidge(problem.moments.d, problem.moments.c, zeta, penalty);
  if (!coef.allFinite()) Fail(ErrorCode::kSingularSystem, "ridge solve is not finite");
  return FinishSeries(CapceKind::kParametric, terms, problem, std::move(coef), zeta,
                      penalty, ZetaPath{{zeta}, {}, 0});
}

}  // namespace capce
