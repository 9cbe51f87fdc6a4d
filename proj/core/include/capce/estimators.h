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

#ifndef CAPCE_ESTIMATORS_H_
#define CAPCE_ESTIMATORS_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "capce/basis.h"
#include "capce/data_model.h"
#include "capce/kernels.h"
#include "capce/stage1.h"

namespace capce {

// Default regularization grid shared by the series estimators.
std::vector<double> DefaultZetaGrid();

// Monte Carlo settings for the weighted Sobolev penalty matrix.
struct LambdaConfig {
  double x_lo = -4.0;
  double x_hi = 4.0;
  double w_lo = -2.0;  // applied to every covariate
  double w_hi = 2.0;
  double kappa = 2.0;  // 0 switches off the weight (check mode)
  int order = 1;
  Eigen::Index n_mc = 100000;
  std::uint64_t seed = 1;
};

struct LambdaMatrix {
  Eigen::MatrixXd values;
  Eigen::MatrixXd standard_errors;
  LambdaConfig config;
};

// Lambda_ij = vol * mean over uniform draws of
//   sum_{|l| <= order} (D^l vphi_i - [l = 0] a_i)(D^l vphi_j - [l = 0] a_j)
//   * (1 + x^2 + |w|^2)^kappa
// where vphi are the basis antiderivatives and a = `anchor` holds their
// stage-1 predictions at z0. Throws kKappaTooSmall unless kappa == 0 or
// kappa > (1 + d) / 2, and kInvalidArgument when n_mc < 1000.
LambdaMatrix MonteCarloLambda(const BasisSpec& spec, const Eigen::VectorXd& anchor,
                              const LambdaConfig& config);
LambdaMatrix MonteCarloLambda(const BasisSpec& spec, const Stage1Fit& fit,
                              const LambdaConfig& config);

// Ridge solution (D^T D + zeta diag(penalty))^{-1} D^T c.
Eigen::VectorXd SolveRidge(const Eigen::MatrixXd& d, const Eigen::VectorXd& c,
                           double zeta, const Eigen::VectorXd& penalty);

// max |(D^T D + zeta diag(penalty)) b - D^T c|.
double RidgeResidual(const Eigen::MatrixXd& d, const Eigen::VectorXd& c,
                     double zeta, const Eigen::VectorXd& penalty,
                     const Eigen::VectorXd& b);

// Held-out risk of every grid value, in grid order. `chosen` indexes the
// minimum; equal risks go to the larger zeta.
struct ZetaPath {
  std::vector<double> zetas;
  std::vector<double> test_risk;
  size_t chosen = 0;
};

struct RidgeChoice {
  Eigen::VectorXd coefficients;
  double zeta = 0.0;
  ZetaPath path;
};

// Fits every zeta on (d, c) and scores mean (c' - d' b)^2 on the held-out
// moments. Non-finite solutions are skipped; throws kSingularSystem when
// none is finite.
RidgeChoice SelectRidge(const Stage1Moments& train, const Stage1Moments& test,
                        const std::vector<double>& zeta_grid,
                        const Eigen::VectorXd& penalty);

struct KernelConfig {
  double c1 = 1.0;  // instrument kernel (z z' + c1)^c2
  int c2 = 1;
  double c3 = 1.0;  // treatment kernel ((x, w)^T (x', w') + c3)^c4
  int c4 = 1;
  double lambda1 = 0.1;
  double lambda2 = 0.1;
  double lambda3 = 1.0;
  double xi = 1.0;

  PolynomialKernel InstrumentKernel() const { return {c1, c2}; }
  PolynomialKernel TreatmentKernel() const { return {c3, c4}; }
  void Validate() const;
};

enum class CapceKind { kSieve, kParametric, kRkhs };
std::string CapceKindName(CapceKind kind);
CapceKind CapceKindFromName(const std::string& name);

struct FitInfo {
  int p_degree = 0;
  double zeta = 0.0;
  ZetaPath zeta_path;
  Stage1Diagnostics stage1;
  Eigen::VectorXd lambda_diagonal;
  // Normal-equation residual of the final solve and the scale max|D^T c|.
  double normal_residual = 0.0;
  double rhs_scale = 0.0;
  // Selection losses (RKHS).
  double outcome_loss = 0.0;
  double embedding_loss = 0.0;
  double validation_loss = 0.0;
};

// A fitted CAPCE surface.
//   sieve / parametric: sum_j b_j phi_j(x, w)
//   rkhs:               sum_i a_i d/dx k((x_i, w_i), (x, w))
// The RKHS fit identifies h = sum_i a_i k((x_i, w_i), .) as the antiderivative
// surface; EvaluateAntiderivative returns it.
class CapceModel {
 public:
  static CapceModel Series(CapceKind kind, BasisSpec basis,
                           Eigen::VectorXd coefficients, double z0, FitInfo info);
  static CapceModel Rkhs(KernelConfig kernel, Eigen::MatrixXd anchors,
                         Eigen::VectorXd alpha, double z0, FitInfo info);

  CapceKind kind() const { return kind_; }
  int d() const;
  const BasisSpec& basis() const;
  const KernelConfig& kernel() const { return kernel_; }
  const Eigen::MatrixXd& anchors() const { return anchors_; }
  const Eigen::VectorXd& coefficients() const { return coefficients_; }
  // Coefficients over the treatment-kernel feature map (RKHS only).
  const Eigen::VectorXd& primal() const { return primal_; }
  double z0() const { return z0_; }
  const FitInfo& info() const { return info_; }

  double Evaluate(double x, const Eigen::VectorXd& w) const;
  double Evaluate(double x, double w) const;
  Eigen::VectorXd EvaluateMany(const Eigen::VectorXd& x,
                               const Eigen::MatrixXd& w) const;
  double EvaluateAntiderivative(double x, const Eigen::VectorXd& w) const;

 private:
  CapceModel() = default;

  CapceKind kind_ = CapceKind::kParametric;
  std::optional<BasisSpec> basis_;
  KernelConfig kernel_;
  Eigen::MatrixXd anchors_;
  Eigen::VectorXd coefficients_;
  Eigen::VectorXd primal_;
  double z0_ = 0.0;
  FitInfo info_;
};

// Sieve estimator with the Monte Carlo Sobolev penalty; zeta chosen by the
// held-out risk on `test` (stage 1 refit on the test samples).
CapceModel FitSieve(const TwoSampleDataset& train, const BasisSpec& spec,
                    const InstrumentBasis& qbasis, double z0,
                    const std::vector<double>& zeta_grid,
                    const TwoSampleDataset& test, const LambdaConfig& lambda);
// Same with a fixed zeta.
CapceModel FitSieveAt(const TwoSampleDataset& train, const BasisSpec& spec,
                      const InstrumentBasis& qbasis, double z0, double zeta,
                      const LambdaConfig& lambda);

// Parametric estimator with an identity ridge penalty.
CapceModel FitParametric(const TwoSampleDataset& train, const BasisSpec& terms,
                         const InstrumentBasis& qbasis, double z0,
                         const std::vector<double>& zeta_grid,
                         const TwoSampleDataset& test);
CapceModel FitParametricAt(const TwoSampleDataset& train, const BasisSpec& terms,
                           const InstrumentBasis& qbasis, double z0, double zeta);

enum class RkhsSolver {
  kFactored,  // exact, through the finite polynomial feature maps
  kDense,     // N1 x N1 Gram matrices; for small samples and verification
};

// RKHS estimator:
//   O = Kxx (K11 + N1 l1 I)^{-1} (K12 - k1(z0) 1^T)               (N1 x N2)
//   u = (K22 - k2(z0) 1^T)^T (K22 + N2 l2 I)^{-1} y               (N2)
//   a = (O O^T + N2 xi Kxx + N2 l3 I)^{-1} O u                    (N1)
// Throws kGramSingular when a system stays singular after diagonal jitter.
CapceModel FitRkhs(const TwoSampleDataset& train, const KernelConfig& kernel,
                   double z0, RkhsSolver solver = RkhsSolver::kFactored);

struct RkhsGrids {
  std::vector<double> c1 = {1, 2, 3, 4, 5};
  std::vector<int> c2 = {1, 2, 3, 4, 5};
  std::vector<double> c3 = {1, 2, 3, 4, 5};
  std::vector<int> c4 = {1, 2, 3, 4, 5};
  std::vector<double> lambda1 = {1, 0.1, 0.01, 0.001};
  std::vector<double> lambda2 = {1, 0.1, 0.01, 0.001};
  std::vector<double> lambda3 = {100, 10, 1};
  std::vector<double> xi = {100, 10, 1};
};

struct RkhsSelection {
  KernelConfig config;
  double outcome_loss = 0.0;    // held-out outcome prediction loss at (c1, c2, l2)
  double embedding_loss = 0.0;  // held-out feature-embedding loss at (c3, c4, l1)
  double validation_loss = 0.0; // held-out anchored-moment loss at the final choice
};

// Sequential selection on held-out data:
//   1. (c1, c2, l2) minimizing mean (y' - yhat(z'))^2;
//   2. for every (c3, c4), l1 minimizing mean |psi(s') - B phi(z')|^2;
//   3. (c3, c4, l3, xi) minimizing mean (u'_j - a^T O'_j)^2 where u' are the
//      anchored outcome predictions on the validation samples.
// Equal losses keep the earlier candidate; grids are walked from strongest to
// weakest regularization and from simpler to richer kernels.
RkhsSelection RkhsSelect(const TwoSampleDataset& train,
                         const TwoSampleDataset& validation, double z0,
                         const RkhsGrids& grids = {});

}  // namespace capce

#endif  // CAPCE_ESTIMATORS_H_
