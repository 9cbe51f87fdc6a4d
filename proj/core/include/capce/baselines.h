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

#ifndef CAPCE_BASELINES_H_
#define CAPCE_BASELINES_H_

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "capce/basis.h"
#include "capce/data_model.h"
#include "capce/estimators.h"

namespace capce {

enum class StructuralKind { kPtsls, kNtsls, kKernelIv };
std::string StructuralKindName(StructuralKind kind);
StructuralKind StructuralKindFromName(const std::string& name);

// A fitted level surface E[Y_x | w] and its x-derivative.
//   ptsls / ntsls: sum_j b_j phi_j(x, w), derivative taken analytically
//   kernel_iv:     theta^T psi(x, w) over the treatment-kernel feature map,
//                  derivative by central differences with a fixed step
class StructuralModel {
 public:
  static StructuralModel Series(StructuralKind kind, BasisSpec basis,
                                Eigen::VectorXd coefficients, FitInfo info);
  static StructuralModel KernelIv(KernelConfig kernel, int d,
                                  Eigen::VectorXd theta, double step, FitInfo info);

  StructuralKind kind() const { return kind_; }
  int d() const { return d_; }
  const BasisSpec& basis() const;
  const KernelConfig& kernel() const { return kernel_; }
  const Eigen::VectorXd& coefficients() const { return coefficients_; }
  double step() const { return step_; }
  const FitInfo& info() const { return info_; }

  double EvaluateLevel(double x, const Eigen::VectorXd& w) const;
  double EvaluateDx(double x, const Eigen::VectorXd& w) const;
  double EvaluateDx(double x, double w) const;
  Eigen::VectorXd EvaluateDxMany(const Eigen::VectorXd& x,
                                 const Eigen::MatrixXd& w) const;

  // The derivative surface written over monomial terms, like terms merged,
  // in first-appearance order. Monomial families only.
  std::vector<std::pair<std::string, double>> DerivativeTerms() const;

 private:
  StructuralModel() = default;

  StructuralKind kind_ = StructuralKind::kPtsls;
  int d_ = 0;
  std::optional<BasisSpec> basis_;
  KernelConfig kernel_;
  Eigen::VectorXd coefficients_;
  double step_ = 0.0;
  FitInfo info_;
};

// Two-stage least squares on level terms: each term is regressed on q(z) over
// sample1, then y's stage-1 prediction is ridge-regressed on the predicted
// terms over both samples' instruments. zeta chosen by held-out risk.
StructuralModel FitPtsls(const TwoSampleDataset& train, const BasisSpec& level_terms,
                         const InstrumentBasis& qbasis,
                         const std::vector<double>& zeta_grid,
                         const TwoSampleDataset& test);
StructuralModel FitPtslsAt(const TwoSampleDataset& train, const BasisSpec& level_terms,
                           const InstrumentBasis& qbasis, double zeta);

// The same two-stage structure over a Hermite product basis.
StructuralModel FitNtsls(const TwoSampleDataset& train, const BasisSpec& hermite_spec,
                         const InstrumentBasis& qbasis,
                         const std::vector<double>& zeta_grid,
                         const TwoSampleDataset& test);
StructuralModel FitNtslsAt(const TwoSampleDataset& train, const BasisSpec& hermite_spec,
                           const InstrumentBasis& qbasis, double zeta);

// Kernel IV closed form with finite feature maps:
//   theta = (M M^T + N2 xi I)^{-1} M y,  M = B Phi2^T
// where B phi(z) is the stage-1 embedding. Uses c1..c4, lambda1 and xi.
StructuralModel FitKernelIv(const TwoSampleDataset& train, const KernelConfig& kernel);

// Instrument kernel and embedding regularization chosen as in RkhsSelect,
// then (c3, c4, xi) by the held-out loss mean (y' - theta^T B phi(z'))^2.
KernelConfig KernelIvSelect(const TwoSampleDataset& train,
                            const TwoSampleDataset& validation,
                            const RkhsGrids& grids = {});

}  // namespace capce

#endif  // CAPCE_BASELINES_H_
