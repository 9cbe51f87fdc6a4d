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

#ifndef CAPCE_PIPELINE_H_
#define CAPCE_PIPELINE_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "capce/baselines.h"
#include "capce/estimators.h"
#include "capce/evaluation.h"

namespace capce {

enum class Method { kParametric, kSieve, kRkhs, kPtsls, kNtsls, kKernelIv };

// Short names used in tables and config files: p_capce, s_capce,
// rkhs_capce, ptsls, ntsls, kernel_iv.
std::string MethodName(Method method);
Method MethodFromName(const std::string& name);
bool IsCapceMethod(Method method);

// Everything needed to fit one estimator on one dataset.
struct EstimatorConfig {
  std::string label;
  Method method = Method::kParametric;
  std::optional<BasisSpec> basis;  // series methods
  int p_degree = 3;
  std::vector<double> zeta_grid = DefaultZetaGrid();
  LambdaConfig lambda;
  RkhsGrids grids;
  // When set, kernel methods skip selection and use this configuration.
  std::optional<KernelConfig> kernel;
  // Anchor instrument value; the empirical minimum of z when unset.
  std::optional<double> z0;

  // Throws when the method needs a basis it lacks or the basis dimension
  // differs from d.
  void Validate(int d) const;
};

// Experiment defaults for covariate dimension 1:
//   p_capce  terms {1, W, X}, P = 3          ptsls  {1, W, X, XW, X2}, P = 3
//   s_capce  Hermite 3 x 3, P = 4            ntsls  Hermite 3 x 3, P = 4
EstimatorConfig DefaultEstimator(Method method);
std::vector<EstimatorConfig> DefaultEstimators();

// Hyperparameters fixed by a selection step.
struct Hyper {
  double zeta = 0.0;
  std::optional<KernelConfig> kernel;
};

// A fitted estimator of either family.
struct FittedEstimator {
  Method method = Method::kParametric;
  std::optional<CapceModel> capce;
  std::optional<StructuralModel> structural;

  Hyper hyper() const;
  CapceSurface Surface() const;
  double Evaluate(double x, const Eigen::VectorXd& w) const;

  // Coefficients of the CAPCE surface in reporting form: series CAPCE
  // coefficients, derivative terms of monomial baselines, level
  // coefficients of Hermite baselines. Empty for kernel methods.
  std::vector<std::string> CoefficientLabels() const;
  Eigen::VectorXd Coefficients() const;
};

// Fits on `train`, selecting hyperparameters on `held_out`.
FittedEstimator FitSelected(const EstimatorConfig& config, const TwoSampleDataset& train,
                            const TwoSampleDataset& held_out);

// Fits on `data` with fixed hyperparameters.
FittedEstimator FitFixed(const EstimatorConfig& config, const TwoSampleDataset& data,
                         const Hyper& hyper);

// Selects hyperparameters on a seeded split holding out `test_fraction` of
// each sample, then refits on all of `data`. The anchor is fixed from the
// full data before the split.
FittedEstimator FitSplitRefit(const EstimatorConfig& config, const TwoSampleDataset& data,
                              double test_fraction, std::uint64_t seed);

double ResolveAnchor(const EstimatorConfig& config, const TwoSampleDataset& data);

}  // namespace capce

#endif  // CAPCE_PIPELINE_H_
