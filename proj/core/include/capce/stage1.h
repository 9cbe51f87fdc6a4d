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

#ifndef CAPCE_STAGE1_H_
#define CAPCE_STAGE1_H_

#include <Eigen/Dense>

#include "capce/basis.h"
#include "capce/data_model.h"

namespace capce {

// Which function of each basis term is regressed on q(z).
enum class Stage1Target {
  kAntiderivative,  // integral of phi_j in x (CAPCE estimators)
  kLevel,           // phi_j itself (two-stage least squares baselines)
};

struct Stage1Diagnostics {
  double outcome_r2 = 0.0;
  Eigen::VectorXd target_r2;
  double m1_condition = 0.0;
  double m2_condition = 0.0;
  Eigen::Index m1_rank = 0;
  Eigen::Index m2_rank = 0;
  // Set when either second-moment matrix is rank deficient. Fitting still
  // proceeds through the pseudo-inverse.
  bool rank_deficient = false;
};

// Power-series regressions of y on q(z) over sample2 and of every basis
// target on q(z) over sample1:
//   omega = M2^- (1/N2) sum q(z) y,   nu = M1^- (1/N1) sum q(z) t(x, w)^T
// with M_k = (1/N_k) sum q q^T.
struct Stage1Fit {
  InstrumentBasis qbasis{1};
  Stage1Target target = Stage1Target::kAntiderivative;
  double z0 = 0.0;
  Eigen::VectorXd omega;    // P
  Eigen::MatrixXd nu;       // P x J
  Eigen::MatrixXd m1;
  Eigen::MatrixXd m2;
  Eigen::MatrixXd m1_pinv;
  Eigen::MatrixXd m2_pinv;
  Stage1Diagnostics diagnostics;

  double PredictOutcome(double z) const;
  Eigen::VectorXd PredictTargets(double z) const;
};

// Throws kTooFewSamples when either sample has fewer than P records.
Stage1Fit FitStage1(const TwoSampleDataset& data, const BasisSpec& spec,
                    const InstrumentBasis& qbasis, double z0,
                    Stage1Target target = Stage1Target::kAntiderivative);

// Anchored differences over a list of instrument values:
//   c_i = (q(z_i) - q(z0))^T omega,   D_i = (q(z_i) - q(z0))^T nu.
struct Stage1Moments {
  Eigen::VectorXd c;
  Eigen::MatrixXd d;
};

Stage1Moments PredictDifferences(const Stage1Fit& fit, const Eigen::VectorXd& z);

// Same over both samples' instruments (length N1 + N2).
Stage1Moments PredictDifferences(const Stage1Fit& fit,
                                 const TwoSampleDataset& data);

// Undifferenced predictions q(z_i)^T omega and q(z_i)^T nu.
Stage1Moments PredictLevels(const Stage1Fit& fit, const Eigen::VectorXd& z);

// Empirical minimum of the instruments of both samples.
double DefaultAnchor(const TwoSampleDataset& data);

}  // namespace capce

#endif  // CAPCE_STAGE1_H_
