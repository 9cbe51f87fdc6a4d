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

#ifndef CAPCE_EVALUATION_H_
#define CAPCE_EVALUATION_H_

#include <functional>

#include <Eigen/Dense>

#include "capce/baselines.h"
#include "capce/estimators.h"
#include "capce/scm_bench.h"

namespace capce {

// Vectorized CAPCE surface: values at rows (x_i, w_i).
using CapceSurface =
    std::function<Eigen::VectorXd(const Eigen::VectorXd& x, const Eigen::MatrixXd& w)>;

// The returned surface refers to `model`, which must outlive it.
CapceSurface SurfaceOf(const CapceModel& model);
CapceSurface SurfaceOf(const StructuralModel& model);

// Grid points in x-major order (x outer, w inner) with d = 1.
struct GridPoints {
  Eigen::VectorXd x;
  Eigen::MatrixXd w;
};
GridPoints FlattenGrid(const EvalGrid& grid);

// Mean over grid points of (estimate - true CAPCE)^2. Throws
// kNonFiniteEstimate naming the first offending point.
double EvaluateMse(const CapceSurface& surface, const ScmSetting& setting,
                   const EvalGrid& grid);
double EvaluateMse(const CapceModel& model, const ScmSetting& setting,
                   const EvalGrid& grid);
double EvaluateMse(const StructuralModel& model, const ScmSetting& setting,
                   const EvalGrid& grid);

}  // namespace capce

#endif  // CAPCE_EVALUATION_H_
