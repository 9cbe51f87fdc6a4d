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

#include "capce/evaluation.h"

#include <cmath>
#include <sstream>

#include "capce/error.h"

namespace capce {

CapceSurface SurfaceOf(const CapceModel& model) {
  return [&model](const Eigen::VectorXd& x, const Eigen::MatrixXd& w) {
    return model.EvaluateMany(x, w);
  };
}

CapceSurface SurfaceOf(const StructuralModel& model) {
  return [&model](const Eigen::VectorXd& x, const Eigen::MatrixXd& w) {
    return model.EvaluateDxMany(x, w);
  };
}

GridPoints FlattenGrid(const EvalGrid& grid) {
  const auto n = static_cast<Eigen::Index>(grid.size());
  GridPoints p{Eigen::VectorXd(n), Eigen::MatrixXd(n, 1)};
  Eigen::Index i = 0;
  for (double x : grid.x_points) {
    for (double w : grid.w_points) {
      p.x(i) = x;
      p.w(i, 0) = w;
      ++i;
    }
  }
  return p;
}

double EvaluateMse(const CapceSurface& surface, const ScmSetting& setting,
                   const EvalGrid& grid) {
  if (grid.size() == 0) Fail(ErrorCode::kInvalidArgument, "evaluation grid is empty");
  const GridPoints p = FlattenGrid(grid);
  const Eigen::VectorXd est = surface(p.x, p.w);
  double sum = 0.0;
  for (Eigen::Index i = 0; i < p.x.size(); ++i) {
    if (!std::isfinite(est(i))) {
      std::ostringstream msg;
      msg << "estimate at (x=" << p.x(i) << ", w=" << p.w(i, 0) << ") is not finite";
      Fail(ErrorCode::kNonFiniteEstimate, msg.str());
    }
    const double e = est(i) - TrueCapce(setting, p.x(i), p.w(i, 0));
    sum += e * e;
  }
  return sum / static_cast<double>(p.x.size());
}

double EvaluateMse(const CapceModel& model, const ScmSetting& setting,
                   const EvalGrid& grid) {
  return EvaluateMse(SurfaceOf(model), setting, grid);
}

double EvaluateMse(const StructuralModel& model, const ScmSetting& setting,
                   const EvalGrid& grid) {
  return EvaluateMse(SurfaceOf(model), setting, grid);
}

}  // namespace capce
