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

#ifndef CAPCE_SRC_SERIES_INTERNAL_H_
#define CAPCE_SRC_SERIES_INTERNAL_H_

#include "capce/basis.h"
#include "capce/data_model.h"
#include "capce/stage1.h"

namespace capce::internal {

struct SeriesProblem {
  Stage1Fit fit;
  Stage1Moments moments;
};

// Fits stage 1 and builds the regression moments over both samples'
// instruments: anchored differences for antiderivative targets, plain levels
// otherwise.
inline SeriesProblem BuildSeriesProblem(const TwoSampleDataset& data,
                                        const BasisSpec& spec,
                                        const InstrumentBasis& qbasis, double z0,
                                        Stage1Target target) {
  SeriesProblem p{FitStage1(data, spec, qbasis, z0, target), {}};
  const Eigen::VectorXd z = data.StackedInstruments();
  p.moments = target == Stage1Target::kAntiderivative
                  ? PredictDifferences(p.fit, z)
                  : PredictLevels(p.fit, z);
  return p;
}

}  // namespace capce::internal

#endif  // CAPCE_SRC_SERIES_INTERNAL_H_
