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


#ifndef CAPCE_SERIALIZATION_H_
#define CAPCE_SERIALIZATION_H_

#include <string>

#include "capce/baselines.h"
#include "capce/estimators.h"
#include "capce/pipeline.h"

namespace capce {

// JSON documents tagged with "kind". Numbers are written with round-trip
// precision, so a reloaded model evaluates bit-identically. Loading throws
// kParseError on malformed or mismatched documents.
std::string ToJson(const CapceModel& model);
std::string ToJson(const StructuralModel& model);
std::string ToJson(const FittedEstimator& fitted);

CapceModel CapceModelFromJson(const std::string& text);
StructuralModel StructuralModelFromJson(const std::string& text);
FittedEstimator FittedEstimatorFromJson(const std::string& text);

void SaveEstimator(const FittedEstimator& fitted, const std::string& path);
FittedEstimator LoadEstimator(const std::string& path);

// Stage-1 diagnostics and selection details of a fit, for report.json.
std::string DiagnosticsJson(const FittedEstimator& fitted);

}  // namespace capce

#endif  // CAPCE_SERIALIZATION_H_
