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


#ifndef CAPCE_CONFIG_H_
#define CAPCE_CONFIG_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "capce/basis.h"
#include "capce/benchmark.h"
#include "capce/bootstrap.h"
#include "capce/data_model.h"
#include "capce/pipeline.h"

namespace capce {

// Where observational data comes from: one joint table (`path`) or a
// pre-split pair (`path1` with treatment/covariates/instrument, `path2` with
// outcome/instrument).
struct DataSource {
  std::string path;
  std::string path1;
  std::string path2;
  ColumnSchema columns;

  bool empty() const { return path.empty() && path1.empty() && path2.empty(); }
  TwoSampleDataset Load() const;
};

// Parsed configuration file. Sections are optional; absent keys keep the
// library defaults.
//
//   seed = 1
//   out_dir = "out"
//   [data]       path | path1 + path2, treatment, outcome, instrument, covariates
//   [benchmark]  settings, sample_sizes, replications, base_seed, z0, curve_w,
//                threads, [benchmark.grid] x_lo x_hi w_lo w_hi nx nw
//   [bootstrap]  resamples, seed, threads, table_x, table_w
//   [[estimator]] label, method, basis = {kind, x_deg, w_deg} | terms = [...],
//                p_degree, zeta_grid, z0, [estimator.lambda], [estimator.grids],
//                [estimator.kernel]
struct RunConfig {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  DataSource data;
  bool has_benchmark = false;
  BenchmarkPlan benchmark;
  BootstrapOptions bootstrap;
  // Empty when the file lists no estimators.
  std::vector<EstimatorConfig> estimators;
};

// Throws kParseError on malformed input or unknown keys, kIoError when the
// file cannot be read.
RunConfig ParseConfig(const std::string& text);
RunConfig LoadConfig(const std::string& path);

// Inline-table form of a basis, e.g.
//   { kind = "hermite_product", x_deg = 2, w_deg = 2 }
//   { terms = ["1", "W", "X"] }
std::string BasisToConfig(const BasisSpec& spec);
// Accepts a bare inline table or a full `basis = {...}` assignment.
BasisSpec BasisFromConfig(const std::string& text, int d = 1);

}  // namespace capce

#endif  // CAPCE_CONFIG_H_
