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

#ifndef CAPCE_BENCHMARK_H_
#define CAPCE_BENCHMARK_H_

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "capce/pipeline.h"
#include "capce/scm_bench.h"

namespace capce {

struct BenchmarkPlan {
  std::vector<ScmSetting> settings;
  std::vector<Eigen::Index> sample_sizes;
  int replications = 100;
  std::vector<EstimatorConfig> estimators;
  EvalGrid grid = DefaultEvalGrid();
  std::uint64_t base_seed = 1;
  // Anchor for estimators without their own z0.
  double z0 = -1.0;
  // Covariate values at which CAPCE curves over grid.x_points are recorded.
  std::vector<double> curve_w = {0.0, 1.0};
  // Worker threads; 0 uses the hardware concurrency.
  int threads = 0;

  void Validate() const;
};

struct ReplicationRecord {
  std::string setting;
  Eigen::Index n = 0;
  int replication = 0;
  std::uint64_t seed = 0;
  std::string estimator;
  bool ok = false;
  std::string error;
  double mse = 0.0;
  double zeta = 0.0;
  std::vector<std::string> coefficient_labels;
  Eigen::VectorXd coefficients;
  Eigen::MatrixXd curves;  // curve_w.size() x grid.x_points.size()
};

struct CellSummary {
  std::string setting;
  Eigen::Index n = 0;
  std::string estimator;
  int succeeded = 0;
  int failed = 0;
  double mean_mse = 0.0;
  double sd_mse = 0.0;
  double median_mse = 0.0;
  std::vector<std::string> coefficient_labels;
  Eigen::VectorXd coefficient_mean;
  Eigen::VectorXd coefficient_sd;
  // Replication mean and 5% / 95% quantiles of the recorded curves.
  Eigen::MatrixXd curve_mean;
  Eigen::MatrixXd curve_lo;
  Eigen::MatrixXd curve_hi;
};

struct BenchmarkResults {
  std::vector<double> curve_w;
  std::vector<double> curve_x;
  std::vector<ReplicationRecord> records;
  // One cell per (setting, n, estimator) in plan order.
  std::vector<CellSummary> cells;
};

// For every (setting, n, replication r): simulates n training rows with seed
// base_seed + r and an independent held-out draw of the same size, fits every
// estimator with held-out selection and records its grid MSE. Fit failures
// are recorded per cell and never abort the run. Output is independent of
// the thread count.
BenchmarkResults RunBenchmark(const BenchmarkPlan& plan);

}  // namespace capce

#endif  // CAPCE_BENCHMARK_H_
