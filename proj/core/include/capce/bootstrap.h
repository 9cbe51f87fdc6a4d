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

#ifndef CAPCE_BOOTSTRAP_H_
#define CAPCE_BOOTSTRAP_H_

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "capce/pipeline.h"

namespace capce {

struct BootstrapOptions {
  int resamples = 1000;
  std::uint64_t seed = 1;
  int threads = 0;
  // Predicted-CAPCE table axes (d = 1). Empty axes span the observed range
  // of the data with 11 points.
  std::vector<double> table_x;
  std::vector<double> table_w;
};

struct CoefficientStats {
  std::string label;
  double min = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double max = 0.0;
  double mean = 0.0;
  double sd = 0.0;
};

struct BootstrapReport {
  std::string estimator;
  int requested = 0;
  int succeeded = 0;
  int failed = 0;
  // Up to the first five failure messages.
  std::vector<std::string> failure_samples;
  bool joint_resampling = false;
  Hyper hyper;
  std::vector<CoefficientStats> coefficients;
  std::vector<double> table_x;
  std::vector<double> table_w;
  // Resample mean and standard deviation of CAPCE at (table_x[i], table_w[j]).
  Eigen::MatrixXd predicted_mean;
  Eigen::MatrixXd predicted_sd;
};

// Nonparametric bootstrap with fixed hyperparameters. Rows are resampled
// with replacement: jointly when the two samples share rows, independently
// per sample otherwise. Failed refits are counted and excluded.
BootstrapReport Bootstrap(const TwoSampleDataset& data, const EstimatorConfig& config,
                          const Hyper& hyper, const BootstrapOptions& options);

CoefficientStats Summarize(const std::string& label, const std::vector<double>& values);

}  // namespace capce

#endif  // CAPCE_BOOTSTRAP_H_
