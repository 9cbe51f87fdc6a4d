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

#ifndef CAPCE_REPORT_H_
#define CAPCE_REPORT_H_

#include <optional>
#include <string>
#include <vector>

#include "capce/benchmark.h"
#include "capce/bootstrap.h"

namespace capce {

// Fixed-point text; "nan" / "inf" / "-inf" for non-finite values.
std::string FormatFixed(double value, int decimals = 3);

// One row per (setting, n, estimator) cell. Columns: setting, n, estimator,
// succeeded, failed, mean_mse, sd_mse, median_mse, then one
// coef_<label>_mean / coef_<label>_sd pair per coefficient label seen in the
// results (first-appearance order; blank where a cell lacks the label).
std::string BenchmarkCsv(const BenchmarkResults& results, int decimals = 3);
// The same rows as a markdown table, followed by a mean-MSE pivot with one
// row per (setting, n) and one column per estimator.
std::string BenchmarkMarkdown(const BenchmarkResults& results, int decimals = 3);
// Per-replication rows: setting, n, replication, seed, estimator, ok, mse,
// zeta, error.
std::string ReplicationsCsv(const BenchmarkResults& results, int decimals = 6);

struct CurveSeries {
  std::string name;
  std::vector<double> y;
  std::vector<double> lo;  // optional band; empty when absent
  std::vector<double> hi;
};

// A line chart of CAPCE against x at fixed covariate value. The oracle, when
// given, is drawn as a dashed black line.
std::string CurveSvg(const std::string& title, const std::vector<double>& x,
                     const std::vector<CurveSeries>& series,
                     const std::optional<std::vector<double>>& oracle);

std::string BootstrapCoefficientsCsv(const BootstrapReport& report, int decimals = 5);
std::string BootstrapTableCsv(const BootstrapReport& report, int decimals = 3);
std::string BootstrapMarkdown(const BootstrapReport& report, int coef_decimals = 5,
                              int table_decimals = 3);

// Writes results.csv, results.md, replications.csv, curves_<setting>_<n>_w<k>.svg
// and report.json into out_dir (created if missing). Throws kIoError.
void EmitBenchmarkReport(const BenchmarkResults& results, const std::string& out_dir);

// Writes bootstrap_coefficients.csv, bootstrap_table.csv, results.md and
// report.json into out_dir.
void EmitBootstrapReport(const BootstrapReport& report, const std::string& out_dir);

void WriteTextFile(const std::string& path, const std::string& text);

}  // namespace capce

#endif  // CAPCE_REPORT_H_
