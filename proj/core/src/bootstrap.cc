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

#include "capce/bootstrap.h"

#include <cmath>
#include <exception>
#include <optional>
#include <random>

#include "capce/error.h"
#include "capce/stats.h"
#include "parallel.h"

namespace capce {
namespace {

std::vector<double> Span(const Eigen::VectorXd& v) {
  std::vector<double> out(11);
  const double lo = v.minCoeff();
  const double hi = v.maxCoeff();
  for (int i = 0; i < 11; ++i) out[static_cast<size_t>(i)] = lo + (hi - lo) * i / 10.0;
  return out;
}

std::vector<Eigen::Index> Draw(Eigen::Index n, std::mt19937_64& rng) {
  std::uniform_int_distribution<Eigen::Index> pick(0, n - 1);
  std::vector<Eigen::Index> rows(static_cast<size_t>(n));
  for (auto& r : rows) r = pick(rng);
  return rows;
}

struct Outcome {
  bool ok = false;
  std::string error;
  Eigen::VectorXd coefficients;
  std::vector<std::string> labels;
  Eigen::MatrixXd table;
};

}  // namespace

CoefficientStats Summarize(const std::string& label, const std::vector<double>& values) {
  CoefficientStats s;
  s.label = label;
  if (values.empty()) return s;
  s.min = Quantile(values, 0.0);
  s.q1 = Quantile(values, 0.25);
  s.median = Quantile(values, 0.5);
  s.q3 = Quantile(values, 0.75);
  s.max = Quantile(values, 1.0);
  s.mean = Mean(values);
  s.sd = SampleSd(values);
  return s;
}

BootstrapReport Bootstrap(const TwoSampleDataset& data, const EstimatorConfig& config,
                          const Hyper& hyper, const BootstrapOptions& options) {
  if (options.resamples < 1) Fail(ErrorCode::kInvalidArgument, "resamples must be >= 1");
  if (data.d() != 1 && (options.table_x.empty() || options.table_w.empty())) {
    Fail(ErrorCode::kInvalidArgument, "predicted-value tables need d = 1");
  }
  config.Validate(static_cast<int>(data.d()));
  // Resamples share the anchor of the full data.
  EstimatorConfig cfg = config;
  cfg.z0 = ResolveAnchor(config, data);

  BootstrapReport report;
  report.estimator = config.label;
  report.requested = options.resamples;
  report.joint_resampling = data.shared_rows();
  report.hyper = hyper;
  report.table_x = options.table_x.empty() ? Span(data.sample1().x) : options.table_x;
  report.table_w = options.table_w.empty() ? Span(data.sample1().w.col(0)) : options.table_w;

  const auto nx = static_cast<Eigen::Index>(report.table_x.size());
  const auto nw = static_cast<Eigen::Index>(report.table_w.size());
  Eigen::VectorXd px(nx * nw);
  Eigen::MatrixXd pw(nx * nw, 1);
  for (Eigen::Index i = 0; i < nx; ++i) {
    for (Eigen::Index j = 0; j < nw; ++j) {
      px(i * nw + j) = report.table_x[static_cast<size_t>(i)];
      pw(i * nw + j, 0) = report.table_w[static_cast<size_t>(j)];
    }
  }

  std::vector<Outcome> outcomes(static_cast<size_t>(options.resamples));
  internal::ParallelFor(outcomes.size(), options.threads, [&](size_t b) {
    Outcome& o = outcomes[b];
    try {
      std::seed_seq seq{options.seed, static_cast<std::uint64_t>(b), std::uint64_t{0xb00}};
      std::mt19937_64 rng(seq);
      std::vector<Eigen::Index> rows1 = Draw(data.n1(), rng);
      std::vector<Eigen::Index> rows2 =
          data.shared_rows() ? rows1 : Draw(data.n2(), rng);
      const TwoSampleDataset resample = data.Subset(rows1, rows2, data.shared_rows());
      const FittedEstimator fit = FitFixed(cfg, resample, hyper);
      o.coefficients = fit.Coefficients();
      o.labels = fit.CoefficientLabels();
      const Eigen::VectorXd values = fit.Surface()(px, pw);
      if (!values.allFinite() || !o.coefficients.allFinite()) {
        Fail(ErrorCode::kNonFiniteEstimate, "resample fit is not finite");
      }
      o.table = Eigen::Map<const Eigen::MatrixXd>(values.data(), nw, nx).transpose();
      o.ok = true;
    } catch (const std::exception& e) {
      o.error = e.what();
    }
  });

  std::vector<const Outcome*> ok;
  for (const auto& o : outcomes) {
    if (o.ok) {
      ok.push_back(&o);
    } else {
      ++report.failed;
      if (report.failure_samples.size() < 5) report.failure_samples.push_back(o.error);
    }
  }
  report.succeeded = static_cast<int>(ok.size());
  report.predicted_mean = Eigen::MatrixXd::Constant(nx, nw, std::nan(""));
  report.predicted_sd = Eigen::MatrixXd::Constant(nx, nw, std::nan(""));
  if (ok.empty()) return report;

  const auto& labels = ok.front()->labels;
  for (size_t k = 0; k < labels.size(); ++k) {
    std::vector<double> v;
    for (const auto* o : ok) v.push_back(o->coefficients(static_cast<Eigen::Index>(k)));
    report.coefficients.push_back(Summarize(labels[k], v));
  }
  for (Eigen::Index i = 0; i < nx; ++i) {
    for (Eigen::Index j = 0; j < nw; ++j) {
      std::vector<double> v;
      for (const auto* o : ok) v.push_back(o->table(i, j));
      report.predicted_mean(i, j) = Mean(v);
      report.predicted_sd(i, j) = SampleSd(v);
    }
  }
  return report;
}

}  // namespace capce
