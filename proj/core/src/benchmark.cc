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

#include "capce/benchmark.h"

#include <exception>

#include "capce/error.h"
#include "capce/stats.h"
#include "parallel.h"

namespace capce {

void BenchmarkPlan::Validate() const {
  if (replications < 1) Fail(ErrorCode::kInvalidArgument, "replications must be >= 1");
  if (settings.empty()) Fail(ErrorCode::kInvalidArgument, "plan has no settings");
  if (sample_sizes.empty()) Fail(ErrorCode::kInvalidArgument, "plan has no sample sizes");
  for (auto n : sample_sizes) {
    if (n < 2) Fail(ErrorCode::kInvalidArgument, "sample sizes must be >= 2");
  }
  if (grid.size() == 0) Fail(ErrorCode::kInvalidArgument, "evaluation grid is empty");
  for (const auto& s : settings) (void)ScmSetting::FromName(s.Name());
  for (const auto& e : estimators) e.Validate(1);
}

namespace {

struct Task {
  size_t setting;
  size_t size;
  int replication;
};

std::vector<ReplicationRecord> RunTask(const BenchmarkPlan& plan, const Task& task,
                                       const GridPoints& curve_points) {
  const ScmSetting& setting = plan.settings[task.setting];
  const Eigen::Index n = plan.sample_sizes[task.size];
  const std::uint64_t seed = plan.base_seed + static_cast<std::uint64_t>(task.replication);
  std::vector<ReplicationRecord> out;
  const TwoSampleDataset train = Simulate(setting, n, seed);
  const TwoSampleDataset held_out = Simulate(setting, n, DeriveSeed(seed, 1));
  for (const auto& base : plan.estimators) {
    ReplicationRecord r;
    r.setting = setting.Name();
    r.n = n;
    r.replication = task.replication;
    r.seed = seed;
    r.estimator = base.label;
    try {
      EstimatorConfig cfg = base;
      if (!cfg.z0) cfg.z0 = plan.z0;
      cfg.lambda.seed = DeriveSeed(seed, 2);
      const FittedEstimator fit = FitSelected(cfg, train, held_out);
      r.mse = EvaluateMse(fit.Surface(), setting, plan.grid);
      r.zeta = fit.hyper().zeta;
      r.coefficient_labels = fit.CoefficientLabels();
      r.coefficients = fit.Coefficients();
      const Eigen::VectorXd values = fit.Surface()(curve_points.x, curve_points.w);
      const auto nx = static_cast<Eigen::Index>(plan.grid.x_points.size());
      r.curves.resize(static_cast<Eigen::Index>(plan.curve_w.size()), nx);
      for (Eigen::Index k = 0; k < r.curves.rows(); ++k) {
        r.curves.row(k) = values.segment(k * nx, nx).transpose();
      }
      r.ok = true;
    } catch (const std::exception& e) {
      r.ok = false;
      r.error = e.what();
    }
    out.push_back(std::move(r));
  }
  return out;
}

CellSummary Summarize(const BenchmarkPlan& plan, const std::string& setting,
                      Eigen::Index n, const std::string& estimator,
                      const std::vector<const ReplicationRecord*>& recs) {
  CellSummary c;
  c.setting = setting;
  c.n = n;
  c.estimator = estimator;
  std::vector<double> mse;
  std::vector<const ReplicationRecord*> ok;
  for (const auto* r : recs) {
    if (r->ok) {
      ok.push_back(r);
      mse.push_back(r->mse);
    } else {
      ++c.failed;
    }
  }
  c.succeeded = static_cast<int>(ok.size());
  if (ok.empty()) return c;
  c.mean_mse = Mean(mse);
  c.sd_mse = SampleSd(mse);
  c.median_mse = Quantile(mse, 0.5);
  c.coefficient_labels = ok.front()->coefficient_labels;
  const Eigen::Index k = ok.front()->coefficients.size();
  c.coefficient_mean = Eigen::VectorXd::Zero(k);
  c.coefficient_sd = Eigen::VectorXd::Zero(k);
  for (Eigen::Index j = 0; j < k; ++j) {
    std::vector<double> v;
    for (const auto* r : ok) v.push_back(r->coefficients(j));
    c.coefficient_mean(j) = Mean(v);
    c.coefficient_sd(j) = SampleSd(v);
  }
  const auto rows = static_cast<Eigen::Index>(plan.curve_w.size());
  const auto cols = static_cast<Eigen::Index>(plan.grid.x_points.size());
  c.curve_mean.resize(rows, cols);
  c.curve_lo.resize(rows, cols);
  c.curve_hi.resize(rows, cols);
  for (Eigen::Index a = 0; a < rows; ++a) {
    for (Eigen::Index b = 0; b < cols; ++b) {
      std::vector<double> v;
      for (const auto* r : ok) v.push_back(r->curves(a, b));
      c.curve_mean(a, b) = Mean(v);
      c.curve_lo(a, b) = Quantile(v, 0.05);
      c.curve_hi(a, b) = Quantile(std::move(v), 0.95);
    }
  }
  return c;
}

}  // namespace

BenchmarkResults RunBenchmark(const BenchmarkPlan& plan) {
  plan.Validate();
  BenchmarkResults results;
  results.curve_w = plan.curve_w;
  results.curve_x = plan.grid.x_points;
  if (plan.estimators.empty()) return results;

  std::vector<Task> tasks;
  for (size_t s = 0; s < plan.settings.size(); ++s) {
    for (size_t k = 0; k < plan.sample_sizes.size(); ++k) {
      for (int r = 0; r < plan.replications; ++r) tasks.push_back({s, k, r});
    }
  }
  GridPoints curve_points;
  {
    const auto nx = static_cast<Eigen::Index>(plan.grid.x_points.size());
    const auto nw = static_cast<Eigen::Index>(plan.curve_w.size());
    curve_points.x.resize(nx * nw);
    curve_points.w.resize(nx * nw, 1);
    for (Eigen::Index a = 0; a < nw; ++a) {
      for (Eigen::Index b = 0; b < nx; ++b) {
        curve_points.x(a * nx + b) = plan.grid.x_points[static_cast<size_t>(b)];
        curve_points.w(a * nx + b, 0) = plan.curve_w[static_cast<size_t>(a)];
      }
    }
  }
  std::vector<std::vector<ReplicationRecord>> slots(tasks.size());
  internal::ParallelFor(tasks.size(), plan.threads, [&](size_t i) {
    try {
      slots[i] = RunTask(plan, tasks[i], curve_points);
    } catch (const std::exception& e) {
      // Simulation itself failed; mark every estimator of this task.
      for (const auto& est : plan.estimators) {
        ReplicationRecord r;
        r.setting = plan.settings[tasks[i].setting].Name();
        r.n = plan.sample_sizes[tasks[i].size];
        r.replication = tasks[i].replication;
        r.estimator = est.label;
        r.error = e.what();
        slots[i].push_back(std::move(r));
      }
    }
  });
  for (auto& s : slots) {
    for (auto& r : s) results.records.push_back(std::move(r));
  }

  for (const auto& setting : plan.settings) {
    for (auto n : plan.sample_sizes) {
      for (const auto& est : plan.estimators) {
        std::vector<const ReplicationRecord*> recs;
        for (const auto& r : results.records) {
          if (r.setting == setting.Name() && r.n == n && r.estimator == est.label) {
            recs.push_back(&r);
          }
        }
        results.cells.push_back(Summarize(plan, setting.Name(), n, est.label, recs));
      }
    }
  }
  return results;
}

}  // namespace capce
