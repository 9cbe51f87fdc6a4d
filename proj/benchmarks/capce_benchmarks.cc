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

#include <map>
#include <utility>

#include <benchmark/benchmark.h>

#include "capce/baselines.h"
#include "capce/basis.h"
#include "capce/estimators.h"
#include "capce/pipeline.h"
#include "capce/scm_bench.h"
#include "capce/stage1.h"

namespace capce {
namespace {

const TwoSampleDataset& Data(Eigen::Index n, std::uint64_t seed = 1) {
  static std::map<std::pair<Eigen::Index, std::uint64_t>, TwoSampleDataset> cache;
  auto it = cache.find({n, seed});
  if (it == cache.end()) {
    it = cache.emplace(std::make_pair(n, seed), Simulate(ScmSetting::FromName("B"), n, seed)).first;
  }
  return it->second;
}

void BM_Simulate(benchmark::State& state) {
  const auto n = state.range(0);
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(Simulate(ScmSetting::FromName("A"), n, ++seed));
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_Simulate)->Arg(1000)->Arg(10000);

void BM_BasisMatrix(benchmark::State& state) {
  const auto& d = Data(state.range(0));
  const auto spec = BasisSpec::HermiteProduct(2, 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(AntiderivativeMatrix(spec, d.sample1().x, d.sample1().w));
  }
}
BENCHMARK(BM_BasisMatrix)->Arg(10000);

void BM_Stage1(benchmark::State& state) {
  const auto& d = Data(state.range(0));
  const auto spec = BasisSpec::HermiteProduct(2, 2);
  for (auto _ : state) benchmark::DoNotOptimize(FitStage1(d, spec, InstrumentBasis(4), -1.0));
}
BENCHMARK(BM_Stage1)->Arg(1000)->Arg(10000);

void BM_MonteCarloLambda(benchmark::State& state) {
  LambdaConfig cfg;
  cfg.n_mc = state.range(0);
  const auto spec = BasisSpec::HermiteProduct(2, 2);
  const Eigen::VectorXd anchor = Eigen::VectorXd::Zero(spec.size());
  for (auto _ : state) benchmark::DoNotOptimize(MonteCarloLambda(spec, anchor, cfg));
}
BENCHMARK(BM_MonteCarloLambda)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

void BM_FitSelected(benchmark::State& state, Method method) {
  const auto& train = Data(state.range(0), 1);
  const auto& test = Data(state.range(0), 2);
  const auto cfg = DefaultEstimator(method);
  for (auto _ : state) benchmark::DoNotOptimize(FitSelected(cfg, train, test));
}
BENCHMARK_CAPTURE(BM_FitSelected, p_capce, Method::kParametric)
    ->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_FitSelected, s_capce, Method::kSieve)
    ->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_FitSelected, rkhs_capce, Method::kRkhs)
    ->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_FitSelected, kernel_iv, Method::kKernelIv)
    ->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_FitRkhs(benchmark::State& state, RkhsSolver solver) {
  const auto& d = Data(state.range(0));
  KernelConfig k;
  k.c2 = 3;
  k.c4 = 3;
  for (auto _ : state) benchmark::DoNotOptimize(FitRkhs(d, k, -1.0, solver));
}
BENCHMARK_CAPTURE(BM_FitRkhs, factored, RkhsSolver::kFactored)
    ->Arg(250)->Arg(1000)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_FitRkhs, dense, RkhsSolver::kDense)
    ->Arg(250)->Arg(1000)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace capce

BENCHMARK_MAIN();
