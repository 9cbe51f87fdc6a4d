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

#include "capce/scm_bench.h"

#include <cctype>
#include <cmath>
#include <random>

#include "capce/error.h"

namespace capce {

ScmSetting ScmSetting::FromName(std::string_view name) {
  if (name.size() != 1) {
    Fail(ErrorCode::kUnknownSetting, "unknown setting '" + std::string(name) + "'");
  }
  const char c = static_cast<char>(std::toupper(static_cast<unsigned char>(name[0])));
  switch (c) {
    case 'A': return {'A', false, true, 50.0};
    case 'B': return {'B', true, true, 25.0};
    case 'C': return {'C', false, false, 50.0};
    case 'D': return {'D', true, false, 50.0};
    case 'E': return {'E', false, true, 10.0};
    case 'F': return {'F', true, true, 5.0};
    default:
      Fail(ErrorCode::kUnknownSetting, "unknown setting '" + std::string(name) + "'");
  }
}

std::vector<ScmSetting> ScmSetting::All() {
  std::vector<ScmSetting> out;
  for (const char* n : {"A", "B", "C", "D", "E", "F"}) out.push_back(FromName(n));
  return out;
}

double ConfounderShape(double w) {
  const double w2 = w * w;
  return w2 * (1.0 + w + w2 + w2 * w);
}

StructuralDraw EvaluateScm(const ScmSetting& setting, const ExogenousDraw& e) {
  StructuralDraw s;
  s.w = e.u + e.e1;
  s.x = e.z + s.w + e.u + e.e2;
  const double h = setting.interaction ? ConfounderShape(s.w) * e.u : e.u;
  const double base =
      setting.exponential_outcome
          ? std::exp(s.x) * std::exp(s.w)
          : 10.0 * s.x * s.x + s.w * s.x + s.x + s.w;
  s.y = base + setting.confounder_gain * h + e.e3;
  return s;
}

TwoSampleDataset Simulate(const ScmSetting& setting, Eigen::Index n,
                          std::uint64_t seed, const NoiseHook& hook) {
  if (n < 1) Fail(ErrorCode::kInvalidArgument, "n must be positive");
  // Validates the name so hand-built settings fail the same way.
  (void)ScmSetting::FromName(setting.Name());
  std::seed_seq seq{seed, std::uint64_t{0x5c3}};
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  Eigen::VectorXd x(n), z(n), y(n);
  Eigen::MatrixXd w(n, 1);
  for (Eigen::Index i = 0; i < n; ++i) {
    ExogenousDraw e;
    e.z = unif(rng);
    e.u = unif(rng);
    e.e1 = unif(rng);
    e.e2 = unif(rng);
    e.e3 = unif(rng);
    if (hook) hook(i, e);
    const StructuralDraw s = EvaluateScm(setting, e);
    x(i) = s.x;
    w(i, 0) = s.w;
    z(i) = e.z;
    y(i) = s.y;
  }
  return TwoSampleDataset::Joint(std::move(x), std::move(w), std::move(z),
                                 std::move(y));
}

std::uint64_t DeriveSeed(std::uint64_t base, std::uint64_t stream) {
  std::seed_seq seq{base, stream, std::uint64_t{0xd3e}};
  std::mt19937_64 rng(seq);
  return rng();
}

double TrueCapce(const ScmSetting& setting, double x, double w) {
  (void)ScmSetting::FromName(setting.Name());
  if (setting.exponential_outcome) return std::exp(x) * std::exp(w);
  return 20.0 * x + w + 1.0;
}

EvalGrid MakeGrid(const EvalBox& box, int nx, int nw) {
  if (!(box.x_lo < box.x_hi) || !(box.w_lo < box.w_hi) || nx < 2 || nw < 2) {
    Fail(ErrorCode::kBadBox, "grid box must be non-empty with at least 2 points per axis");
  }
  auto linspace = [](double lo, double hi, int n) {
    std::vector<double> out(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
      out[static_cast<size_t>(i)] = lo + (hi - lo) * i / (n - 1);
    }
    out.back() = hi;
    return out;
  };
  return {linspace(box.x_lo, box.x_hi, nx), linspace(box.w_lo, box.w_hi, nw)};
}

EvalGrid DefaultEvalGrid() { return MakeGrid(EvalBox{}, 41, 21); }

}  // namespace capce
