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

#include "capce/pipeline.h"

#include <cmath>

#include "capce/error.h"

namespace capce {

std::string MethodName(Method method) {
  switch (method) {
    case Method::kParametric: return "p_capce";
    case Method::kSieve: return "s_capce";
    case Method::kRkhs: return "rkhs_capce";
    case Method::kPtsls: return "ptsls";
    case Method::kNtsls: return "ntsls";
    case Method::kKernelIv: return "kernel_iv";
  }
  return "unknown";
}

Method MethodFromName(const std::string& name) {
  for (Method m : {Method::kParametric, Method::kSieve, Method::kRkhs, Method::kPtsls,
                   Method::kNtsls, Method::kKernelIv}) {
    if (MethodName(m) == name) return m;
  }
  Fail(ErrorCode::kInvalidArgument, "unknown method '" + name + "'");
}

bool IsCapceMethod(Method method) {
  return method == Method::kParametric || method == Method::kSieve ||
         method == Method::kRkhs;
}

void EstimatorConfig::Validate(int d) const {
  const bool series = method != Method::kRkhs && method != Method::kKernelIv;
  if (series) {
    if (!basis) Fail(ErrorCode::kInvalidArgument, label + ": series method needs a basis");
    if (basis->d() != d) {
      Fail(ErrorCode::kDimensionMismatch,
           label + ": basis covariate dimension differs from the data");
    }
    if (p_degree < 1) Fail(ErrorCode::kInvalidArgument, label + ": p_degree must be >= 1");
    if (zeta_grid.empty()) Fail(ErrorCode::kInvalidArgument, label + ": empty zeta grid");
  }
  if (kernel) kernel->Validate();
  if (z0 && !std::isfinite(*z0)) Fail(ErrorCode::kInvalidArgument, label + ": z0 not finite");
}

EstimatorConfig DefaultEstimator(Method method) {
  EstimatorConfig c;
  c.method = method;
  c.label = MethodName(method);
  switch (method) {
    case Method::kParametric:
      c.basis = BasisSpec::ExplicitTerms({"1", "W", "X"});
      c.p_degree = 3;
      break;
    case Method::kPtsls:
      c.basis = BasisSpec::ExplicitTerms({"1", "W", "X", "XW", "X2"});
      c.p_degree = 3;
      break;
    case Method::kSieve:
    case Method::kNtsls:
      c.basis = BasisSpec::HermiteProduct(2, 2);
      c.p_degree = 4;
      break;
    case Method::kRkhs:
    case Method::kKernelIv:
      break;
  }
  return c;
}

std::vector<EstimatorConfig> DefaultEstimators() {
  std::vector<EstimatorConfig> out;
  for (Method m : {Method::kParametric, Method::kPtsls, Method::kSieve, Method::kNtsls,
                   Method::kRkhs, Method::kKernelIv}) {
    out.push_back(DefaultEstimator(m));
  }
  return out;
}

double ResolveAnchor(const EstimatorConfig& config, const TwoSampleDataset& data) {
  return config.z0 ? *config.z0 : DefaultAnchor(data);
}

Hyper FittedEstimator::hyper() const {
  Hyper h;
  if (capce) {
    h.zeta = capce->info().zeta;
    if (capce->kind() == CapceKind::kRkhs) h.kernel = capce->kernel();
  } else if (structural) {
    h.zeta = structural->info().zeta;
    if (structural->kind() == StructuralKind::kKernelIv) h.kernel = structural->kernel();
  }
  return h;
}

CapceSurface FittedEstimator::Surface() const {
  if (capce) return SurfaceOf(*capce);
  if (structural) return SurfaceOf(*structural);
  Fail(ErrorCode::kInvalidArgument, "estimator holds no model");
}

double FittedEstimator::Evaluate(double x, const Eigen::VectorXd& w) const {
  if (capce) return capce->Evaluate(x, w);
  if (structural) return structural->EvaluateDx(x, w);
  Fail(ErrorCode::kInvalidArgument, "estimator holds no model");
}

std::vector<std::string> FittedEstimator::CoefficientLabels() const {
  if (capce && capce->kind() != CapceKind::kRkhs) return capce->basis().Labels();
  if (structural && structural->kind() != StructuralKind::kKernelIv) {
    if (structural->basis().hermite()) return structural->basis().Labels();
    std::vector<std::string> out;
    for (const auto& [name, v] : structural->DerivativeTerms()) out.push_back(name);
    return out;
  }
  return {};
}

Eigen::VectorXd FittedEstimator::Coefficients() const {
  if (capce && capce->kind() != CapceKind::kRkhs) return capce->coefficients();
  if (structural && structural->kind() != StructuralKind::kKernelIv) {
    if (structural->basis().hermite()) return structural->coefficients();
    const auto terms = structural->DerivativeTerms();
    Eigen::VectorXd out(static_cast<Eigen::Index>(terms.size()));
    for (size_t k = 0; k < terms.size(); ++k) {
      out(static_cast<Eigen::Index>(k)) = terms[k].second;
    }
    return out;
  }
  return {};
}

FittedEstimator FitSelected(const EstimatorConfig& config, const TwoSampleDataset& train,
                            const TwoSampleDataset& held_out) {
  config.Validate(static_cast<int>(train.d()));
  const double z0 = ResolveAnchor(config, train);
  FittedEstimator out;
  out.method = config.method;
  const InstrumentBasis q(config.p_degree);
  switch (config.method) {
    case Method::kParametric:
      out.capce = FitParametric(train, *config.basis, q, z0, config.zeta_grid, held_out);
      break;
    case Method::kSieve:
      out.capce = FitSieve(train, *config.basis, q, z0, config.zeta_grid, held_out,
                           config.lambda);
      break;
    case Method::kPtsls:
      out.structural = FitPtsls(train, *config.basis, q, config.zeta_grid, held_out);
      break;
    case Method::kNtsls:
      out.structural = FitNtsls(train, *config.basis, q, config.zeta_grid, held_out);
      break;
    case Method::kRkhs: {
      KernelConfig k;
      FitInfo info;
      if (config.kernel) {
        k = *config.kernel;
      } else {
        const RkhsSelection sel = RkhsSelect(train, held_out, z0, config.grids);
        k = sel.config;
        info.outcome_loss = sel.outcome_loss;
        info.embedding_loss = sel.embedding_loss;
        info.validation_loss = sel.validation_loss;
      }
      const CapceModel m = FitRkhs(train, k, z0);
      out.capce = CapceModel::Rkhs(k, m.anchors(), m.coefficients(), z0, info);
      break;
    }
    case Method::kKernelIv: {
      const KernelConfig k =
          config.kernel ? *config.kernel : KernelIvSelect(train, held_out, config.grids);
      out.structural = FitKernelIv(train, k);
      break;
    }
  }
  return out;
}

FittedEstimator FitFixed(const EstimatorConfig& config, const TwoSampleDataset& data,
                         const Hyper& hyper) {
  config.Validate(static_cast<int>(data.d()));
  const double z0 = ResolveAnchor(config, data);
  FittedEstimator out;
  out.method = config.method;
  const InstrumentBasis q(config.p_degree);
  auto kernel = [&]() {
    if (hyper.kernel) return *hyper.kernel;
    if (config.kernel) return *config.kernel;
    Fail(ErrorCode::kInvalidArgument, config.label + ": kernel method needs a kernel");
  };
  switch (config.method) {
    case Method::kParametric:
      out.capce = FitParametricAt(data, *config.basis, q, z0, hyper.zeta);
      break;
    case Method::kSieve:
      out.capce = FitSieveAt(data, *config.basis, q, z0, hyper.zeta, config.lambda);
      break;
    case Method::kPtsls:
      out.structural = FitPtslsAt(data, *config.basis, q, hyper.zeta);
      break;
    case Method::kNtsls:
      out.structural = FitNtslsAt(data, *config.basis, q, hyper.zeta);
      break;
    case Method::kRkhs:
      out.capce = FitRkhs(data, kernel(), z0);
      break;
    case Method::kKernelIv:
      out.structural = FitKernelIv(data, kernel());
      break;
  }
  return out;
}

FittedEstimator FitSplitRefit(const EstimatorConfig& config, const TwoSampleDataset& data,
                              double test_fraction, std::uint64_t seed) {
  EstimatorConfig anchored = config;
  anchored.z0 = ResolveAnchor(config, data);
  const auto [train, test] = SplitTrainTest(data, test_fraction, seed);
  const Hyper hyper = FitSelected(anchored, train, test).hyper();
  return FitFixed(anchored, data, hyper);
}

}  // namespace capce
