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

#include "capce/serialization.h"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

#include "capce/error.h"
#include "capce/report.h"

namespace capce {
namespace {

using nlohmann::json;

constexpr int kFormatVersion = 1;

json Vec(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

Eigen::VectorXd ToVec(const json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

json Mat(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) rows.push_back(Vec(m.row(i).transpose()));
  return rows;
}

Eigen::MatrixXd ToMat(const json& j, Eigen::Index cols) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(j.size()), cols);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    const auto row = ToVec(j.at(static_cast<size_t>(i)));
    if (row.size() != cols) Fail(ErrorCode::kParseError, "ragged matrix in model document");
    m.row(i) = row.transpose();
  }
  return m;
}

json BasisJson(const BasisSpec& b) {
  json j = {{"kind", BasisKindName(b.kind())}, {"d", b.d()}};
  if (b.kind() == BasisKind::kExplicitTerms) {
    j["terms"] = b.TermStrings();
  } else {
    j["x_deg"] = b.x_degree();
    j["w_deg"] = b.w_degree();
  }
  return j;
}

BasisSpec BasisOf(const json& j) {
  const auto kind = j.at("kind").get<std::string>();
  const int d = j.at("d").get<int>();
  if (kind == "explicit_terms") {
    return BasisSpec::ExplicitTerms(j.at("terms").get<std::vector<std::string>>(), d);
  }
  const int x = j.at("x_deg").get<int>();
  const int w = j.at("w_deg").get<int>();
  if (kind == "hermite_product") return BasisSpec::HermiteProduct(x, w, d);
  if (kind == "monomial_product") return BasisSpec::MonomialProduct(x, w, d);
  Fail(ErrorCode::kParseError, "unknown basis kind '" + kind + "'");
}

json KernelJson(const KernelConfig& k) {
  return {{"c1", k.c1},           {"c2", k.c2},           {"c3", k.c3},
          {"c4", k.c4},           {"lambda1", k.lambda1}, {"lambda2", k.lambda2},
          {"lambda3", k.lambda3}, {"xi", k.xi}};
}

KernelConfig KernelOf(const json& j) {
  KernelConfig k;
  k.c1 = j.at("c1").get<double>();
  k.c2 = j.at("c2").get<int>();
  k.c3 = j.at("c3").get<double>();
  k.c4 = j.at("c4").get<int>();
  k.lambda1 = j.at("lambda1").get<double>();
  k.lambda2 = j.at("lambda2").get<double>();
  k.lambda3 = j.at("lambda3").get<double>();
  k.xi = j.at("xi").get<double>();
  k.Validate();
  return k;
}

// Non-finite values are stored as null; JSON has no representation for them.
json Num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }
double NumOf(const json& j) {
  return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

json InfoJson(const FitInfo& info) {
  const auto& s = info.stage1;
  json stage1 = {{"outcome_r2", Num(s.outcome_r2)},
                 {"target_r2", Vec(s.target_r2)},
                 {"m1_condition", Num(s.m1_condition)},
                 {"m2_condition", Num(s.m2_condition)},
                 {"m1_rank", s.m1_rank},
                 {"m2_rank", s.m2_rank},
                 {"rank_deficient", s.rank_deficient}};
  json risks = json::array();
  for (double r : info.zeta_path.test_risk) risks.push_back(Num(r));
  return {{"p_degree", info.p_degree},
          {"zeta", info.zeta},
          {"zeta_path",
           {{"zetas", info.zeta_path.zetas},
            {"test_risk", risks},
            {"chosen", info.zeta_path.chosen}}},
          {"stage1", stage1},
          {"lambda_diagonal", Vec(info.lambda_diagonal)},
          {"normal_residual", Num(info.normal_residual)},
          {"rhs_scale", Num(info.rhs_scale)},
          {"outcome_loss", Num(info.outcome_loss)},
          {"embedding_loss", Num(info.embedding_loss)},
          {"validation_loss", Num(info.validation_loss)}};
}

FitInfo InfoOf(const json& j) {
  FitInfo info;
  info.p_degree = j.at("p_degree").get<int>();
  info.zeta = j.at("zeta").get<double>();
  const json& path = j.at("zeta_path");
  info.zeta_path.zetas = path.at("zetas").get<std::vector<double>>();
  for (const auto& r : path.at("test_risk")) info.zeta_path.test_risk.push_back(NumOf(r));
  info.zeta_path.chosen = path.at("chosen").get<size_t>();
  const json& s = j.at("stage1");
  info.stage1.outcome_r2 = NumOf(s.at("outcome_r2"));
  info.stage1.target_r2 = ToVec(s.at("target_r2"));
  info.stage1.m1_condition = NumOf(s.at("m1_condition"));
  info.stage1.m2_condition = NumOf(s.at("m2_condition"));
  info.stage1.m1_rank = s.at("m1_rank").get<Eigen::Index>();
  info.stage1.m2_rank = s.at("m2_rank").get<Eigen::Index>();
  info.stage1.rank_deficient = s.at("rank_deficient").get<bool>();
  info.lambda_diagonal = ToVec(j.at("lambda_diagonal"));
  info.normal_residual = NumOf(j.at("normal_residual"));
  info.rhs_scale = NumOf(j.at("rhs_scale"));
  info.outcome_loss = NumOf(j.at("outcome_loss"));
  info.embedding_loss = NumOf(j.at("embedding_loss"));
  info.validation_loss = NumOf(j.at("validation_loss"));
  return info;
}

json CapceJson(const CapceModel& m) {
  json j = {{"format", kFormatVersion},
            {"kind", CapceKindName(m.kind())},
            {"z0", m.z0()},
            {"coefficients", Vec(m.coefficients())},
            {"info", InfoJson(m.info())}};
  if (m.kind() == CapceKind::kRkhs) {
    j["kernel"] = KernelJson(m.kernel());
    j["d"] = m.d();
    j["anchors"] = Mat(m.anchors());
  } else {
    j["basis"] = BasisJson(m.basis());
  }
  return j;
}

CapceModel CapceOf(const json& j) {
  const CapceKind kind = CapceKindFromName(j.at("kind").get<std::string>());
  const double z0 = j.at("z0").get<double>();
  const auto coef = ToVec(j.at("coefficients"));
  FitInfo info = InfoOf(j.at("info"));
  if (kind == CapceKind::kRkhs) {
    const int d = j.at("d").get<int>();
    return CapceModel::Rkhs(KernelOf(j.at("kernel")), ToMat(j.at("anchors"), d + 1), coef, z0,
                            std::move(info));
  }
  return CapceModel::Series(kind, BasisOf(j.at("basis")), coef, z0, std::move(info));
}

json StructuralJson(const StructuralModel& m) {
  json j = {{"format", kFormatVersion},
            {"kind", StructuralKindName(m.kind())},
            {"d", m.d()},
            {"coefficients", Vec(m.coefficients())},
            {"info", InfoJson(m.info())}};
  if (m.kind() == StructuralKind::kKernelIv) {
    j["kernel"] = KernelJson(m.kernel());
    j["step"] = m.step();
  } else {
    j["basis"] = BasisJson(m.basis());
  }
  return j;
}

StructuralModel StructuralOf(const json& j) {
  const StructuralKind kind = StructuralKindFromName(j.at("kind").get<std::string>());
  const auto coef = ToVec(j.at("coefficients"));
  FitInfo info = InfoOf(j.at("info"));
  if (kind == StructuralKind::kKernelIv) {
    return StructuralModel::KernelIv(KernelOf(j.at("kernel")), j.at("d").get<int>(), coef,
                                     j.at("step").get<double>(), std::move(info));
  }
  return StructuralModel::Series(kind, BasisOf(j.at("basis")), coef, std::move(info));
}

template <typename F>
auto Parsed(const std::string& text, F&& f) {
  try {
    return f(json::parse(text));
  } catch (const json::exception& e) {
    Fail(ErrorCode::kParseError, std::string("model document: ") + e.what());
  } catch (const Error& e) {
    // Unknown names and inconsistent shapes inside an otherwise valid document.
    if (e.code() == ErrorCode::kIoError) throw;
    Fail(ErrorCode::kParseError, std::string("model document: ") + e.what());
  }
}

json FittedJson(const FittedEstimator& f) {
  json j = {{"method", MethodName(f.method)}};
  if (f.capce) j["model"] = CapceJson(*f.capce);
  if (f.structural) j["model"] = StructuralJson(*f.structural);
  return j;
}

}  // namespace

std::string ToJson(const CapceModel& model) { return CapceJson(model).dump(2) + "\n"; }
std::string ToJson(const StructuralModel& model) { return StructuralJson(model).dump(2) + "\n"; }
std::string ToJson(const FittedEstimator& fitted) { return FittedJson(fitted).dump(2) + "\n"; }

CapceModel CapceModelFromJson(const std::string& text) {
  return Parsed(text, [](const json& j) { return CapceOf(j); });
}

StructuralModel StructuralModelFromJson(const std::string& text) {
  return Parsed(text, [](const json& j) { return StructuralOf(j); });
}

FittedEstimator FittedEstimatorFromJson(const std::string& text) {
  return Parsed(text, [](const json& j) {
    FittedEstimator f;
    f.method = MethodFromName(j.at("method").get<std::string>());
    if (IsCapceMethod(f.method)) {
      f.capce = CapceOf(j.at("model"));
    } else {
      f.structural = StructuralOf(j.at("model"));
    }
    return f;
  });
}

void SaveEstimator(const FittedEstimator& fitted, const std::string& path) {
  WriteTextFile(path, ToJson(fitted));
}

FittedEstimator LoadEstimator(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(ErrorCode::kIoError, "cannot open model '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return FittedEstimatorFromJson(buf.str());
}

std::string DiagnosticsJson(const FittedEstimator& fitted) {
  const FitInfo& info = fitted.capce ? fitted.capce->info() : fitted.structural->info();
  json j = {{"method", MethodName(fitted.method)}, {"fit", InfoJson(info)}};
  if (fitted.capce && fitted.capce->kind() == CapceKind::kRkhs) {
    j["kernel"] = KernelJson(fitted.capce->kernel());
  } else if (fitted.structural && fitted.structural->kind() == StructuralKind::kKernelIv) {
    j["kernel"] = KernelJson(fitted.structural->kernel());
  }
  const auto labels = fitted.CoefficientLabels();
  const auto coef = fitted.Coefficients();
  json terms = json::array();
  for (size_t i = 0; i < labels.size() && static_cast<Eigen::Index>(i) < coef.size(); ++i) {
    terms.push_back({{"term", labels[i]}, {"value", coef(static_cast<Eigen::Index>(i))}});
  }
  j["coefficients"] = terms;
  return j.dump(2) + "\n";
}

}  // namespace capce
