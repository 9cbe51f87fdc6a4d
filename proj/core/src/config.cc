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

#include "capce/config.h"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <toml.hpp>

#include "capce/error.h"
#include "capce/scm_bench.h"

namespace capce {
namespace {

[[noreturn]] void Bad(const std::string& where, const std::string& what) {
  Fail(ErrorCode::kParseError, "config: " + where + ": " + what);
}

void CheckKeys(const toml::table& t, const std::string& where,
               std::initializer_list<std::string_view> allowed) {
  for (const auto& [key, node] : t) {
    if (std::find(allowed.begin(), allowed.end(), key.str()) == allowed.end()) {
      Bad(where, "unknown key '" + std::string(key.str()) + "'");
    }
  }
}

const toml::table* SubTable(const toml::table& t, std::string_view key, const std::string& where) {
  const toml::node* n = t.get(key);
  if (!n) return nullptr;
  const toml::table* sub = n->as_table();
  if (!sub) Bad(where, std::string(key) + " must be a table");
  return sub;
}

template <typename T>
std::optional<T> Get(const toml::table& t, std::string_view key, const std::string& where) {
  const toml::node* n = t.get(key);
  if (!n) return std::nullopt;
  auto v = n->value<T>();
  if (!v) Bad(where, "bad value for '" + std::string(key) + "'");
  return v;
}

template <typename T>
void Assign(const toml::table& t, std::string_view key, const std::string& where, T& out) {
  if (auto v = Get<T>(t, key, where)) out = *v;
}

template <typename T>
std::optional<std::vector<T>> GetList(const toml::table& t, std::string_view key,
                                      const std::string& where) {
  const toml::node* n = t.get(key);
  if (!n) return std::nullopt;
  const toml::array* a = n->as_array();
  if (!a) Bad(where, "'" + std::string(key) + "' must be an array");
  std::vector<T> out;
  for (const auto& e : *a) {
    auto v = e.value<T>();
    if (!v) Bad(where, "bad element in '" + std::string(key) + "'");
    out.push_back(*v);
  }
  return out;
}

template <typename T>
void AssignList(const toml::table& t, std::string_view key, const std::string& where,
                std::vector<T>& out) {
  if (auto v = GetList<T>(t, key, where)) out = std::move(*v);
}

BasisSpec BasisFromTable(const toml::table& t, int d, const std::string& where) {
  if (t.contains("terms")) {
    CheckKeys(t, where, {"terms", "d"});
    auto terms = *GetList<std::string>(t, "terms", where);
    return BasisSpec::ExplicitTerms(terms, Get<int>(t, "d", where).value_or(d));
  }
  CheckKeys(t, where, {"kind", "x_deg", "w_deg", "d"});
  const auto kind = Get<std::string>(t, "kind", where);
  if (!kind) Bad(where, "basis needs 'kind' or 'terms'");
  const auto x_deg = Get<int>(t, "x_deg", where);
  const auto w_deg = Get<int>(t, "w_deg", where);
  if (!x_deg || !w_deg) Bad(where, "basis needs 'x_deg' and 'w_deg'");
  const int dim = Get<int>(t, "d", where).value_or(d);
  if (*kind == "hermite_product") return BasisSpec::HermiteProduct(*x_deg, *w_deg, dim);
  if (*kind == "monomial_product") return BasisSpec::MonomialProduct(*x_deg, *w_deg, dim);
  Bad(where, "unknown basis kind '" + *kind + "'");
}

void ReadKernel(const toml::table& t, const std::string& where, KernelConfig& k) {
  CheckKeys(t, where, {"c1", "c2", "c3", "c4", "lambda1", "lambda2", "lambda3", "xi"});
  Assign(t, "c1", where, k.c1);
  Assign(t, "c2", where, k.c2);
  Assign(t, "c3", where, k.c3);
  Assign(t, "c4", where, k.c4);
  Assign(t, "lambda1", where, k.lambda1);
  Assign(t, "lambda2", where, k.lambda2);
  Assign(t, "lambda3", where, k.lambda3);
  Assign(t, "xi", where, k.xi);
}

EstimatorConfig ReadEstimator(const toml::table& t, int d, const std::string& where) {
  CheckKeys(t, where, {"label", "method", "basis", "terms", "p_degree", "zeta_grid", "z0",
                       "lambda", "grids", "kernel"});
  const auto method = Get<std::string>(t, "method", where);
  if (!method) Bad(where, "estimator needs 'method'");
  EstimatorConfig cfg = DefaultEstimator(MethodFromName(*method));
  Assign(t, "label", where, cfg.label);
  if (t.contains("basis") && t.contains("terms")) Bad(where, "give 'basis' or 'terms', not both");
  if (const toml::table* b = SubTable(t, "basis", where)) {
    cfg.basis = BasisFromTable(*b, d, where + ".basis");
  }
  if (auto terms = GetList<std::string>(t, "terms", where)) {
    cfg.basis = BasisSpec::ExplicitTerms(*terms, d);
  }
  Assign(t, "p_degree", where, cfg.p_degree);
  AssignList(t, "zeta_grid", where, cfg.zeta_grid);
  if (auto z0 = Get<double>(t, "z0", where)) cfg.z0 = *z0;
  if (const toml::table* l = SubTable(t, "lambda", where)) {
    const std::string w = where + ".lambda";
    CheckKeys(*l, w, {"x_lo", "x_hi", "w_lo", "w_hi", "kappa", "order", "n_mc", "seed"});
    Assign(*l, "x_lo", w, cfg.lambda.x_lo);
    Assign(*l, "x_hi", w, cfg.lambda.x_hi);
    Assign(*l, "w_lo", w, cfg.lambda.w_lo);
    Assign(*l, "w_hi", w, cfg.lambda.w_hi);
    Assign(*l, "kappa", w, cfg.lambda.kappa);
    Assign(*l, "order", w, cfg.lambda.order);
    if (auto n = Get<std::int64_t>(*l, "n_mc", w)) cfg.lambda.n_mc = *n;
    if (auto s = Get<std::int64_t>(*l, "seed", w)) cfg.lambda.seed = static_cast<std::uint64_t>(*s);
  }
  if (const toml::table* g = SubTable(t, "grids", where)) {
    const std::string w = where + ".grids";
    CheckKeys(*g, w, {"c1", "c2", "c3", "c4", "lambda1", "lambda2", "lambda3", "xi"});
    AssignList(*g, "c1", w, cfg.grids.c1);
    AssignList(*g, "c2", w, cfg.grids.c2);
    AssignList(*g, "c3", w, cfg.grids.c3);
    AssignList(*g, "c4", w, cfg.grids.c4);
    AssignList(*g, "lambda1", w, cfg.grids.lambda1);
    AssignList(*g, "lambda2", w, cfg.grids.lambda2);
    AssignList(*g, "lambda3", w, cfg.grids.lambda3);
    AssignList(*g, "xi", w, cfg.grids.xi);
  }
  if (const toml::table* k = SubTable(t, "kernel", where)) {
    KernelConfig kc;
    ReadKernel(*k, where + ".kernel", kc);
    kc.Validate();
    cfg.kernel = kc;
  }
  cfg.Validate(d);
  return cfg;
}

toml::table ParseToml(const std::string& text, const std::string& source) {
  try {
    return toml::parse(text, source);
  } catch (const toml::parse_error& e) {
    std::ostringstream msg;
    msg << "config: " << source << ":" << e.source().begin.line << ": " << e.description();
    Fail(ErrorCode::kParseError, msg.str());
  }
}

RunConfig FromTable(const toml::table& root) {
  CheckKeys(root, "top level", {"seed", "out_dir", "data", "benchmark", "bootstrap", "estimator"});
  RunConfig cfg;
  if (auto s = Get<std::int64_t>(root, "seed", "top level")) {
    cfg.seed = static_cast<std::uint64_t>(*s);
  }
  if (auto o = Get<std::string>(root, "out_dir", "top level")) cfg.out_dir = *o;

  if (const toml::table* t = SubTable(root, "data", "top level")) {
    CheckKeys(*t, "data", {"path", "path1", "path2", "treatment", "outcome", "instrument",
                           "covariates"});
    Assign(*t, "path", "data", cfg.data.path);
    Assign(*t, "path1", "data", cfg.data.path1);
    Assign(*t, "path2", "data", cfg.data.path2);
    Assign(*t, "treatment", "data", cfg.data.columns.treatment);
    Assign(*t, "outcome", "data", cfg.data.columns.outcome);
    Assign(*t, "instrument", "data", cfg.data.columns.instrument);
    AssignList(*t, "covariates", "data", cfg.data.columns.covariates);
  }
  const int d = cfg.data.columns.covariates.empty()
                    ? 1
                    : static_cast<int>(cfg.data.columns.covariates.size());

  if (const toml::table* t = SubTable(root, "benchmark", "top level")) {
    cfg.has_benchmark = true;
    CheckKeys(*t, "benchmark", {"settings", "sample_sizes", "replications", "base_seed", "z0",
                                "curve_w", "threads", "grid"});
    BenchmarkPlan& plan = cfg.benchmark;
    if (auto names = GetList<std::string>(*t, "settings", "benchmark")) {
      plan.settings.clear();
      for (const auto& n : *names) plan.settings.push_back(ScmSetting::FromName(n));
    }
    if (auto sizes = GetList<std::int64_t>(*t, "sample_sizes", "benchmark")) {
      plan.sample_sizes.assign(sizes->begin(), sizes->end());
    }
    Assign(*t, "replications", "benchmark", plan.replications);
    if (auto s = Get<std::int64_t>(*t, "base_seed", "benchmark")) {
      plan.base_seed = static_cast<std::uint64_t>(*s);
    }
    Assign(*t, "z0", "benchmark", plan.z0);
    AssignList(*t, "curve_w", "benchmark", plan.curve_w);
    Assign(*t, "threads", "benchmark", plan.threads);
    if (const toml::table* g = SubTable(*t, "grid", "benchmark")) {
      CheckKeys(*g, "benchmark.grid", {"x_lo", "x_hi", "w_lo", "w_hi", "nx", "nw"});
      EvalBox box;
      int nx = 41;
      int nw = 21;
      Assign(*g, "x_lo", "benchmark.grid", box.x_lo);
      Assign(*g, "x_hi", "benchmark.grid", box.x_hi);
      Assign(*g, "w_lo", "benchmark.grid", box.w_lo);
      Assign(*g, "w_hi", "benchmark.grid", box.w_hi);
      Assign(*g, "nx", "benchmark.grid", nx);
      Assign(*g, "nw", "benchmark.grid", nw);
      plan.grid = MakeGrid(box, nx, nw);
    }
  }

  if (const toml::table* t = SubTable(root, "bootstrap", "top level")) {
    CheckKeys(*t, "bootstrap", {"resamples", "seed", "threads", "table_x", "table_w"});
    Assign(*t, "resamples", "bootstrap", cfg.bootstrap.resamples);
    if (auto s = Get<std::int64_t>(*t, "seed", "bootstrap")) {
      cfg.bootstrap.seed = static_cast<std::uint64_t>(*s);
    }
    Assign(*t, "threads", "bootstrap", cfg.bootstrap.threads);
    AssignList(*t, "table_x", "bootstrap", cfg.bootstrap.table_x);
    AssignList(*t, "table_w", "bootstrap", cfg.bootstrap.table_w);
  }

  if (const toml::node* n = root.get("estimator")) {
    const toml::array* arr = n->as_array();
    if (!arr) Bad("top level", "'estimator' must be an array of tables ([[estimator]])");
    for (size_t i = 0; i < arr->size(); ++i) {
      const toml::table* t = (*arr)[i].as_table();
      const std::string where = "estimator[" + std::to_string(i) + "]";
      if (!t) Bad(where, "must be a table");
      cfg.estimators.push_back(ReadEstimator(*t, d, where));
    }
  }
  if (cfg.has_benchmark) cfg.benchmark.estimators = cfg.estimators;
  return cfg;
}

}  // namespace

TwoSampleDataset DataSource::Load() const {
  if (!path.empty()) {
    if (!path1.empty() || !path2.empty()) {
      Fail(ErrorCode::kInvalidArgument, "give either a joint table or a pre-split pair");
    }
    return LoadJointCsv(path, columns);
  }
  if (path1.empty() || path2.empty()) {
    Fail(ErrorCode::kInvalidArgument, "pre-split input needs both sample files");
  }
  return LoadTwoSampleCsv(path1, path2, columns);
}

RunConfig ParseConfig(const std::string& text) {
  return FromTable(ParseToml(text, "<config>"));
}

RunConfig LoadConfig(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(ErrorCode::kIoError, "cannot open config '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return FromTable(ParseToml(buf.str(), path));
}

std::string BasisToConfig(const BasisSpec& spec) {
  std::ostringstream s;
  if (spec.kind() == BasisKind::kExplicitTerms) {
    s << "{ terms = [";
    const auto terms = spec.TermStrings();
    for (size_t i = 0; i < terms.size(); ++i) s << (i ? ", " : "") << '"' << terms[i] << '"';
    s << "]";
  } else {
    s << "{ kind = \"" << BasisKindName(spec.kind()) << "\", x_deg = " << spec.x_degree()
      << ", w_deg = " << spec.w_degree();
  }
  if (spec.d() != 1) s << ", d = " << spec.d();
  s << " }";
  return s.str();
}

BasisSpec BasisFromConfig(const std::string& text, int d) {
  const auto first = text.find_first_not_of(" \t\r\n");
  const bool bare = first != std::string::npos && text[first] == '{';
  const toml::table root = ParseToml(bare ? "basis = " + text : text, "<basis>");
  CheckKeys(root, "basis", {"basis"});
  const toml::table* t = SubTable(root, "basis", "basis");
  if (!t) Bad("basis", "missing 'basis'");
  return BasisFromTable(*t, d, "basis");
}

}  // namespace capce
