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

#include "capce/basis.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>

#include "capce/error.h"

namespace capce {
namespace {

// k-th derivative of the p-th family element at t.
double FactorDerivative(bool hermite, int p, double t, int k) {
  if (k > p) return 0.0;
  double scale = 1.0;
  for (int i = 0; i < k; ++i) scale *= p - i;
  const int q = p - k;
  return scale * (hermite ? Hermite(q, t) : std::pow(t, q));
}

// D^a of the antiderivative of the p-th element.
double XFactorAnti(bool hermite, int p, double t, int a) {
  if (a > 0) return FactorDerivative(hermite, p, t, a - 1);
  const double next = hermite ? Hermite(p + 1, t) : std::pow(t, p + 1);
  return next / (p + 1);
}

void CheckDim(const BasisSpec& spec, const Eigen::VectorXd& w) {
  if (w.size() != spec.d()) {
    Fail(ErrorCode::kDimensionMismatch,
         "covariate vector has length " + std::to_string(w.size()) +
             ", basis expects " + std::to_string(spec.d()));
  }
}

double CovariateProduct(const BasisSpec& spec, const BasisTerm& term,
                        const Eigen::VectorXd& w, const int* orders) {
  double v = 1.0;
  for (int k = 0; k < spec.d(); ++k) {
    v *= FactorDerivative(spec.hermite(), term.w[static_cast<size_t>(k)],
                          w(k), orders ? orders[k] : 0);
    if (v == 0.0) break;
  }
  return v;
}

std::vector<BasisTerm> ProductTerms(int x_deg, int w_deg, int d) {
  std::vector<BasisTerm> terms;
  std::vector<int> idx(static_cast<size_t>(d), 0);
  for (int p = 0; p <= x_deg; ++p) {
    std::fill(idx.begin(), idx.end(), 0);
    while (true) {
      terms.push_back({p, idx});
      int k = d - 1;
      while (k >= 0 && idx[static_cast<size_t>(k)] == w_deg) {
        idx[static_cast<size_t>(k)] = 0;
        --k;
      }
      if (k < 0) break;
      ++idx[static_cast<size_t>(k)];
    }
  }
  return terms;
}

std::string PowerSuffix(int p, bool caret) {
  if (p == 1) return "";
  return (caret ? "^" : "") + std::to_string(p);
}

int ParseInt(const std::string& s, size_t& pos) {
  int v = 0;
  size_t start = pos;
  while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) {
    v = v * 10 + (s[pos] - '0');
    ++pos;
    if (v > 1000) break;
  }
  if (pos == start) return -1;
  return v;
}

BasisTerm ParseTerm(const std::string& raw, int d) {
  std::string s;
  for (char c : raw) {
    if (c == ' ' || c == '*') continue;
    s.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  }
  auto bad = [&](const std::string& why) {
    Fail(ErrorCode::kInvalidArgument, "bad basis term '" + raw + "': " + why);
  };
  BasisTerm term{0, std::vector<int>(static_cast<size_t>(d), 0)};
  if (s == "1") return term;
  if (s.empty()) bad("empty");
  size_t pos = 0;
  while (pos < s.size()) {
    const char c = s[pos++];
    int* target = nullptr;
    if (c == 'X') {
      target = &term.x;
    } else if (c == 'W') {
      int k = 1;
      if (pos < s.size() && s[pos] == '_') {
        ++pos;
        k = ParseInt(s, pos);
        if (k < 1) bad("missing covariate index");
      } else if (d > 1) {
        bad("use W_k with more than one covariate");
      }
      if (k > d) bad("covariate index exceeds d");
      target = &term.w[static_cast<size_t>(k - 1)];
    } else {
      bad(std::string("unexpected '") + c + "'");
    }
    int power = 1;
    if (pos < s.size() && s[pos] == '^') {
      ++pos;
      power = ParseInt(s, pos);
      if (power < 0) bad("missing exponent");
    } else if (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) {
      power = ParseInt(s, pos);
    }
    *target += power;
  }
  return term;
}

}  // namespace

double Hermite(int p, double t) {
  if (p < 0 || p > kMaxHermiteDegree) {
    Fail(ErrorCode::kDegreeTooHigh,
         "Hermite degree " + std::to_string(p) + " outside [0, " +
             std::to_string(kMaxHermiteDegree) + "]");
  }
  if (p == 0) return 1.0;
  double prev = 1.0;
  double cur = t;
  for (int k = 1; k < p; ++k) {
    const double next = t * cur - k * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

BasisSpec::BasisSpec(BasisKind kind, int d, std::vector<BasisTerm> terms,
                     int x_deg, int w_deg)
    : kind_(kind), d_(d), terms_(std::move(terms)), x_deg_(x_deg), w_deg_(w_deg) {
  if (terms_.empty()) Fail(ErrorCode::kInvalidArgument, "basis has no terms");
}

BasisSpec BasisSpec::HermiteProduct(int x_deg, int w_deg, int d) {
  if (d < 0 || x_deg < 0 || w_deg < 0) {
    Fail(ErrorCode::kInvalidArgument, "degrees and d must be non-negative");
  }
  if (x_deg + 1 > kMaxHermiteDegree || w_deg > kMaxHermiteDegree) {
    Fail(ErrorCode::kDegreeTooHigh, "Hermite basis degree too high");
  }
  return BasisSpec(BasisKind::kHermiteProduct, d, ProductTerms(x_deg, w_deg, d),
                   x_deg, w_deg);
}

BasisSpec BasisSpec::MonomialProduct(int x_deg, int w_deg, int d) {
  if (d < 0 || x_deg < 0 || w_deg < 0) {
    Fail(ErrorCode::kInvalidArgument, "degrees and d must be non-negative");
  }
  return BasisSpec(BasisKind::kMonomialProduct, d, ProductTerms(x_deg, w_deg, d),
                   x_deg, w_deg);
}

BasisSpec BasisSpec::ExplicitTerms(const std::vector<std::string>& terms, int d) {
  if (d < 0) Fail(ErrorCode::kInvalidArgument, "d must be non-negative");
  std::vector<BasisTerm> parsed;
  int x_deg = 0;
  int w_deg = 0;
  for (const auto& t : terms) {
    parsed.push_back(ParseTerm(t, d));
    x_deg = std::max(x_deg, parsed.back().x);
    for (int q : parsed.back().w) w_deg = std::max(w_deg, q);
  }
  return BasisSpec(BasisKind::kExplicitTerms, d, std::move(parsed), x_deg, w_deg);
}

std::vector<std::string> BasisSpec::TermStrings() const {
  std::vector<std::string> out;
  for (const auto& t : terms_) {
    std::string s;
    if (t.x > 0) s += "X" + PowerSuffix(t.x, false);
    for (int k = 0; k < d_; ++k) {
      const int q = t.w[static_cast<size_t>(k)];
      if (q == 0) continue;
      if (d_ == 1) {
        s += "W" + PowerSuffix(q, false);
      } else {
        s += "W_" + std::to_string(k + 1) + PowerSuffix(q, true);
      }
    }
    out.push_back(s.empty() ? "1" : s);
  }
  return out;
}

std::vector<std::string> BasisSpec::Labels() const {
  if (!hermite()) return TermStrings();
  std::vector<std::string> out;
  for (const auto& t : terms_) {
    std::string s = "h" + std::to_string(t.x) + "(X)";
    for (int k = 0; k < d_; ++k) {
      s += "h" + std::to_string(t.w[static_cast<size_t>(k)]) + "(W" +
           (d_ > 1 ? std::to_string(k + 1) : "") + ")";
    }
    out.push_back(s);
  }
  return out;
}

bool BasisSpec::operator==(const BasisSpec& other) const {
  if (kind_ != other.kind_ || d_ != other.d_ ||
      terms_.size() != other.terms_.size()) {
    return false;
  }
  for (size_t j = 0; j < terms_.size(); ++j) {
    if (terms_[j].x != other.terms_[j].x || terms_[j].w != other.terms_[j].w) {
      return false;
    }
  }
  return true;
}

std::string BasisKindName(BasisKind kind) {
  switch (kind) {
    case BasisKind::kHermiteProduct: return "hermite_product";
    case BasisKind::kMonomialProduct: return "monomial_product";
    case BasisKind::kExplicitTerms: return "explicit_terms";
  }
  return "unknown";
}

Eigen::VectorXd EvalBasis(const BasisSpec& spec, double x,
                          const Eigen::VectorXd& w) {
  CheckDim(spec, w);
  Eigen::VectorXd out(spec.size());
  for (Eigen::Index j = 0; j < spec.size(); ++j) {
    const auto& t = spec.terms()[static_cast<size_t>(j)];
    out(j) = FactorDerivative(spec.hermite(), t.x, x, 0) *
             CovariateProduct(spec, t, w, nullptr);
  }
  return out;
}

Eigen::VectorXd EvalAntiderivative(const BasisSpec& spec, double x,
                                   const Eigen::VectorXd& w) {
  CheckDim(spec, w);
  Eigen::VectorXd out(spec.size());
  for (Eigen::Index j = 0; j < spec.size(); ++j) {
    const auto& t = spec.terms()[static_cast<size_t>(j)];
    out(j) = XFactorAnti(spec.hermite(), t.x, x, 0) *
             CovariateProduct(spec, t, w, nullptr);
  }
  return out;
}

Eigen::VectorXd EvalBasisDx(const BasisSpec& spec, double x,
                            const Eigen::VectorXd& w) {
  CheckDim(spec, w);
  Eigen::VectorXd out(spec.size());
  for (Eigen::Index j = 0; j < spec.size(); ++j) {
    const auto& t = spec.terms()[static_cast<size_t>(j)];
    out(j) = FactorDerivative(spec.hermite(), t.x, x, 1) *
             CovariateProduct(spec, t, w, nullptr);
  }
  return out;
}

Eigen::VectorXd EvalBasisPartial(const BasisSpec& spec,
                                 const std::vector<int>& lambda, double x,
                                 const Eigen::VectorXd& w, int max_order) {
  CheckDim(spec, w);
  if (lambda.size() != static_cast<size_t>(spec.d() + 1)) {
    Fail(ErrorCode::kDimensionMismatch, "multi-index must have length d + 1");
  }
  int total = 0;
  for (int a : lambda) {
    if (a < 0) Fail(ErrorCode::kInvalidArgument, "negative derivative order");
    total += a;
  }
  if (total > max_order) {
    Fail(ErrorCode::kOrderTooHigh,
         "derivative order " + std::to_string(total) + " exceeds " +
             std::to_string(max_order));
  }
  Eigen::VectorXd out(spec.size());
  for (Eigen::Index j = 0; j < spec.size(); ++j) {
    const auto& t = spec.terms()[static_cast<size_t>(j)];
    out(j) = XFactorAnti(spec.hermite(), t.x, x, lambda[0]) *
             CovariateProduct(spec, t, w, lambda.data() + 1);
  }
  return out;
}

namespace {

template <typename Fn>
Eigen::MatrixXd RowwiseEval(const BasisSpec& spec, const Eigen::VectorXd& x,
                            const Eigen::MatrixXd& w, Fn fn) {
  if (w.rows() != x.size() || w.cols() != spec.d()) {
    Fail(ErrorCode::kDimensionMismatch, "covariate matrix shape mismatch");
  }
  Eigen::MatrixXd out(x.size(), spec.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    out.row(i) = fn(spec, x(i), Eigen::VectorXd(w.row(i).transpose())).transpose();
  }
  return out;
}

}  // namespace

Eigen::MatrixXd BasisMatrix(const BasisSpec& spec, const Eigen::VectorXd& x,
                            const Eigen::MatrixXd& w) {
  return RowwiseEval(spec, x, w, EvalBasis);
}

Eigen::MatrixXd AntiderivativeMatrix(const BasisSpec& spec,
                                     const Eigen::VectorXd& x,
                                     const Eigen::MatrixXd& w) {
  return RowwiseEval(spec, x, w, EvalAntiderivative);
}

Eigen::MatrixXd BasisDxMatrix(const BasisSpec& spec, const Eigen::VectorXd& x,
                              const Eigen::MatrixXd& w) {
  return RowwiseEval(spec, x, w, EvalBasisDx);
}

std::vector<std::vector<int>> MultiIndices(int d, int order) {
  std::vector<std::vector<int>> out;
  std::vector<int> idx(static_cast<size_t>(d + 1), 0);
  // Enumerate all vectors with entries in [0, order] and keep small ones.
  while (true) {
    if (std::accumulate(idx.begin(), idx.end(), 0) <= order) out.push_back(idx);
    int k = d;
    while (k >= 0 && idx[static_cast<size_t>(k)] == order) {
      idx[static_cast<size_t>(k)] = 0;
      --k;
    }
    if (k < 0) break;
    ++idx[static_cast<size_t>(k)];
  }
  return out;
}

InstrumentBasis::InstrumentBasis(int degree) : degree_(degree) {
  if (degree < 1) Fail(ErrorCode::kInvalidArgument, "instrument degree P must be >= 1");
}

Eigen::VectorXd InstrumentBasis::Eval(double z) const {
  Eigen::VectorXd q(degree_);
  double v = 1.0;
  for (int p = 0; p < degree_; ++p) {
    q(p) = v;
    v *= z;
  }
  return q;
}

Eigen::MatrixXd InstrumentBasis::Matrix(const Eigen::VectorXd& z) const {
  Eigen::MatrixXd out(z.size(), degree_);
  for (Eigen::Index i = 0; i < z.size(); ++i) out.row(i) = Eval(z(i)).transpose();
  return out;
}

}  // namespace capce
