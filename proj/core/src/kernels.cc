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

#include "capce/kernels.h"

#include <cmath>

#include "capce/error.h"

namespace capce {
namespace {

double LogFactorial(int n) { return std::lgamma(n + 1.0); }

double IntPow(double v, int p) {
  double out = 1.0;
  for (int i = 0; i < p; ++i) out *= v;
  return out;
}

}  // namespace

PolynomialKernel::PolynomialKernel(double offset, int degree)
    : offset_(offset), degree_(degree) {
  if (degree < 1) Fail(ErrorCode::kInvalidArgument, "kernel degree must be >= 1");
  if (!(offset >= 0.0) || !std::isfinite(offset)) {
    Fail(ErrorCode::kInvalidArgument, "kernel offset must be finite and >= 0");
  }
}

double PolynomialKernel::operator()(const Eigen::VectorXd& a,
                                    const Eigen::VectorXd& b) const {
  return IntPow(a.dot(b) + offset_, degree_);
}

Eigen::MatrixXd PolynomialKernel::Gram(const Eigen::MatrixXd& a,
                                       const Eigen::MatrixXd& b) const {
  if (a.cols() != b.cols()) Fail(ErrorCode::kDimensionMismatch, "kernel inputs differ in dimension");
  Eigen::MatrixXd inner = a * b.transpose();
  inner.array() += offset_;
  return inner.unaryExpr([this](double v) { return IntPow(v, degree_); });
}

Eigen::MatrixXd PolynomialKernel::GramDxSecond(const Eigen::MatrixXd& a,
                                               const Eigen::MatrixXd& b) const {
  if (a.cols() != b.cols()) Fail(ErrorCode::kDimensionMismatch, "kernel inputs differ in dimension");
  Eigen::MatrixXd inner = a * b.transpose();
  inner.array() += offset_;
  Eigen::MatrixXd out = inner.unaryExpr(
      [this](double v) { return degree_ * IntPow(v, degree_ - 1); });
  return out.array().colwise() * a.col(0).array();
}

std::vector<PolynomialKernel::Monomial> PolynomialKernel::Monomials(
    Eigen::Index dim) const {
  std::vector<Monomial> out;
  std::vector<int> k(static_cast<size_t>(dim), 0);
  while (true) {
    int used = 0;
    for (int v : k) used += v;
    if (used <= degree_) {
      const int c = degree_ - used;
      double log_coef = LogFactorial(degree_) - LogFactorial(c);
      for (int v : k) log_coef -= LogFactorial(v);
      double scale = std::exp(0.5 * log_coef);
      if (c > 0) scale *= std::sqrt(IntPow(offset_, c));
      out.push_back({k, scale});
    }
    Eigen::Index i = dim - 1;
    while (i >= 0 && k[static_cast<size_t>(i)] == degree_) {
      k[static_cast<size_t>(i)] = 0;
      --i;
    }
    if (i < 0) break;
    ++k[static_cast<size_t>(i)];
  }
  return out;
}

Eigen::Index PolynomialKernel::FeatureCount(Eigen::Index dim) const {
  return static_cast<Eigen::Index>(Monomials(dim).size());
}

Eigen::MatrixXd PolynomialKernel::Features(const Eigen::MatrixXd& points) const {
  const auto mons = Monomials(points.cols());
  Eigen::MatrixXd out(points.rows(), static_cast<Eigen::Index>(mons.size()));
  for (size_t f = 0; f < mons.size(); ++f) {
    for (Eigen::Index i = 0; i < points.rows(); ++i) {
      double v = mons[f].scale;
      for (Eigen::Index c = 0; c < points.cols(); ++c) {
        v *= IntPow(points(i, c), mons[f].powers[static_cast<size_t>(c)]);
      }
      out(i, static_cast<Eigen::Index>(f)) = v;
    }
  }
  return out;
}

Eigen::MatrixXd PolynomialKernel::FeaturesDx(const Eigen::MatrixXd& points) const {
  const auto mons = Monomials(points.cols());
  Eigen::MatrixXd out(points.rows(), static_cast<Eigen::Index>(mons.size()));
  for (size_t f = 0; f < mons.size(); ++f) {
    const int p0 = mons[f].powers[0];
    for (Eigen::Index i = 0; i < points.rows(); ++i) {
      if (p0 == 0) {
        out(i, static_cast<Eigen::Index>(f)) = 0.0;
        continue;
      }
      double v = mons[f].scale * p0 * IntPow(points(i, 0), p0 - 1);
      for (Eigen::Index c = 1; c < points.cols(); ++c) {
        v *= IntPow(points(i, c), mons[f].powers[static_cast<size_t>(c)]);
      }
      out(i, static_cast<Eigen::Index>(f)) = v;
    }
  }
  return out;
}

Eigen::MatrixXd TreatmentPoints(const Eigen::VectorXd& x, const Eigen::MatrixXd& w) {
  if (w.rows() != x.size()) Fail(ErrorCode::kDimensionMismatch, "x and w differ in length");
  Eigen::MatrixXd out(x.size(), 1 + w.cols());
  out.col(0) = x;
  out.rightCols(w.cols()) = w;
  return out;
}

Eigen::MatrixXd ScalarPoints(const Eigen::VectorXd& z) {
  return Eigen::MatrixXd(z);
}

}  // namespace capce
