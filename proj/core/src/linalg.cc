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

#include "capce/linalg.h"

#include <cmath>
#include <limits>

#include "capce/error.h"

namespace capce {

PseudoInverse ComputePseudoInverse(const Eigen::MatrixXd& m, double rel_cutoff) {
  PseudoInverse out;
  out.matrix = Eigen::MatrixXd::Zero(m.cols(), m.rows());
  if (m.size() == 0) return out;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& s = svd.singularValues();
  const double smax = s.size() > 0 ? s(0) : 0.0;
  const double cutoff = rel_cutoff * smax;
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(s.size());
  for (Eigen::Index k = 0; k < s.size(); ++k) {
    if (s(k) > cutoff && s(k) > 0.0) {
      inv(k) = 1.0 / s(k);
      ++out.rank;
    }
  }
  out.matrix = svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
  const double smin = s.size() > 0 ? s(s.size() - 1) : 0.0;
  out.condition = smin > 0.0 ? smax / smin : std::numeric_limits<double>::infinity();
  return out;
}

Eigen::MatrixXd SolveSpd(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                         bool* used_fallback) {
  Eigen::LLT<Eigen::MatrixXd> llt(a);
  if (llt.info() == Eigen::Success) {
    Eigen::MatrixXd x = llt.solve(b);
    if (x.allFinite()) {
      if (used_fallback) *used_fallback = false;
      return x;
    }
  }
  if (used_fallback) *used_fallback = true;
  return ComputePseudoInverse(a).matrix * b;
}

namespace {

double Jitter(const Eigen::MatrixXd& a) {
  return 1e-10 * std::abs(a.trace()) / static_cast<double>(a.rows());
}

bool TryLlt(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, Eigen::MatrixXd* x) {
  Eigen::LLT<Eigen::MatrixXd> llt(a);
  if (llt.info() != Eigen::Success) return false;
  *x = llt.solve(b);
  return x->allFinite();
}

bool TryLu(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, Eigen::MatrixXd* x) {
  Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
  if (!lu.isInvertible()) return false;
  *x = lu.solve(b);
  return x->allFinite();
}

template <typename Try>
Eigen::MatrixXd SolveWithJitter(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                                Try attempt) {
  if (a.rows() != a.cols() || a.rows() != b.rows()) {
    Fail(ErrorCode::kDimensionMismatch, "kernel system shapes disagree");
  }
  Eigen::MatrixXd x;
  if (attempt(a, b, &x)) return x;
  Eigen::MatrixXd shifted = a;
  shifted.diagonal().array() += Jitter(a);
  if (attempt(shifted, b, &x)) return x;
  Fail(ErrorCode::kGramSingular, "kernel system is singular after diagonal jitter");
}

}  // namespace

Eigen::MatrixXd SolveGram(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return SolveWithJitter(a, b, TryLlt);
}

Eigen::MatrixXd SolveGeneral(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return SolveWithJitter(a, b, TryLu);
}

}  // namespace capce
