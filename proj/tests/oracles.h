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

#ifndef CAPCE_TESTS_ORACLES_H_
#define CAPCE_TESTS_ORACLES_H_

#include <cmath>

#include <Eigen/Dense>

#include "capce/data_model.h"
#include "capce/estimators.h"

namespace capce::testing {

// Minimizes 0.5 a^T H a - g^T a by Nesterov-accelerated gradient descent.
inline Eigen::VectorXd MinimizeQuadratic(const Eigen::MatrixXd& h, const Eigen::VectorXd& g) {
  const double lmax = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(h).eigenvalues().maxCoeff();
  Eigen::VectorXd a = Eigen::VectorXd::Zero(g.size());
  Eigen::VectorXd prev = a;
  for (int it = 1; it <= 400000; ++it) {
    const Eigen::VectorXd v = a + (it - 1.0) / (it + 2.0) * (a - prev);
    prev = a;
    a = v - (h * v - g) / lmax;
    if (it % 1000 == 0 && (h * a - g).norm() < 1e-13 * (1 + g.norm())) break;
  }
  return a;
}

// Stage-2 RKHS weights from direct kernel sums (d = 1). Minimizes
//   |u - O^T a|^2 + N2 xi a^T Kxx a + N2 l3 |a|^2
// with O and u assembled entry by entry. Assumes N1 == N2.
inline Eigen::VectorXd BruteForceRkhsWeights(const TwoSampleDataset& data, const KernelConfig& k,
                                             double z0) {
  const auto& s1 = data.sample1();
  const auto& s2 = data.sample2();
  const Eigen::Index n = s1.size();
  auto kz = [&](double a, double b) { return std::pow(a * b + k.c1, k.c2); };
  Eigen::MatrixXd k11(n, n), k12(n, n), k22(n, n), kxx(n, n);
  Eigen::VectorXd k1z0(n), k2z0(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    k1z0(i) = kz(s1.z(i), z0);
    k2z0(i) = kz(s2.z(i), z0);
    for (Eigen::Index j = 0; j < n; ++j) {
      k11(i, j) = kz(s1.z(i), s1.z(j));
      k12(i, j) = kz(s1.z(i), s2.z(j));
      k22(i, j) = kz(s2.z(i), s2.z(j));
      kxx(i, j) = std::pow(s1.x(i) * s1.x(j) + s1.w(i, 0) * s1.w(j, 0) + k.c3, k.c4);
    }
  }
  const double nd = static_cast<double>(n);
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd o =
      kxx * (k11 + nd * k.lambda1 * eye).ldlt().solve(k12 - k1z0 * Eigen::RowVectorXd::Ones(n));
  const Eigen::VectorXd beta = (k22 + nd * k.lambda2 * eye).ldlt().solve(s2.y);
  const Eigen::VectorXd u = (k22 - k2z0 * Eigen::RowVectorXd::Ones(n)).transpose() * beta;
  const Eigen::MatrixXd h = 2 * (o * o.transpose() + nd * k.xi * kxx + nd * k.lambda3 * eye);
  return MinimizeQuadratic(h, 2 * o * u);
}

}  // namespace capce::testing

#endif  // CAPCE_TESTS_ORACLES_H_
