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

#ifndef CAPCE_KERNELS_H_
#define CAPCE_KERNELS_H_

#include <vector>

#include <Eigen/Dense>

namespace capce {

// k(a, b) = (a^T b + offset)^degree. Points are rows of the input matrices.
// The kernel has the finite feature map
//   psi_k(a) = sqrt(m! / (k_1! ... k_D! c!) * offset^c) * prod_i a_i^{k_i}
// over multi-indices with k_1 + ... + k_D + c = m, so k(a, b) = psi(a)^T psi(b).
class PolynomialKernel {
 public:
  PolynomialKernel(double offset, int degree);

  double offset() const { return offset_; }
  int degree() const { return degree_; }

  double operator()(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const;
  Eigen::MatrixXd Gram(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) const;

  // d k(a, b) / d b_0 for every pair (rows of a) x (rows of b).
  Eigen::MatrixXd GramDxSecond(const Eigen::MatrixXd& a,
                               const Eigen::MatrixXd& b) const;

  Eigen::Index FeatureCount(Eigen::Index dim) const;
  Eigen::MatrixXd Features(const Eigen::MatrixXd& points) const;
  // Derivative of each feature in the first coordinate.
  Eigen::MatrixXd FeaturesDx(const Eigen::MatrixXd& points) const;

  bool operator==(const PolynomialKernel& o) const {
    return offset_ == o.offset_ && degree_ == o.degree_;
  }

 private:
  struct Monomial {
    std::vector<int> powers;
    double scale;
  };
  std::vector<Monomial> Monomials(Eigen::Index dim) const;

  double offset_;
  int degree_;
};

// Stacks (x, w) into an n x (1 + d) point matrix.
Eigen::MatrixXd TreatmentPoints(const Eigen::VectorXd& x, const Eigen::MatrixXd& w);

// A column vector as an n x 1 point matrix.
Eigen::MatrixXd ScalarPoints(const Eigen::VectorXd& z);

}  // namespace capce

#endif  // CAPCE_KERNELS_H_
