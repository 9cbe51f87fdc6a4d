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

#ifndef CAPCE_LINALG_H_
#define CAPCE_LINALG_H_

#include <Eigen/Dense>

namespace capce {

inline constexpr double kPinvRelativeCutoff = 1e-10;

struct PseudoInverse {
  Eigen::MatrixXd matrix;
  Eigen::Index rank = 0;
  // sigma_max / sigma_min over all singular values (infinite when singular).
  double condition = 0.0;
};

// Moore-Penrose inverse by SVD; singular values below
// rel_cutoff * sigma_max are treated as zero.
PseudoInverse ComputePseudoInverse(const Eigen::MatrixXd& m,
                                   double rel_cutoff = kPinvRelativeCutoff);

// Solves A X = B for symmetric positive (semi)definite A. Uses a Cholesky
// factorization and falls back to the pseudo-inverse when A is not
// numerically positive definite. Sets *used_fallback when given.
Eigen::MatrixXd SolveSpd(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                         bool* used_fallback = nullptr);

// Kernel systems. Solves A X = B; when A is numerically singular, retries
// once with 1e-10 * trace(A) / n added to the diagonal and throws
// kGramSingular if that also fails. SolveGram expects symmetric A.
Eigen::MatrixXd SolveGram(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);
Eigen::MatrixXd SolveGeneral(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

}  // namespace capce

#endif  // CAPCE_LINALG_H_
