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

#ifndef CAPCE_SRC_KERNEL_INTERNAL_H_
#define CAPCE_SRC_KERNEL_INTERNAL_H_

#include <vector>

#include <Eigen/Dense>

#include "capce/data_model.h"
#include "capce/kernels.h"
#include "capce/linalg.h"

namespace capce::internal {

// (F^T F + n lambda I)^{-1} for a feature matrix F with n rows.
inline Eigen::MatrixXd RegularizedInverse(const Eigen::MatrixXd& f, double lambda) {
  Eigen::MatrixXd a = f.transpose() * f;
  a.diagonal().array() += static_cast<double>(f.rows()) * lambda;
  return SolveGram(a, Eigen::MatrixXd::Identity(a.rows(), a.cols()));
}

// Kernel ridge weights of y on instrument features, in feature space.
inline Eigen::VectorXd OutcomeWeights(const Eigen::MatrixXd& phi2,
                                      const Eigen::VectorXd& y, double lambda2) {
  Eigen::MatrixXd a = phi2.transpose() * phi2;
  a.diagonal().array() += static_cast<double>(phi2.rows()) * lambda2;
  return SolveGram(a, phi2.transpose() * y);
}

// The stage-1 conditional mean embedding in feature form: the embedding of
// (x, w) given z is B phi(z) with B = Psi^T Phi1 (Phi1^T Phi1 + N1 l1 I)^{-1}.
struct EmbeddingStage {
  Eigen::MatrixXd phi1;  // N1 x a
  Eigen::MatrixXd psi;   // N1 x b
  Eigen::MatrixXd map;   // b x a
};

inline EmbeddingStage FitEmbedding(const TwoSampleDataset& data,
                                   const PolynomialKernel& kz,
                                   const PolynomialKernel& kxw, double lambda1) {
  EmbeddingStage e;
  e.phi1 = kz.Features(ScalarPoints(data.sample1().z));
  e.psi = kxw.Features(TreatmentPoints(data.sample1().x, data.sample1().w));
  e.map = e.psi.transpose() * e.phi1 * RegularizedInverse(e.phi1, lambda1);
  return e;
}

struct InstrumentChoice {
  double c1 = 1.0;
  int c2 = 1;
  double lambda2 = 1.0;
  double loss = 0.0;
};

// (c1, c2, l2) minimizing the held-out outcome prediction loss. Candidates are
// visited simplest and most regularized first; ties keep the earlier one.
InstrumentChoice SelectInstrumentKernel(const TwoSampleDataset& train,
                                        const TwoSampleDataset& validation,
                                        std::vector<double> c1s, std::vector<int> c2s,
                                        std::vector<double> lambda2s);

// lambda1 minimizing the held-out embedding loss mean |psi(s') - B phi(z')|^2.
// Returns the loss through *loss (infinite when nothing is finite).
double SelectEmbeddingLambda(const TwoSampleDataset& train,
                             const TwoSampleDataset& validation,
                             const PolynomialKernel& kz, const PolynomialKernel& kxw,
                             std::vector<double> lambda1s, double* loss);

bool Improves(double loss, double best);

}  // namespace capce::internal

#endif  // CAPCE_SRC_KERNEL_INTERNAL_H_
