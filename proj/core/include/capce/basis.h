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

#ifndef CAPCE_BASIS_H_
#define CAPCE_BASIS_H_

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace capce {

inline constexpr int kMaxHermiteDegree = 30;

// Probabilists' Hermite polynomial He_p(t). Throws kDegreeTooHigh when
// p > kMaxHermiteDegree or p < 0.
double Hermite(int p, double t);

enum class BasisKind { kHermiteProduct, kMonomialProduct, kExplicitTerms };

// One product term. For Hermite families the exponents are Hermite indices;
// for monomial and explicit families they are powers.
struct BasisTerm {
  int x = 0;
  std::vector<int> w;
};

// A finite family of product functions phi_j(x, w) = a(x) * prod_k b_k(w_k)
// together with their x-antiderivatives. Antiderivatives stay inside the
// family: He_p integrates to He_{p+1} / (p + 1) and x^p to x^{p+1} / (p + 1).
class BasisSpec {
 public:
  // Every combination of x index 0..x_deg and covariate indices 0..w_deg,
  // x index outermost, then covariates in order.
  static BasisSpec HermiteProduct(int x_deg, int w_deg, int d = 1);
  static BasisSpec MonomialProduct(int x_deg, int w_deg, int d = 1);

  // Monomial terms written as products of X and W factors with optional
  // powers: "1", "W", "X", "XW", "X2", "X^2W", "XW2". With d > 1 covariates
  // are addressed as W_1, W_2, ... (e.g. "XW_2^2").
  static BasisSpec ExplicitTerms(const std::vector<std::string>& terms,
                                 int d = 1);

  BasisKind kind() const { return kind_; }
  int d() const { return d_; }
  Eigen::Index size() const { return static_cast<Eigen::Index>(terms_.size()); }
  const std::vector<BasisTerm>& terms() const { return terms_; }
  bool hermite() const { return kind_ == BasisKind::kHermiteProduct; }

  // Bounds used to reconstruct product families.
  int x_degree() const { return x_deg_; }
  int w_degree() const { return w_deg_; }

  // Human-readable term names, e.g. "XW2" or "h1(X)h2(W)".
  std::vector<std::string> Labels() const;
  // Labels in the explicit-term grammar (monomial families only).
  std::vector<std::string> TermStrings() const;

  bool operator==(const BasisSpec& other) const;

 private:
  BasisSpec(BasisKind kind, int d, std::vector<BasisTerm> terms, int x_deg,
            int w_deg);

  BasisKind kind_;
  int d_;
  std::vector<BasisTerm> terms_;
  int x_deg_;
  int w_deg_;
};

std::string BasisKindName(BasisKind kind);

// phi_j(x, w). Throws kDimensionMismatch when w has the wrong length.
Eigen::VectorXd EvalBasis(const BasisSpec& spec, double x,
                          const Eigen::VectorXd& w);

// The antiderivative in x of each term.
Eigen::VectorXd EvalAntiderivative(const BasisSpec& spec, double x,
                                   const Eigen::VectorXd& w);

// d phi_j / dx.
Eigen::VectorXd EvalBasisDx(const BasisSpec& spec, double x,
                            const Eigen::VectorXd& w);

// Mixed partial D^lambda of each antiderivative; lambda[0] is the x order and
// lambda[1..d] the covariate orders. lambda = 0 reproduces
// EvalAntiderivative. Throws kOrderTooHigh when |lambda| > max_order.
Eigen::VectorXd EvalBasisPartial(const BasisSpec& spec,
                                 const std::vector<int>& lambda, double x,
                                 const Eigen::VectorXd& w, int max_order);

// Row-per-record versions. `w` is n x d.
Eigen::MatrixXd BasisMatrix(const BasisSpec& spec, const Eigen::VectorXd& x,
                            const Eigen::MatrixXd& w);
Eigen::MatrixXd AntiderivativeMatrix(const BasisSpec& spec,
                                     const Eigen::VectorXd& x,
                                     const Eigen::MatrixXd& w);
Eigen::MatrixXd BasisDxMatrix(const BasisSpec& spec, const Eigen::VectorXd& x,
                              const Eigen::MatrixXd& w);

// Multi-indices lambda with |lambda| <= order over (x, w_1..w_d), zero first.
std::vector<std::vector<int>> MultiIndices(int d, int order);

// Power series q(z) = (1, z, ..., z^{P-1}).
class InstrumentBasis {
 public:
  explicit InstrumentBasis(int degree);

  int degree() const { return degree_; }
  Eigen::VectorXd Eval(double z) const;
  Eigen::MatrixXd Matrix(const Eigen::VectorXd& z) const;

 private:
  int degree_;
};

}  // namespace capce

#endif  // CAPCE_BASIS_H_
