// Copyright 2026 The aicontrol Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Generalized-motion types, prediction errors, and the Laplace-approximated
// free energy together with its analytic gradients.
//
// Beliefs carry three orders (mu, mu', mu''), observations two (o, o').
// The sensory maps are identities and the belief dynamics relax toward the
// target with rate beta = 1/tau:
//
//   eps_o   = o  - mu
//   eps_op  = o' - mu'
//   eps_mu  = mu'  - beta (mu_d - mu)
//   eps_mup = mu'' + beta mu'
//
//   F = 1/2 sum_i (eps_i^T Pi_i eps_i - ln|Pi_i|)      (constant dropped)

#ifndef AIC_GM_CORE_H_
#define AIC_GM_CORE_H_

#include <Eigen/Dense>

namespace aic {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

struct GeneralizedBelief {
  Vector mu;     // position
  Vector mu_p;   // velocity
  Vector mu_pp;  // acceleration

  static GeneralizedBelief Zero(int n);
  int size() const { return static_cast<int>(mu.size()); }
  // Throws ContractViolation on ragged or non-finite entries.
  void Validate() const;
};

struct GeneralizedObservation {
  Vector o;    // sensed position
  Vector o_p;  // sensed velocity

  int size() const { return static_cast<int>(o.size()); }
  void Validate() const;
};

struct Target {
  Vector mu_d;

  int size() const { return static_cast<int>(mu_d.size()); }
};

// Symmetric precision (inverse covariance) matrix. Kept as a diagonal when
// possible; dense storage is used only when constructed from a full matrix.
class PrecisionMatrix {
 public:
  PrecisionMatrix() = default;

  static PrecisionMatrix Scalar(int n, double value);
  static PrecisionMatrix Diagonal(Vector diagonal);
  // Throws ContractViolation unless symmetric within 1e-12 elementwise.
  static PrecisionMatrix Dense(Matrix matrix);

  int size() const { return static_cast<int>(diagonal_.size()); }
  bool is_diagonal() const { return is_diagonal_; }
  const Vector& diagonal() const { return diagonal_; }
  Matrix dense() const;

  Vector Apply(const Vector& v) const;
  double Quadratic(const Vector& v) const;

  // ln det, throws DomainError unless positive definite
  double LogDet() const;
  // Throws DomainError unless positive definite.
  Matrix Inverse() const;
  bool IsPositiveDefinite() const;

  bool operator==(const PrecisionMatrix& other) const;

 private:
  bool is_diagonal_ = true;
  Vector diagonal_;
  Matrix dense_;  // empty when is_diagonal_
};

struct PrecisionSet {
  PrecisionMatrix pi_o;
  PrecisionMatrix pi_op;
  PrecisionMatrix pi_mu;
  PrecisionMatrix pi_mup;

  static PrecisionSet Uniform(int n, double pi_o, double pi_op, double pi_mu,
                              double pi_mup);
  int size() const { return pi_o.size(); }
};

// beta = 1/tau, diagonal. Stored as its diagonal so off-diagonal entries are
// zero by construction. The floor is enforced by the update rule, not here,
// so diagnostic configurations may sit below it.
struct TemporalScale {
  Vector beta;

  static TemporalScale Uniform(int n, double value);
  int size() const { return static_cast<int>(beta.size()); }
  Matrix AsMatrix() const { return beta.asDiagonal(); }
};

struct ErrorSet {
  Vector eps_o;
  Vector eps_op;
  Vector eps_mu;
  Vector eps_mup;
};

struct BeliefGradient {
  Vector d_mu;
  Vector d_mu_p;
  Vector d_mu_pp;
};

// dF/dPi_i for each block, as full matrices.
struct PrecisionGradient {
  Matrix pi_o;
  Matrix pi_op;
  Matrix pi_mu;
  Matrix pi_mup;
};

ErrorSet ComputeErrors(const GeneralizedBelief& belief,
                       const GeneralizedObservation& obs, const Target& target,
                       const TemporalScale& beta);

// Throws DomainError when any precision is not positive definite.
double FreeEnergy(const ErrorSet& errors, const PrecisionSet& precisions);

// dF/d(mu, mu', mu'') at fixed o, mu_d, Pi and beta.
BeliefGradient GradBelief(const ErrorSet& errors,
                          const PrecisionSet& precisions,
                          const TemporalScale& beta);

// 1/2 (eps_i eps_i^T - Pi_i^-1) per block; throws DomainError on a singular
// or indefinite precision.
PrecisionGradient GradPrecision(const ErrorSet& errors,
                                const PrecisionSet& precisions);

// dF/dbeta_j = -[Pi_mu eps_mu]_j (mu_d - mu)_j + [Pi_mup eps_mup]_j mu'_j
Vector GradBeta(const ErrorSet& errors, const PrecisionSet& precisions,
                const GeneralizedBelief& belief, const Target& target);

// Curvature of F in the stacked belief (mu, mu', mu''). F is quadratic in the
// belief, so this is exact and independent of the belief itself.
Matrix BeliefHessian(const PrecisionSet& precisions, const TemporalScale& beta);

void CheckSameSize(int expected, int actual, const char* what);

}  // namespace aic

#endif  // AIC_GM_CORE_H_
