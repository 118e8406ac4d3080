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

#include "aic/gm_core.h"

#include <cmath>
#include <string>
#include <utility>

#include "aic/errors.h"

namespace aic {

namespace {

constexpr double kSymmetryTolerance = 1e-12;

void CheckFinite(const Vector& v, const char* what) {
  if (!v.allFinite()) {
    throw ContractViolation(std::string(what) + " has non-finite entries");
  }
}

}  // namespace

void CheckSameSize(int expected, int actual, const char* what) {
  if (expected != actual) {
    throw ContractViolation(std::string(what) + ": expected dimension " +
                            std::to_string(expected) + ", got " +
                            std::to_string(actual));
  }
}

GeneralizedBelief GeneralizedBelief::Zero(int n) {
  return {Vector::Zero(n), Vector::Zero(n), Vector::Zero(n)};
}

void GeneralizedBelief::Validate() const {
  if (mu.size() < 1) throw ContractViolation("belief must have n >= 1");
  CheckSameSize(size(), static_cast<int>(mu_p.size()), "belief mu'");
  CheckSameSize(size(), static_cast<int>(mu_pp.size()), "belief mu''");
  CheckFinite(mu, "belief mu");
  CheckFinite(mu_p, "belief mu'");
  CheckFinite(mu_pp, "belief mu''");
}

void GeneralizedObservation::Validate() const {
  CheckSameSize(size(), static_cast<int>(o_p.size()), "observation o'");
  CheckFinite(o, "observation o");
  CheckFinite(o_p, "observation o'");
}

PrecisionMatrix PrecisionMatrix::Scalar(int n, double value) {
  return Diagonal(Vector::Constant(n, value));
}

PrecisionMatrix PrecisionMatrix::Diagonal(Vector diagonal) {
  PrecisionMatrix p;
  p.is_diagonal_ = true;
  p.diagonal_ = std::move(diagonal);
  return p;
}

PrecisionMatrix PrecisionMatrix::Dense(Matrix matrix) {
  if (matrix.rows() != matrix.cols()) {
    throw ContractViolation("precision matrix must be square");
  }
  if (((matrix - matrix.transpose()).array().abs() > kSymmetryTolerance)
          .any()) {
    throw ContractViolation("precision matrix must be symmetric");
  }
  PrecisionMatrix p;
  p.diagonal_ = matrix.diagonal();
  Matrix off = matrix;
  off.diagonal().setZero();
  if ((off.array() == 0.0).all()) {
    p.is_diagonal_ = true;
    return p;
  }
  p.is_diagonal_ = false;
  p.dense_ = std::move(matrix);
  return p;
}

Matrix PrecisionMatrix::dense() const {
  if (is_diagonal_) return diagonal_.asDiagonal();
  return dense_;
}

Vector PrecisionMatrix::Apply(const Vector& v) const {
  CheckSameSize(size(), static_cast<int>(v.size()), "precision apply");
  if (is_diagonal_) return diagonal_.cwiseProduct(v);
  return dense_ * v;
}

double PrecisionMatrix::Quadratic(const Vector& v) const {
  return v.dot(Apply(v));
}

bool PrecisionMatrix::IsPositiveDefinite() const {
  if (is_diagonal_) return (diagonal_.array() > 0.0).all();
  Eigen::LLT<Matrix> llt(dense_);
  return llt.info() == Eigen::Success;
}

double PrecisionMatrix::LogDet() const {
  if (is_diagonal_) {
    if (!((diagonal_.array() > 0.0).all())) {
      throw DomainError("precision matrix is not positive definite");
    }
    return diagonal_.array().log().sum();
  }
  Eigen::LLT<Matrix> llt(dense_);
  if (llt.info() != Eigen::Success) {
    throw DomainError("precision matrix is not positive definite");
  }
  return 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
}

Matrix PrecisionMatrix::Inverse() const {
  if (is_diagonal_) {
    if (!((diagonal_.array() > 0.0).all())) {
      throw DomainError("precision matrix is singular or indefinite");
    }
    return diagonal_.cwiseInverse().asDiagonal();
  }
  Eigen::LLT<Matrix> llt(dense_);
  if (llt.info() != Eigen::Success) {
    throw DomainError("precision matrix is singular or indefinite");
  }
  return llt.solve(Matrix::Identity(size(), size()));
}

bool PrecisionMatrix::operator==(const PrecisionMatrix& other) const {
  return dense() == other.dense();
}

PrecisionSet PrecisionSet::Uniform(int n, double pi_o, double pi_op,
                                   double pi_mu, double pi_mup) {
  return {PrecisionMatrix::Scalar(n, pi_o), PrecisionMatrix::Scalar(n, pi_op),
          PrecisionMatrix::Scalar(n, pi_mu),
          PrecisionMatrix::Scalar(n, pi_mup)};
}

TemporalScale TemporalScale::Uniform(int n, double value) {
  return {Vector::Constant(n, value)};
}

ErrorSet ComputeErrors(const GeneralizedBelief& belief,
                       const GeneralizedObservation& obs, const Target& target,
                       const TemporalScale& beta) {
  const int n = belief.size();
  CheckSameSize(n, static_cast<int>(belief.mu_p.size()), "belief mu'");
  CheckSameSize(n, static_cast<int>(belief.mu_pp.size()), "belief mu''");
  CheckSameSize(n, obs.size(), "observation o");
  CheckSameSize(n, static_cast<int>(obs.o_p.size()), "observation o'");
  CheckSameSize(n, target.size(), "target");
  CheckSameSize(n, beta.size(), "beta");

  ErrorSet e;
  e.eps_o = obs.o - belief.mu;
  e.eps_op = obs.o_p - belief.mu_p;
  e.eps_mu = belief.mu_p - beta.beta.cwiseProduct(target.mu_d - belief.mu);
  e.eps_mup = belief.mu_pp + beta.beta.cwiseProduct(belief.mu_p);
  return e;
}

namespace {

void CheckErrorSizes(const ErrorSet& e, int n) {
  CheckSameSize(n, static_cast<int>(e.eps_o.size()), "eps_o");
  CheckSameSize(n, static_cast<int>(e.eps_op.size()), "eps_o'");
  CheckSameSize(n, static_cast<int>(e.eps_mu.size()), "eps_mu");
  CheckSameSize(n, static_cast<int>(e.eps_mup.size()), "eps_mu'");
}

void CheckPrecisionSizes(const PrecisionSet& p, int n) {
  CheckSameSize(n, p.pi_o.size(), "Pi_o");
  CheckSameSize(n, p.pi_op.size(), "Pi_o'");
  CheckSameSize(n, p.pi_mu.size(), "Pi_mu");
  CheckSameSize(n, p.pi_mup.size(), "Pi_mu'");
}

}  // namespace

double FreeEnergy(const ErrorSet& errors, const PrecisionSet& precisions) {
  const int n = precisions.size();
  CheckPrecisionSizes(precisions, n);
  CheckErrorSizes(errors, n);
  // ln|Sigma| = -ln|Pi|
  double f = precisions.pi_o.Quadratic(errors.eps_o) - precisions.pi_o.LogDet();
  f += precisions.pi_op.Quadratic(errors.eps_op) - precisions.pi_op.LogDet();
  f += precisions.pi_mu.Quadratic(errors.eps_mu) - precisions.pi_mu.LogDet();
  f += precisions.pi_mup.Quadratic(errors.eps_mup) -
       precisions.pi_mup.LogDet();
  return 0.5 * f;
}

BeliefGradient GradBelief(const ErrorSet& errors,
                          const PrecisionSet& precisions,
                          const TemporalScale& beta) {
  const int n = precisions.size();
  CheckPrecisionSizes(precisions, n);
  CheckErrorSizes(errors, n);
  CheckSameSize(n, beta.size(), "beta");

  const Vector w_o = precisions.pi_o.Apply(errors.eps_o);
  const Vector w_op = precisions.pi_op.Apply(errors.eps_op);
  const Vector w_mu = precisions.pi_mu.Apply(errors.eps_mu);
  const Vector w_mup = precisions.pi_mup.Apply(errors.eps_mup);

  BeliefGradient g;
  g.d_mu = -w_o + beta.beta.cwiseProduct(w_mu);
  g.d_mu_p = -w_op + w_mu + beta.beta.cwiseProduct(w_mup);
  g.d_mu_pp = w_mup;
  return g;
}

PrecisionGradient GradPrecision(const ErrorSet& errors,
                                const PrecisionSet& precisions) {
  const int n = precisions.size();
  CheckPrecisionSizes(precisions, n);
  CheckErrorSizes(errors, n);
  auto block = [](const Vector& eps, const PrecisionMatrix& pi) -> Matrix {
    return 0.5 * (eps * eps.transpose() - pi.Inverse());
  };
  return {block(errors.eps_o, precisions.pi_o),
          block(errors.eps_op, precisions.pi_op),
          block(errors.eps_mu, precisions.pi_mu),
          block(errors.eps_mup, precisions.pi_mup)};
}

Vector GradBeta(const ErrorSet& errors, const PrecisionSet& precisions,
                const GeneralizedBelief& belief, const Target& target) {
  const int n = precisions.size();
  CheckPrecisionSizes(precisions, n);
  CheckErrorSizes(errors, n);
  CheckSameSize(n, belief.size(), "belief");
  CheckSameSize(n, target.size(), "target");
  const Vector w_mu = precisions.pi_mu.Apply(errors.eps_mu);
  const Vector w_mup = precisions.pi_mup.Apply(errors.eps_mup);
  return -w_mu.cwiseProduct(target.mu_d - belief.mu) +
         w_mup.cwiseProduct(belief.mu_p);
}

Matrix BeliefHessian(const PrecisionSet& precisions,
                     const TemporalScale& beta) {
  const int n = precisions.size();
  CheckPrecisionSizes(precisions, n);
  CheckSameSize(n, beta.size(), "beta");
  const Matrix b = beta.AsMatrix();
  const Matrix p_o = precisions.pi_o.dense();
  const Matrix p_op = precisions.pi_op.dense();
  const Matrix p_mu = precisions.pi_mu.dense();
  const Matrix p_mup = precisions.pi_mup.dense();

  Matrix h = Matrix::Zero(3 * n, 3 * n);
  h.block(0, 0, n, n) = p_o + b * p_mu * b;
  h.block(0, n, n, n) = b * p_mu;
  h.block(n, 0, n, n) = p_mu * b;
  h.block(n, n, n, n) = p_op + p_mu + b * p_mup * b;
  h.block(n, 2 * n, n, n) = b * p_mup;
  h.block(2 * n, n, n, n) = p_mup * b;
  h.block(2 * n, 2 * n, n, n) = p_mup;
  return h;
}

}  // namespace aic
