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

#include "aic/controller.h"

#include <cmath>
#include <string>

#include "aic/errors.h"

namespace aic {

namespace {

void CheckDt(double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw ContractViolation("dt must be finite and > 0");
  }
}

void CheckFiniteOrDiverge(const Vector& v, const char* what) {
  if (!v.allFinite()) {
    throw DivergenceError(std::string(what) + " became non-finite");
  }
}

void CheckPrecision(const PrecisionMatrix& p, int n, const char* what) {
  CheckSameSize(n, p.size(), what);
  if (!p.diagonal().allFinite() ||
      (!p.is_diagonal() && !p.dense().allFinite())) {
    throw ContractViolation(std::string(what) + " has non-finite entries");
  }
  if (!p.IsPositiveDefinite()) {
    throw ContractViolation(std::string(what) + " is not positive definite");
  }
}

PrecisionMatrix StepPrecision(const PrecisionMatrix& pi, const Matrix& grad,
                              double scale, double floor) {
  if (pi.is_diagonal()) {
    Vector d = pi.diagonal() - scale * grad.diagonal();
    d = d.cwiseMax(floor);
    return PrecisionMatrix::Diagonal(std::move(d));
  }
  Matrix m = pi.dense() - scale * grad;
  m = (0.5 * (m + m.transpose())).eval();  // eval: the transpose aliases m
  Eigen::SelfAdjointEigenSolver<Matrix> eig(m);
  const Vector lambda = eig.eigenvalues().cwiseMax(floor);
  m = eig.eigenvectors() * lambda.asDiagonal() *
      eig.eigenvectors().transpose();
  m = (0.5 * (m + m.transpose())).eval();  // eval: the transpose aliases m
  return PrecisionMatrix::Dense(std::move(m));
}

}  // namespace

void GainSet::Validate() const {
  if (!(kappa_mu > 0.0) || !std::isfinite(kappa_mu)) {
    throw ContractViolation("kappa_mu must be > 0");
  }
  if (!(kappa_a >= 0.0) || !std::isfinite(kappa_a)) {
    throw ContractViolation("kappa_a must be >= 0");
  }
  if (!(kappa_sigma >= 0.0) || !std::isfinite(kappa_sigma)) {
    throw ContractViolation("kappa_sigma must be >= 0");
  }
  if (!(kappa_tau >= 0.0) || !std::isfinite(kappa_tau)) {
    throw ContractViolation("kappa_tau must be >= 0");
  }
}

void ControllerOptions::Validate() const {
  if (!(precision_floor > 0.0)) {
    throw ContractViolation("precision_floor must be > 0");
  }
  if (enforce_beta_floor && !(beta_floor > 0.0)) {
    throw ContractViolation("beta_floor must be > 0");
  }
  if (action_limit && !(*action_limit > 0.0)) {
    throw ContractViolation("action_limit must be > 0");
  }
}

void ControllerState::Validate() const {
  belief.Validate();
  const int n = size();
  CheckSameSize(n, static_cast<int>(action.size()), "action");
  if (!action.allFinite()) throw ContractViolation("action is non-finite");
  CheckPrecision(precisions.pi_o, n, "Pi_o");
  CheckPrecision(precisions.pi_op, n, "Pi_o'");
  CheckPrecision(precisions.pi_mu, n, "Pi_mu");
  CheckPrecision(precisions.pi_mup, n, "Pi_mu'");
  CheckSameSize(n, beta.size(), "beta");
  if (!beta.beta.allFinite()) throw ContractViolation("beta is non-finite");
}

ControllerState EstimationStep(const ControllerState& state,
                               const GeneralizedObservation& obs,
                               const Target& target, double dt,
                               double kappa_mu, BeliefIntegrator integrator) {
  CheckDt(dt);
  const GeneralizedBelief& b = state.belief;
  const int n = b.size();
  const ErrorSet e = ComputeErrors(b, obs, target, state.beta);
  const BeliefGradient g = GradBelief(e, state.precisions, state.beta);

  // Flow of the stacked belief: D mu~ - kappa dF/dmu~.
  Vector flow(3 * n);
  flow << b.mu_p - kappa_mu * g.d_mu, b.mu_pp - kappa_mu * g.d_mu_p,
      -kappa_mu * g.d_mu_pp;

  Vector delta;
  if (integrator == BeliefIntegrator::kExplicit) {
    delta = dt * flow;
  } else {
    // F is quadratic in the belief, so the flow is affine with Jacobian
    // D - kappa H and one linear solve gives the backward-Euler step.
    Matrix jac = -kappa_mu * BeliefHessian(state.precisions, state.beta);
    jac.block(0, n, n, n) += Matrix::Identity(n, n);
    jac.block(n, 2 * n, n, n) += Matrix::Identity(n, n);
    const Matrix lhs = Matrix::Identity(3 * n, 3 * n) - dt * jac;
    delta = lhs.partialPivLu().solve(dt * flow);
  }

  ControllerState out = state;
  out.belief.mu += delta.segment(0, n);
  out.belief.mu_p += delta.segment(n, n);
  out.belief.mu_pp += delta.segment(2 * n, n);
  CheckFiniteOrDiverge(out.belief.mu, "belief mu");
  CheckFiniteOrDiverge(out.belief.mu_p, "belief mu'");
  CheckFiniteOrDiverge(out.belief.mu_pp, "belief mu''");
  return out;
}

ControllerState ControlStep(const ControllerState& state,
                            const GeneralizedObservation& obs, double dt,
                            double kappa_a,
                            std::optional<double> action_limit) {
  CheckDt(dt);
  const int n = state.size();
  CheckSameSize(n, obs.size(), "observation o");
  CheckSameSize(n, static_cast<int>(obs.o_p.size()), "observation o'");
  CheckSameSize(n, static_cast<int>(state.action.size()), "action");
  // do~/da is the identity, so dF/da = Pi_o eps_o + Pi_o' eps_o'.
  const Vector a_dot =
      -kappa_a *
      (state.precisions.pi_o.Apply(obs.o - state.belief.mu) +
       state.precisions.pi_op.Apply(obs.o_p - state.belief.mu_p));
  ControllerState out = state;
  out.action = state.action + dt * a_dot;
  CheckFiniteOrDiverge(out.action, "action");
  if (action_limit) {
    out.action = out.action.cwiseMax(-*action_limit).cwiseMin(*action_limit);
  }
  return out;
}

ControllerState PrecisionUpdate(const ControllerState& state,
                                const ErrorSet& errors, double dt,
                                double kappa_sigma, double floor,
                                const LearningSwitches& switches) {
  CheckDt(dt);
  if (!(floor > 0.0)) throw ContractViolation("precision floor must be > 0");
  ControllerState out = state;
  if (!switches.learn_pi_o && !switches.learn_pi_op) return out;
  const PrecisionGradient g = GradPrecision(errors, state.precisions);
  const double scale = dt * kappa_sigma;
  if (switches.learn_pi_o) {
    out.precisions.pi_o = StepPrecision(state.precisions.pi_o, g.pi_o, scale, floor);
  }
  if (switches.learn_pi_op) {
    out.precisions.pi_op =
        StepPrecision(state.precisions.pi_op, g.pi_op, scale, floor);
  }
  CheckFiniteOrDiverge(out.precisions.pi_o.diagonal(), "Pi_o");
  CheckFiniteOrDiverge(out.precisions.pi_op.diagonal(), "Pi_o'");
  return out;
}

ControllerState BetaUpdate(const ControllerState& state, const ErrorSet& errors,
                           const GeneralizedBelief& belief,
                           const Target& target, double dt, double kappa_tau,
                           double beta_floor) {
  CheckDt(dt);
  const Vector g = GradBeta(errors, state.precisions, belief, target);
  ControllerState out = state;
  out.beta.beta = state.beta.beta - dt * kappa_tau * g;
  if (beta_floor > 0.0) out.beta.beta = out.beta.beta.cwiseMax(beta_floor);
  CheckFiniteOrDiverge(out.beta.beta, "beta");
  return out;
}

TickResult ControllerTick(const ControllerState& state,
                          const GeneralizedObservation& obs,
                          const Target& target, double dt,
                          const LearningSwitches& switches,
                          const GainSet& gains,
                          const ControllerOptions& options,
                          bool control_enabled, std::int64_t tick) {
  try {
    TickResult r;
    r.errors = ComputeErrors(state.belief, obs, target, state.beta);
    r.free_energy = FreeEnergy(r.errors, state.precisions);

    ControllerState next = EstimationStep(state, obs, target, dt,
                                          gains.kappa_mu, options.integrator);
    if (control_enabled) {
      next.action = ControlStep(state, obs, dt, gains.kappa_a,
                                options.action_limit)
                        .action;
    }
    if ((switches.learn_pi_o || switches.learn_pi_op) &&
        gains.kappa_sigma > 0.0) {
      next.precisions = PrecisionUpdate(state, r.errors, dt, gains.kappa_sigma,
                                        options.precision_floor, switches)
                            .precisions;
    }
    if (switches.learn_beta && gains.kappa_tau > 0.0) {
      const double floor = options.enforce_beta_floor ? options.beta_floor : 0.0;
      next.beta = BetaUpdate(state, r.errors, state.belief, target, dt,
                             gains.kappa_tau, floor)
                      .beta;
    }
    if (!std::isfinite(r.free_energy)) {
      throw DivergenceError("free energy became non-finite");
    }
    r.action = next.action;
    r.state = std::move(next);
    return r;
  } catch (const DivergenceError& e) {
    throw DivergenceError(e.what(), tick);
  }
}

ControllerState InitialState(const AicSettings& settings,
                             const GeneralizedBelief& belief) {
  settings.gains.Validate();
  settings.options.Validate();
  ControllerState s;
  s.belief = belief;
  s.action = Vector::Zero(belief.size());
  s.precisions = settings.precisions;
  s.beta = settings.beta;
  s.Validate();
  return s;
}

}  // namespace aic
