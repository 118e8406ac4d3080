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

#include "aic/plants.h"

#include <cmath>

#include "aic/errors.h"

namespace aic {

namespace {

void CheckStep(const PlantState& state, const Vector& action, int n, double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw ContractViolation("dt must be finite and > 0");
  }
  CheckSameSize(n, state.size(), "plant q");
  CheckSameSize(n, static_cast<int>(state.q_dot.size()), "plant q_dot");
  CheckSameSize(n, static_cast<int>(action.size()), "plant action");
}

PlantState ExplicitEuler(const PlantState& state, const Vector& acc,
                         double dt) {
  PlantState out;
  out.q = state.q + dt * state.q_dot;
  out.q_dot = state.q_dot + dt * acc;
  out.t = state.t + dt;
  return out;
}

}  // namespace

void MsdParams::Validate() const {
  if (!(mass > 0.0)) throw ContractViolation("msd mass must be > 0");
  if (!(k1 >= 0.0) || !(k2 >= 0.0)) {
    throw ContractViolation("msd k1 and k2 must be >= 0");
  }
}

void SurrogateArmParams::Validate() const {
  CheckSameSize(7, static_cast<int>(inertia.size()), "arm inertia");
  CheckSameSize(7, static_cast<int>(damping.size()), "arm damping");
  CheckSameSize(7, static_cast<int>(gravity_gain.size()), "arm gravity_gain");
  CheckSameSize(7, static_cast<int>(payload_coupling.size()),
                "arm payload_coupling");
  if (!(inertia.array() > 0.0).all()) {
    throw ContractViolation("arm inertia must be > 0");
  }
  if (!(payload_mass >= 0.0)) {
    throw ContractViolation("payload mass must be >= 0");
  }
}

void TwoLinkParams::Validate() const {
  if (!(m1 > 0.0 && m2 > 0.0 && l1 > 0.0 && l2 > 0.0)) {
    throw ContractViolation("two-link masses and lengths must be > 0");
  }
}

void NoiseSpec::Validate() const {
  if (!(sigma_pos >= 0.0) || !(sigma_vel >= 0.0)) {
    throw ContractViolation("noise sigmas must be >= 0");
  }
}

Vector MsdAcceleration(const PlantState& state, const Vector& action,
                       const MsdParams& params) {
  return (action - params.k1 * state.q - params.k2 * state.q_dot) /
         params.mass;
}

PlantState MsdStep(const PlantState& state, const Vector& action,
                   const MsdParams& params, double dt) {
  CheckStep(state, action, 1, dt);
  return ExplicitEuler(state, MsdAcceleration(state, action, params), dt);
}

Vector SurrogateArmAcceleration(const PlantState& state, const Vector& action,
                                const SurrogateArmParams& params) {
  const Vector load =
      params.gravity_gain + params.payload_mass * params.payload_coupling;
  const Vector sin_q = state.q.array().sin();
  return (action - params.damping.cwiseProduct(state.q_dot) -
          load.cwiseProduct(sin_q))
      .cwiseQuotient(params.inertia);
}

PlantState SurrogateArmStep(const PlantState& state, const Vector& action,
                            const SurrogateArmParams& params, double dt) {
  CheckStep(state, action, 7, dt);
  return ExplicitEuler(state, SurrogateArmAcceleration(state, action, params),
                       dt);
}

Matrix TwoLinkInertia(const Vector& q, const TwoLinkParams& p) {
  const double c2 = std::cos(q[1]);
  Matrix m(2, 2);
  m(0, 0) = (p.m1 + p.m2) * p.l1 * p.l1 + p.m2 * p.l2 * p.l2 +
            2.0 * p.m2 * p.l1 * p.l2 * c2;
  m(0, 1) = p.m2 * p.l2 * p.l2 + p.m2 * p.l1 * p.l2 * c2;
  m(1, 0) = m(0, 1);
  m(1, 1) = p.m2 * p.l2 * p.l2;
  return m;
}

Vector TwoLinkAcceleration(const PlantState& state, const Vector& action,
                           const TwoLinkParams& p) {
  const Vector& q = state.q;
  const Vector& qd = state.q_dot;
  const Matrix m = TwoLinkInertia(q, p);
  const double det = m.determinant();
  if (!(std::abs(det) > 1e-12 * m.squaredNorm())) {
    throw DomainError("two-link inertia matrix is singular");
  }
  const double h = p.m2 * p.l1 * p.l2 * std::sin(q[1]);
  Vector coriolis(2);
  coriolis << -h * (2.0 * qd[0] * qd[1] + qd[1] * qd[1]), h * qd[0] * qd[0];
  Vector gravity(2);
  gravity << (p.m1 + p.m2) * p.g * p.l1 * std::cos(q[0]) +
                 p.m2 * p.g * p.l2 * std::cos(q[0] + q[1]),
      p.m2 * p.g * p.l2 * std::cos(q[0] + q[1]);
  return m.inverse() * (action - coriolis - gravity);
}

PlantState TwoLinkStep(const PlantState& state, const Vector& action,
                       const TwoLinkParams& params, double dt) {
  CheckStep(state, action, 2, dt);
  const Vector acc = TwoLinkAcceleration(state, action, params);
  PlantState out;
  out.q_dot = state.q_dot + dt * acc;
  out.q = state.q + dt * out.q_dot;
  out.t = state.t + dt;
  return out;
}

double TwoLinkEnergy(const PlantState& state, const TwoLinkParams& p) {
  const Vector& q = state.q;
  const double kinetic =
      0.5 * state.q_dot.dot(TwoLinkInertia(q, p) * state.q_dot);
  // Zero at the hanging rest pose, where both sines are -1.
  const double potential =
      (p.m1 + p.m2) * p.g * p.l1 * (1.0 + std::sin(q[0])) +
      p.m2 * p.g * p.l2 * (1.0 + std::sin(q[0] + q[1]));
  return kinetic + potential;
}

GeneralizedObservation Observe(const PlantState& state, const NoiseSpec& noise,
                               std::mt19937_64& rng) {
  GeneralizedObservation obs{state.q, state.q_dot};
  if (noise.sigma_pos == 0.0 && noise.sigma_vel == 0.0) return obs;
  std::normal_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < state.size(); ++i) {
    obs.o[i] += noise.sigma_pos * unit(rng);
    obs.o_p[i] += noise.sigma_vel * unit(rng);
  }
  return obs;
}

}  // namespace aic
