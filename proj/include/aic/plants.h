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

// Simulated plants and the additive Gaussian sensor.

#ifndef AIC_PLANTS_H_
#define AIC_PLANTS_H_

#include <cstdint>
#include <random>

#include "aic/gm_core.h"

namespace aic {

struct PlantState {
  Vector q;
  Vector q_dot;
  double t = 0.0;

  int size() const { return static_cast<int>(q.size()); }
};

// x'' = (a - k1 x - k2 x') / mass
struct MsdParams {
  double k1 = 1.0;
  double k2 = 0.1;
  double mass = 1.0;

  void Validate() const;
};

// Seven decoupled joints with a sin(q) gravity-like load and a payload term:
//   I q'' = a - d q' - (g + c m) sin(q)
struct SurrogateArmParams {
  Vector inertia = Vector::Ones(7);
  Vector damping = Vector::Constant(7, 0.5);
  Vector gravity_gain = (Vector(7) << 0, 3, 2, 2, 0.5, 0.5, 0.1).finished();
  double payload_mass = 0.0;
  Vector payload_coupling =
      (Vector(7) << 0, 1.5, 1.0, 1.0, 0.3, 0.2, 0.05).finished();

  void Validate() const;
};

// Planar two-link arm with point masses at the link tips. Angles are measured
// from the +x axis (q2 relative to link 1), gravity acts along -y, so the arm
// hangs at rest at q = (-pi/2, 0).
struct TwoLinkParams {
  double m1 = 1.0;
  double m2 = 1.0;
  double l1 = 1.0;
  double l2 = 1.0;
  double g = 9.81;

  void Validate() const;
};

struct NoiseSpec {
  double sigma_pos = 0.001;
  double sigma_vel = 0.01;
  std::uint64_t seed = 0;

  void Validate() const;
};

// Explicit Euler.
PlantState MsdStep(const PlantState& state, const Vector& action,
                   const MsdParams& params, double dt);
Vector MsdAcceleration(const PlantState& state, const Vector& action,
                       const MsdParams& params);

// Explicit Euler.
PlantState SurrogateArmStep(const PlantState& state, const Vector& action,
                            const SurrogateArmParams& params, double dt);
Vector SurrogateArmAcceleration(const PlantState& state, const Vector& action,
                                const SurrogateArmParams& params);

// Semi-implicit (symplectic) Euler: velocity first, then position with the
// new velocity. Keeps the passive energy bounded.
PlantState TwoLinkStep(const PlantState& state, const Vector& action,
                       const TwoLinkParams& params, double dt);
// q'' = M(q)^-1 (a - C(q, q') q' - G(q)); throws DomainError when M is
// numerically singular.
Vector TwoLinkAcceleration(const PlantState& state, const Vector& action,
                           const TwoLinkParams& params);
Matrix TwoLinkInertia(const Vector& q, const TwoLinkParams& params);
// Kinetic plus potential energy, the potential measured from the hanging rest
// pose so the energy is never negative.
double TwoLinkEnergy(const PlantState& state, const TwoLinkParams& params);

// o = q + N(0, sigma_pos^2), o' = q' + N(0, sigma_vel^2). Draws joint by
// joint, position before velocity; zero sigmas draw nothing.
GeneralizedObservation Observe(const PlantState& state, const NoiseSpec& noise,
                               std::mt19937_64& rng);

}  // namespace aic

#endif  // AIC_PLANTS_H_
