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

// The active inference controller. Estimation, action and hyperparameter
// learning are each one gradient step on the same free energy per tick.

#ifndef AIC_CONTROLLER_H_
#define AIC_CONTROLLER_H_

#include <cstdint>
#include <optional>

#include "aic/gm_core.h"

namespace aic {

struct GainSet {
  double kappa_mu = 20.0;     // belief rate, all three orders
  double kappa_a = 600.0;     // action rate; 0 disables control
  double kappa_sigma = 1.0;   // precision rate; 0 disables learning
  double kappa_tau = 1.0;     // beta rate; 0 disables learning

  // kappa_mu > 0, the rest >= 0.
  void Validate() const;
};

struct LearningSwitches {
  bool learn_pi_o = false;
  bool learn_pi_op = false;
  bool learn_beta = false;

  bool any() const { return learn_pi_o || learn_pi_op || learn_beta; }
};

enum class BeliefIntegrator {
  // mu~ += dt (D mu~ - kappa_mu dF/dmu~)
  kExplicit,
  // Same flow, linearly implicit. Exact for quadratic F and stable for
  // arbitrarily stiff beta; used for the beta -> infinity limit.
  kImplicit,
};

struct ControllerOptions {
  double precision_floor = 0.01;
  double beta_floor = 0.5;
  // Diagnostic modes (the filter limit) run with beta below the floor.
  bool enforce_beta_floor = true;
  std::optional<double> action_limit;
  BeliefIntegrator integrator = BeliefIntegrator::kExplicit;

  void Validate() const;
};

struct ControllerState {
  GeneralizedBelief belief;
  Vector action;
  PrecisionSet precisions;
  TemporalScale beta;

  int size() const { return belief.size(); }
  // Dimensions, finiteness, symmetry and positive definiteness.
  void Validate() const;
};

// Everything needed to build and drive an AIC instance.
struct AicSettings {
  GainSet gains;
  ControllerOptions options;
  LearningSwitches switches;
  PrecisionSet precisions;
  TemporalScale beta;
  bool control_enabled = true;
};

ControllerState EstimationStep(
    const ControllerState& state, const GeneralizedObservation& obs,
    const Target& target, double dt, double kappa_mu,
    BeliefIntegrator integrator = BeliefIntegrator::kExplicit);

ControllerState ControlStep(const ControllerState& state,
                            const GeneralizedObservation& obs, double dt,
                            double kappa_a,
                            std::optional<double> action_limit = std::nullopt);

// Gradient step on the flagged observation precisions, then flooring.
// Diagonal matrices stay diagonal; dense ones are symmetrized and their
// spectrum floored.
ControllerState PrecisionUpdate(const ControllerState& state,
                                const ErrorSet& errors, double dt,
                                double kappa_sigma, double floor,
                                const LearningSwitches& switches);

// beta <- max(beta - dt kappa_tau dF/dbeta, floor). A floor of 0 or less
// leaves beta unfloored.
ControllerState BetaUpdate(const ControllerState& state, const ErrorSet& errors,
                           const GeneralizedBelief& belief,
                           const Target& target, double dt, double kappa_tau,
                           double beta_floor);

struct TickResult {
  ControllerState state;
  Vector action;       // action to apply this tick
  ErrorSet errors;     // pre-tick errors that drove every sub-step
  double free_energy;  // F at the pre-tick state
};

// compute_errors -> estimation -> control -> precision -> beta, all from the
// pre-tick errors. Throws DivergenceError carrying `tick` when any output is
// non-finite.
TickResult ControllerTick(const ControllerState& state,
                          const GeneralizedObservation& obs,
                          const Target& target, double dt,
                          const LearningSwitches& switches,
                          const GainSet& gains,
                          const ControllerOptions& options,
                          bool control_enabled = true,
                          std::int64_t tick = -1);

ControllerState InitialState(const AicSettings& settings,
                             const GeneralizedBelief& belief);

}  // namespace aic

#endif  // AIC_CONTROLLER_H_
