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

// Reference controllers for the two limit cases of the AIC: a discrete PID
// (beta -> infinity) and estimation-only filtering (beta -> 0).

#ifndef AIC_BASELINES_H_
#define AIC_BASELINES_H_

#include "aic/controller.h"
#include "aic/gm_core.h"

namespace aic {

// kPositional: a = P e + I sum(e dt) + D de/dt, de/dt a backward difference.
// kVelocity: a += dt (P e_rate + I e), the rate measured rather than
// differenced; it integrates the action like the AIC does. D must be zero.
enum class PidForm { kPositional, kVelocity };

// Per-joint gains.
struct PidGains {
  Vector p;
  Vector i;
  Vector d;
  PidForm form = PidForm::kPositional;

  static PidGains Uniform(int n, double p, double i, double d);
  int size() const { return static_cast<int>(p.size()); }
  void Validate() const;
};

struct PidState {
  Vector integral;
  Vector prev_error;
  Vector action;  // velocity form only

  static PidState Zero(int n);
};

struct PidResult {
  PidState state;
  Vector action;
};

// e = mu_d - o and error_rate = mu_d' - o'. The positional form ignores
// error_rate. No derivative filtering and no anti-windup.
PidResult PidStep(const PidState& pid, const Vector& error,
                  const Vector& error_rate, const PidGains& gains, double dt);
PidResult PidStep(const PidState& pid, const Vector& error,
                  const PidGains& gains, double dt);

// P = kappa_a diag(Pi_o'), I = kappa_a diag(Pi_o), D = 0, velocity form.
// Throws ContractViolation for non-diagonal precisions.
PidGains MatchedPiGains(double kappa_a, const PrecisionMatrix& pi_o,
                        const PrecisionMatrix& pi_op);

inline constexpr double kFilterBeta = 1e-6;

// Estimation-only AIC: beta = kFilterBeta (below the floor, which is
// disabled), control off, kappa_a = 0, no beta learning.
AicSettings PureFilterMode(const AicSettings& base, double beta = kFilterBeta);

}  // namespace aic

#endif  // AIC_BASELINES_H_
