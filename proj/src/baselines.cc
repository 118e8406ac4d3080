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

#include "aic/baselines.h"

#include <cmath>

#include "aic/errors.h"

namespace aic {

PidGains PidGains::Uniform(int n, double p, double i, double d) {
  return {Vector::Constant(n, p), Vector::Constant(n, i), Vector::Constant(n, d)};
}

void PidGains::Validate() const {
  CheckSameSize(size(), static_cast<int>(i.size()), "pid I gains");
  CheckSameSize(size(), static_cast<int>(d.size()), "pid D gains");
  if (!p.allFinite() || !i.allFinite() || !d.allFinite()) {
    throw ContractViolation("pid gains must be finite");
  }
  if (form == PidForm::kVelocity && !d.isZero(0.0)) {
    throw ContractViolation("velocity-form pid has no D term");
  }
}

PidState PidState::Zero(int n) {
  return {Vector::Zero(n), Vector::Zero(n), Vector::Zero(n)};
}

PidResult PidStep(const PidState& pid, const Vector& error,
                  const Vector& error_rate, const PidGains& gains, double dt) {
  if (!(dt > 0.0)) throw ContractViolation("dt must be > 0");
  const int n = gains.size();
  CheckSameSize(n, static_cast<int>(error.size()), "pid error");
  CheckSameSize(n, static_cast<int>(error_rate.size()), "pid error rate");
  CheckSameSize(n, static_cast<int>(pid.integral.size()), "pid integral");
  CheckSameSize(n, static_cast<int>(pid.prev_error.size()), "pid prev_error");
  CheckSameSize(n, static_cast<int>(pid.action.size()), "pid action");
  PidResult r;
  r.state.integral = pid.integral + dt * error;
  r.state.prev_error = error;
  if (gains.form == PidForm::kVelocity) {
    r.action = pid.action + dt * (gains.p.cwiseProduct(error_rate) +
                                  gains.i.cwiseProduct(error));
    r.state.action = r.action;
    return r;
  }
  const Vector derivative = (error - pid.prev_error) / dt;
  r.action = gains.p.cwiseProduct(error) +
             gains.i.cwiseProduct(r.state.integral) +
             gains.d.cwiseProduct(derivative);
  r.state.action = r.action;
  return r;
}

PidResult PidStep(const PidState& pid, const Vector& error,
                  const PidGains& gains, double dt) {
  return PidStep(pid, error, Vector::Zero(error.size()), gains, dt);
}

PidGains MatchedPiGains(double kappa_a, const PrecisionMatrix& pi_o,
                        const PrecisionMatrix& pi_op) {
  if (!pi_o.is_diagonal() || !pi_op.is_diagonal()) {
    throw ContractViolation("matched PI gains need diagonal precisions");
  }
  CheckSameSize(pi_o.size(), pi_op.size(), "Pi_o'");
  const int n = pi_o.size();
  return {kappa_a * pi_op.diagonal(), kappa_a * pi_o.diagonal(),
          Vector::Zero(n), PidForm::kVelocity};
}

AicSettings PureFilterMode(const AicSettings& base, double beta) {
  AicSettings s = base;
  s.beta = TemporalScale::Uniform(base.precisions.size(), beta);
  s.options.enforce_beta_floor = false;
  s.gains.kappa_a = 0.0;
  s.control_enabled = false;
  s.switches.learn_beta = false;
  return s;
}

}  // namespace aic
