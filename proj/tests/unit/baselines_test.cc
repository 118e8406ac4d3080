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

#include <gtest/gtest.h>

#include "aic/errors.h"

namespace aic {
namespace {

Vector S(double x) { return Vector::Constant(1, x); }

TEST(PidStepTest, ZeroErrorZeroAction) {
  PidState s = PidState::Zero(2);
  const PidGains g = PidGains::Uniform(2, 3, 2, 1);
  for (int k = 0; k < 10; ++k) {
    PidResult r = PidStep(s, Vector::Zero(2), g, 0.01);
    EXPECT_TRUE(r.action.isZero(0));
    s = r.state;
  }
}

TEST(PidStepTest, PureProportional) {
  const PidResult r =
      PidStep(PidState::Zero(1), S(0.5), PidGains::Uniform(1, 1, 0, 0), 0.01);
  EXPECT_DOUBLE_EQ(r.action[0], 0.5);
}

TEST(PidStepTest, StepResponseMatchesHandUnrolling) {
  const double p = 2.0, i = 3.0, d = 0.5, dt = 0.1;
  const double e[] = {1.0, 1.0, 0.5, 0.25, -0.5};
  PidState s = PidState::Zero(1);
  double integral = 0.0, prev = 0.0;
  for (double ek : e) {
    const PidResult r = PidStep(s, S(ek), PidGains::Uniform(1, p, i, d), dt);
    integral += ek * dt;
    const double expected = p * ek + i * integral + d * (ek - prev) / dt;
    prev = ek;
    EXPECT_NEAR(r.action[0], expected, 1e-13);
    s = r.state;
  }
}

TEST(PidStepTest, VelocityFormIntegratesTheActionRate) {
  PidGains g = PidGains::Uniform(1, 2.0, 3.0, 0.0);
  g.form = PidForm::kVelocity;
  const double dt = 0.1;
  const double e[] = {1.0, 0.8, 0.5}, rate[] = {0.0, -2.0, -3.0};
  PidState s = PidState::Zero(1);
  double a = 0.0;
  for (int k = 0; k < 3; ++k) {
    const PidResult r = PidStep(s, S(e[k]), S(rate[k]), g, dt);
    a += dt * (2.0 * rate[k] + 3.0 * e[k]);
    EXPECT_NEAR(r.action[0], a, 1e-14);
    s = r.state;
  }
  g.d = S(1.0);
  EXPECT_THROW(g.Validate(), ContractViolation);
}

TEST(MatchedPiGainsTest, TunedValues) {
  const PidGains g = MatchedPiGains(1.0, PrecisionMatrix::Scalar(1, 1.5),
                                    PrecisionMatrix::Scalar(1, 0.5));
  EXPECT_DOUBLE_EQ(g.p[0], 0.5);
  EXPECT_DOUBLE_EQ(g.i[0], 1.5);
  EXPECT_EQ(g.d[0], 0.0);
  EXPECT_EQ(g.form, PidForm::kVelocity);
}

TEST(MatchedPiGainsTest, ScalesLinearly) {
  const auto po = PrecisionMatrix::Diagonal((Vector(2) << 1.5, 0.2).finished());
  const auto pop = PrecisionMatrix::Diagonal((Vector(2) << 0.5, 4.0).finished());
  const PidGains zero = MatchedPiGains(0.0, po, pop);
  EXPECT_TRUE(zero.p.isZero(0) && zero.i.isZero(0));
  const PidGains one = MatchedPiGains(1.0, po, pop);
  const PidGains two = MatchedPiGains(2.0, po, pop);
  EXPECT_EQ(two.p, 2.0 * one.p);
  EXPECT_EQ(two.i, 2.0 * one.i);
}

TEST(MatchedPiGainsTest, DenseRejected) {
  Matrix m(2, 2);
  m << 1, 0.2, 0.2, 1;
  EXPECT_THROW(MatchedPiGains(1.0, PrecisionMatrix::Dense(m),
                              PrecisionMatrix::Scalar(2, 1.0)),
               ContractViolation);
}

AicSettings Base() {
  AicSettings s;
  s.precisions = PrecisionSet::Uniform(1, 1, 1, 1, 1);
  s.beta = TemporalScale::Uniform(1, 4.0);
  s.switches.learn_beta = true;
  return s;
}

TEST(PureFilterModeTest, DisablesControlAndTargetPull) {
  const AicSettings f = PureFilterMode(Base());
  EXPECT_EQ(f.beta.beta[0], kFilterBeta);
  EXPECT_FALSE(f.options.enforce_beta_floor);
  EXPECT_FALSE(f.control_enabled);
  EXPECT_EQ(f.gains.kappa_a, 0.0);
  EXPECT_FALSE(f.switches.learn_beta);
}

TEST(PureFilterModeTest, ZeroBetaRemovesTargetFromEveryGradient) {
  const AicSettings f = PureFilterMode(Base(), 0.0);
  const GeneralizedBelief b{S(0.2), S(-0.3), S(0.1)};
  const GeneralizedObservation o{S(0.5), S(0.4)};
  const ErrorSet near = ComputeErrors(b, o, {S(-7.0)}, f.beta);
  const ErrorSet far = ComputeErrors(b, o, {S(9.0)}, f.beta);
  EXPECT_EQ(near.eps_mu[0], b.mu_p[0]);
  EXPECT_EQ(far.eps_mu[0], b.mu_p[0]);
  const BeliefGradient ga = GradBelief(near, f.precisions, f.beta);
  const BeliefGradient gb = GradBelief(far, f.precisions, f.beta);
  EXPECT_EQ(ga.d_mu, gb.d_mu);
  EXPECT_EQ(ga.d_mu_p, gb.d_mu_p);
  EXPECT_EQ(ga.d_mu_pp, gb.d_mu_pp);
}

}  // namespace
}  // namespace aic
