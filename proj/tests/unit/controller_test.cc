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
#include <random>

#include <gtest/gtest.h>

#include "aic/episode.h"
#include "aic/errors.h"
#include "test_support.h"

namespace aic {
namespace {

Vector S(double x) { return Vector::Constant(1, x); }

ControllerState ScalarState(double mu, double mu_p, double mu_pp, double beta,
                            double pi = 1.0) {
  ControllerState s;
  s.belief = {S(mu), S(mu_p), S(mu_pp)};
  s.action = S(0);
  s.precisions = PrecisionSet::Uniform(1, pi, pi, pi, pi);
  s.beta = TemporalScale::Uniform(1, beta);
  return s;
}

ControllerState RandomState(std::mt19937_64& rng, int n) {
  ControllerState s;
  s.belief = testing::RandomBelief(rng, n);
  s.action = testing::Uniform(rng, n, -1, 1);
  s.precisions = testing::RandomPrecisions(rng, n);
  s.beta = {testing::Uniform(rng, n, 0.5, 2)};
  return s;
}

TEST(EstimationStepTest, FixedPointWithZeroErrors) {
  const ControllerState s = ScalarState(1, 0, 0, 2);
  const ControllerState out =
      EstimationStep(s, {S(1), S(0)}, {S(1)}, 0.01, 20.0);
  EXPECT_EQ(out.belief.mu[0], 1.0);
  EXPECT_EQ(out.belief.mu_p[0], 0.0);
  EXPECT_EQ(out.belief.mu_pp[0], 0.0);
}

TEST(EstimationStepTest, PureShiftWithZeroGradient) {
  // mu' = 1 is matched by o' and by beta (mu_d - mu); eps_mu' = mu'' + beta mu'
  // is cancelled by mu'' = -beta, leaving only the D shift.
  ControllerState s = ScalarState(0, 1, -1, 1);
  const GeneralizedObservation obs{S(0), S(1)};
  const Target target{S(1)};
  const ErrorSet e = ComputeErrors(s.belief, obs, target, s.beta);
  ASSERT_EQ(e.eps_o[0], 0.0);
  ASSERT_EQ(e.eps_op[0], 0.0);
  ASSERT_EQ(e.eps_mu[0], 0.0);
  ASSERT_EQ(e.eps_mup[0], 0.0);
  const double dt = 0.001;
  const ControllerState out = EstimationStep(s, obs, target, dt, 20.0);
  EXPECT_DOUBLE_EQ(out.belief.mu[0], 0.0 + dt * 1.0);
  EXPECT_DOUBLE_EQ(out.belief.mu_p[0], 1.0 + dt * -1.0);
  EXPECT_DOUBLE_EQ(out.belief.mu_pp[0], -1.0);
}

TEST(EstimationStepTest, ExplicitStepMatchesHandFormula) {
  std::mt19937_64 rng(31);
  const ControllerState s = RandomState(rng, 3);
  const GeneralizedObservation obs = testing::RandomObservation(rng, 3);
  const Target target{testing::Uniform(rng, 3, -1, 1)};
  const double dt = 0.002, k = 7.0;
  const ControllerState out = EstimationStep(s, obs, target, dt, k);
  for (int j = 0; j < 3; ++j) {
    const double mu = s.belief.mu[j], mp = s.belief.mu_p[j], mpp = s.belief.mu_pp[j];
    const double b = s.beta.beta[j];
    const double po = s.precisions.pi_o.diagonal()[j];
    const double pop = s.precisions.pi_op.diagonal()[j];
    const double pm = s.precisions.pi_mu.diagonal()[j];
    const double pmp = s.precisions.pi_mup.diagonal()[j];
    const double eo = obs.o[j] - mu, eop = obs.o_p[j] - mp;
    const double em = mp - b * (target.mu_d[j] - mu), emp = mpp + b * mp;
    EXPECT_NEAR(out.belief.mu[j], mu + dt * (mp - k * (-po * eo + b * pm * em)), 1e-14);
    EXPECT_NEAR(out.belief.mu_p[j],
                mp + dt * (mpp - k * (-pop * eop + pm * em + b * pmp * emp)), 1e-14);
    EXPECT_NEAR(out.belief.mu_pp[j], mpp + dt * (-k * pmp * emp), 1e-14);
  }
  EXPECT_EQ(out.action, s.action);
  EXPECT_EQ(out.precisions.pi_o, s.precisions.pi_o);
  EXPECT_EQ(out.beta.beta, s.beta.beta);
}

TEST(EstimationStepTest, ImplicitStepSatisfiesBackwardEuler) {
  std::mt19937_64 rng(32);
  ControllerState s = RandomState(rng, 2);
  s.precisions.pi_mu = testing::RandomDensePrecision(rng, 2);
  const GeneralizedObservation obs = testing::RandomObservation(rng, 2);
  const Target target{testing::Uniform(rng, 2, -1, 1)};
  const double dt = 0.01, k = 20.0;
  const ControllerState out =
      EstimationStep(s, obs, target, dt, k, BeliefIntegrator::kImplicit);
  // x1 = x0 + dt f(x1), with f evaluated at the new belief.
  const BeliefGradient g = GradBelief(
      ComputeErrors(out.belief, obs, target, s.beta), s.precisions, s.beta);
  const GeneralizedBelief& b = out.belief;
  EXPECT_TRUE((b.mu - s.belief.mu).isApprox(dt * (b.mu_p - k * g.d_mu), 1e-10));
  EXPECT_TRUE(
      (b.mu_p - s.belief.mu_p).isApprox(dt * (b.mu_pp - k * g.d_mu_p), 1e-10));
  EXPECT_TRUE((b.mu_pp - s.belief.mu_pp).isApprox(dt * (-k * g.d_mu_pp), 1e-10));
}

TEST(EstimationStepTest, ImplicitStepStableForStiffBeta) {
  ControllerState s = ScalarState(0.3, 0.5, 0, 1e6);
  for (int i = 0; i < 1000; ++i) {
    s = EstimationStep(s, {S(0), S(0)}, {S(-0.5)}, 0.001, 20.0,
                       BeliefIntegrator::kImplicit);
  }
  EXPECT_NEAR(s.belief.mu[0], -0.5, 1e-5);
  EXPECT_NEAR(s.belief.mu_p[0], 0.0, 1e-5);
  ControllerState e = ScalarState(0.3, 0.5, 0, 1e6);
  EXPECT_THROW(
      {
        for (int i = 0; i < 100; ++i)
          e = EstimationStep(e, {S(0), S(0)}, {S(-0.5)}, 0.001, 20.0);
      },
      DivergenceError);
}

TEST(EstimationStepTest, RejectsBadDt) {
  const ControllerState s = ScalarState(0, 0, 0, 1);
  EXPECT_THROW(EstimationStep(s, {S(0), S(0)}, {S(0)}, 0.0, 1.0), ContractViolation);
}

TEST(ControlStepTest, ZeroSensoryErrorKeepsAction) {
  ControllerState s = ScalarState(0.2, -0.1, 0, 1);
  s.action = S(0.7);
  EXPECT_EQ(ControlStep(s, {S(0.2), S(-0.1)}, 0.01, 600.0).action[0], 0.7);
}

TEST(ControlStepTest, TunedPrecisionSubstitution) {
  ControllerState s = ScalarState(0, 0, 0, 1);
  s.precisions.pi_o = PrecisionMatrix::Scalar(1, 1.5);
  s.precisions.pi_op = PrecisionMatrix::Scalar(1, 0.5);
  const double dt = 0.01;
  const ControllerState out = ControlStep(s, {S(0.1), S(0)}, dt, 1.0);
  EXPECT_NEAR(out.action[0] / dt, -0.15, 1e-12);
}

TEST(ControlStepTest, SaturatesAtLimit) {
  ControllerState s = ScalarState(0, 0, 0, 1);
  s.action = S(2.0);
  // o < mu gives a positive a_dot.
  const ControllerState out = ControlStep(s, {S(-1), S(0)}, 0.01, 10.0, 2.0);
  EXPECT_EQ(out.action[0], 2.0);
  s.action = S(-2.0);
  EXPECT_EQ(ControlStep(s, {S(1), S(0)}, 0.01, 10.0, 2.0).action[0], -2.0);
}

TEST(PrecisionUpdateTest, FixedPointLeavesPrecisionUnchanged) {
  const ControllerState s = ScalarState(0, 0, 0, 1, 4.0);
  ErrorSet e{S(0.5), S(0.5), S(0), S(0)};  // eps^2 = 0.25 = 1/4
  const ControllerState out =
      PrecisionUpdate(s, e, 0.1, 1.0, 0.01, {true, true, false});
  EXPECT_DOUBLE_EQ(out.precisions.pi_o.diagonal()[0], 4.0);
  EXPECT_DOUBLE_EQ(out.precisions.pi_op.diagonal()[0], 4.0);
}

TEST(PrecisionUpdateTest, DirectSubstitution) {
  const ControllerState s = ScalarState(0, 0, 0, 1, 1.0);
  const ErrorSet e{S(0), S(0), S(0), S(0)};
  const ControllerState out =
      PrecisionUpdate(s, e, 0.1, 1.0, 0.01, {true, false, false});
  EXPECT_DOUBLE_EQ(out.precisions.pi_o.diagonal()[0], 1.05);
  EXPECT_EQ(out.precisions.pi_op.diagonal()[0], 1.0);
}

TEST(PrecisionUpdateTest, FloorHolds) {
  const ControllerState s = ScalarState(0, 0, 0, 1, 0.02);
  const ErrorSet e{S(10), S(10), S(0), S(0)};
  const ControllerState out =
      PrecisionUpdate(s, e, 0.1, 1.0, 0.01, {true, true, false});
  EXPECT_EQ(out.precisions.pi_o.diagonal()[0], 0.01);
  EXPECT_EQ(out.precisions.pi_op.diagonal()[0], 0.01);
}

TEST(PrecisionUpdateTest, DenseStaysSymmetricAndFloored) {
  std::mt19937_64 rng(33);
  ControllerState s = RandomState(rng, 3);
  s.precisions.pi_o = testing::RandomDensePrecision(rng, 3);
  std::normal_distribution<double> noise(0.0, 3.0);
  for (int i = 0; i < 500; ++i) {
    ErrorSet e{Vector(3), Vector::Zero(3), Vector::Zero(3), Vector::Zero(3)};
    for (int j = 0; j < 3; ++j) e.eps_o[j] = noise(rng);
    s = PrecisionUpdate(s, e, 0.01, 5.0, 0.05, {true, false, false});
    const Matrix m = s.precisions.pi_o.dense();
    ASSERT_TRUE(m.isApprox(m.transpose(), 0));
    Eigen::SelfAdjointEigenSolver<Matrix> eig(m);
    ASSERT_GE(eig.eigenvalues().minCoeff(), 0.05 - 1e-12);
  }
}

// Synthetic i.i.d. sensory errors with standard deviation 0.5: the learned
// covariance should average to the sample covariance of the stream. Near
// Pi = 4 the relaxation time is 2 Pi^2 / kappa_sigma, so kappa_sigma = 20
// keeps the start-up transient to a small share of the 100 s stream.
TEST(PrecisionUpdateTest, ConvergesToErrorCovariance) {
  std::mt19937_64 rng(34);
  std::normal_distribution<double> noise(0.0, 0.5);
  ControllerState s = ScalarState(0, 0, 0, 1, 1.0);
  const int ticks = 100000;
  double sum_cov = 0.0, sum_sq = 0.0;
  for (int k = 0; k < ticks; ++k) {
    const double x = noise(rng);
    sum_sq += x * x;
    s = PrecisionUpdate(s, {S(x), S(0), S(0), S(0)}, 0.001, 20.0, 0.01,
                        {true, false, false});
    sum_cov += 1.0 / s.precisions.pi_o.diagonal()[0];
  }
  const double sample_cov = sum_sq / ticks;
  EXPECT_NEAR(sample_cov, 0.25, 0.01);
  EXPECT_NEAR(sum_cov / ticks, 0.25, 0.025);
}

TEST(BetaUpdateTest, UnchangedAtTarget) {
  const ControllerState s = ScalarState(0.4, 0, 0, 3);
  const Target t{S(0.4)};
  const ErrorSet e = ComputeErrors(s.belief, {S(1), S(1)}, t, s.beta);
  EXPECT_EQ(BetaUpdate(s, e, s.belief, t, 0.01, 10.0, 0.5).beta.beta[0], 3.0);
}

TEST(BetaUpdateTest, PinnedAtFloor) {
  const ControllerState s = ScalarState(0, 0, 0, 0.6);
  const Target t{S(1)};
  const ErrorSet e = ComputeErrors(s.belief, {S(0), S(0)}, t, s.beta);
  // Gradient = beta (mu_d - mu)^2 Pi_mu > 0 pushes beta down.
  EXPECT_EQ(BetaUpdate(s, e, s.belief, t, 0.1, 10.0, 0.5).beta.beta[0], 0.5);
  EXPECT_LT(BetaUpdate(s, e, s.belief, t, 0.1, 10.0, 0.0).beta.beta[0], 0.5);
}

EpisodeConfig MsdBetaEpisode(bool learn) {
  EpisodeConfig c;
  c.plant = PlantKind::kMsd;
  c.aic.precisions = PrecisionSet::Uniform(1, 1, 1, 1, 1);
  c.aic.beta = TemporalScale::Uniform(1, 5.0);
  c.aic.gains.kappa_tau = 20.0;
  c.aic.switches.learn_beta = learn;
  c.initial_state = {S(-0.5), S(-1), 0.0};
  c.initial_belief = GeneralizedBelief{S(0), S(-1.5), S(0)};
  c.targets = {{0.0, S(1)}};
  c.noise = {0.0, 0.0, 3};
  c.duration = 10.0;
  return c;
}

TEST(BetaUpdateTest, LearningTamesAggressiveInitialBeta) {
  const MetricsSummary frozen = ComputeMetrics(RunEpisode(MsdBetaEpisode(false)));
  const MetricsSummary learned = ComputeMetrics(RunEpisode(MsdBetaEpisode(true)));
  EXPECT_LT(learned.overshoot, frozen.overshoot);
  EXPECT_LT(learned.zero_crossings, frozen.zero_crossings);
}

GainSet SomeGains() { return {33.0, 410.0, 2.5, 7.0}; }

TEST(ControllerTickTest, GlobalFixedPoint) {
  for (const GainSet& gains : {GainSet{}, SomeGains()}) {
    ControllerState s = ScalarState(0.7, 0, 0, 1.3);
    s.action = S(0.25);
    LearningSwitches off;
    const TickResult r = ControllerTick(s, {S(0.7), S(0)}, {S(0.7)}, 0.001, off,
                                        gains, ControllerOptions{});
    EXPECT_EQ(r.state.belief.mu[0], 0.7);
    EXPECT_EQ(r.state.belief.mu_p[0], 0.0);
    EXPECT_EQ(r.state.belief.mu_pp[0], 0.0);
    EXPECT_EQ(r.action[0], 0.25);
  }
}

TEST(ControllerTickTest, EqualsHandComposition) {
  std::mt19937_64 rng(35);
  const ControllerState s = RandomState(rng, 1);
  const GeneralizedObservation obs{S(-0.5), S(-1)};
  const Target target{S(1)};
  const double dt = 0.001;
  const GainSet gains = SomeGains();
  ControllerOptions options;
  options.action_limit = 50.0;
  const LearningSwitches on{true, true, true};
  const TickResult r = ControllerTick(s, obs, target, dt, on, gains, options);

  const ErrorSet e = ComputeErrors(s.belief, obs, target, s.beta);
  const ControllerState est = EstimationStep(s, obs, target, dt, gains.kappa_mu);
  const ControllerState ctl = ControlStep(s, obs, dt, gains.kappa_a, 50.0);
  const ControllerState pre =
      PrecisionUpdate(s, e, dt, gains.kappa_sigma, options.precision_floor, on);
  const ControllerState bet =
      BetaUpdate(s, e, s.belief, target, dt, gains.kappa_tau, options.beta_floor);
  EXPECT_EQ(r.state.belief.mu, est.belief.mu);
  EXPECT_EQ(r.state.belief.mu_p, est.belief.mu_p);
  EXPECT_EQ(r.state.belief.mu_pp, est.belief.mu_pp);
  EXPECT_EQ(r.action, ctl.action);
  EXPECT_EQ(r.state.precisions.pi_o, pre.precisions.pi_o);
  EXPECT_EQ(r.state.precisions.pi_op, pre.precisions.pi_op);
  EXPECT_EQ(r.state.beta.beta, bet.beta.beta);
  EXPECT_EQ(r.free_energy, FreeEnergy(e, s.precisions));
}

TEST(ControllerTickTest, HyperparametersOnlyMoveByTheirOwnRules) {
  std::mt19937_64 rng(36);
  const ControllerState s = RandomState(rng, 2);
  const GeneralizedObservation obs = testing::RandomObservation(rng, 2);
  const Target target{testing::Uniform(rng, 2, -1, 1)};
  const TickResult all = ControllerTick(s, obs, target, 0.01, {true, true, true},
                                        SomeGains(), ControllerOptions{});
  EXPECT_EQ(all.state.precisions.pi_mu, s.precisions.pi_mu);
  EXPECT_EQ(all.state.precisions.pi_mup, s.precisions.pi_mup);
  const TickResult beta_only = ControllerTick(
      s, obs, target, 0.01, {false, false, true}, SomeGains(), ControllerOptions{});
  EXPECT_EQ(beta_only.state.precisions.pi_o, s.precisions.pi_o);
  EXPECT_EQ(beta_only.state.precisions.pi_op, s.precisions.pi_op);
  EXPECT_EQ(beta_only.state.beta.beta, all.state.beta.beta);
  const TickResult pi_only = ControllerTick(
      s, obs, target, 0.01, {true, true, false}, SomeGains(), ControllerOptions{});
  EXPECT_EQ(pi_only.state.beta.beta, s.beta.beta);
}

TEST(ControllerTickTest, DeterministicAndFloored) {
  std::mt19937_64 rng(37);
  ControllerState a = RandomState(rng, 3), b = a;
  ControllerOptions options;
  options.action_limit = 20.0;
  for (int k = 0; k < 2000; ++k) {
    const GeneralizedObservation obs = testing::RandomObservation(rng, 3);
    const Target target{testing::Uniform(rng, 3, -1, 1)};
    const TickResult ra =
        ControllerTick(a, obs, target, 0.001, {true, true, true}, SomeGains(), options);
    const TickResult rb =
        ControllerTick(b, obs, target, 0.001, {true, true, true}, SomeGains(), options);
    ASSERT_EQ(ra.state.belief.mu, rb.state.belief.mu);
    ASSERT_EQ(ra.state.beta.beta, rb.state.beta.beta);
    ASSERT_EQ(ra.action, rb.action);
    a = ra.state;
    b = rb.state;
    ASSERT_GE(a.beta.beta.minCoeff(), 0.5);
    ASSERT_GE(a.precisions.pi_o.diagonal().minCoeff(), 0.01);
    ASSERT_GE(a.precisions.pi_op.diagonal().minCoeff(), 0.01);
  }
}

TEST(ControllerTickTest, DivergenceCarriesTick) {
  const ControllerState s = ScalarState(0, 0, 0, 1);
  const GeneralizedObservation obs{S(std::nan("")), S(0)};
  try {
    ControllerTick(s, obs, {S(0)}, 0.001, {}, GainSet{}, ControllerOptions{}, true, 42);
    FAIL() << "expected divergence";
  } catch (const DivergenceError& e) {
    EXPECT_EQ(e.tick(), 42);
  }
}

TEST(SettingsTest, InvalidOptionsRejected) {
  AicSettings s;
  s.precisions = PrecisionSet::Uniform(1, 1, 1, 1, 1);
  s.beta = TemporalScale::Uniform(1, 1);
  const GeneralizedBelief b = GeneralizedBelief::Zero(1);
  EXPECT_NO_THROW(InitialState(s, b));
  AicSettings bad = s;
  bad.gains.kappa_mu = 0.0;
  EXPECT_THROW(InitialState(bad, b), ContractViolation);
  bad = s;
  bad.options.precision_floor = 0.0;
  EXPECT_THROW(InitialState(bad, b), ContractViolation);
  bad = s;
  bad.precisions.pi_o = PrecisionMatrix::Scalar(1, -1.0);
  EXPECT_THROW(InitialState(bad, b), ContractViolation);
}

}  // namespace
}  // namespace aic
