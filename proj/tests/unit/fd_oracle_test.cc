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


#include "aic/fd_oracle.h"

#include <chrono>
#include <cmath>
#include <limits>
#include <random>

#include <gtest/gtest.h>

#include "aic/errors.h"
#include "test_support.h"

namespace aic {
namespace {

TEST(CentralDifferenceTest, Quadratic) {
  const Vector g = CentralDifference(
      [](const Vector& x) { return x[0] * x[0]; }, Vector::Constant(1, 3.0), 1e-6);
  EXPECT_NEAR(g[0], 6.0, 1e-6);
}

TEST(CentralDifferenceTest, ConstantFunctionIsZero) {
  const Vector g =
      CentralDifference([](const Vector&) { return 4.2; }, Vector::Ones(5));
  EXPECT_TRUE(g.isZero(0));
}

TEST(CentralDifferenceTest, AgreesWithBeliefGradient) {
  std::mt19937_64 rng(21);
  const int n = 3;
  const GeneralizedObservation obs = testing::RandomObservation(rng, n);
  const Target target{testing::Uniform(rng, n, -2, 2)};
  const PrecisionSet pi = testing::RandomPrecisions(rng, n);
  const TemporalScale beta{testing::Uniform(rng, n, 0.5, 2)};
  const GeneralizedBelief b = testing::RandomBelief(rng, n);
  auto f = [&](const Vector& x) {
    const GeneralizedBelief y{x.segment(0, n), x.segment(n, n), x.segment(2 * n, n)};
    return FreeEnergy(ComputeErrors(y, obs, target, beta), pi);
  };
  Vector x(3 * n);
  x << b.mu, b.mu_p, b.mu_pp;
  const BeliefGradient g = GradBelief(ComputeErrors(b, obs, target, beta), pi, beta);
  Vector analytic(3 * n);
  analytic << g.d_mu, g.d_mu_p, g.d_mu_pp;
  const Vector fd = CentralDifference(f, x);
  for (int i = 0; i < 3 * n; ++i) EXPECT_LT(GradientError(analytic[i], fd[i]), 1e-6);
}

TEST(CentralDifferenceTest, NonFiniteValueFails) {
  auto f = [](const Vector& x) {
    return x[0] > 1.0 ? std::numeric_limits<double>::quiet_NaN() : x[0];
  };
  EXPECT_THROW(CentralDifference(f, Vector::Ones(1), 1e-3), OracleFailure);
  EXPECT_THROW(CentralDifference(f, Vector::Zero(1), 0.0), ContractViolation);
}

TEST(GradientErrorTest, RelativeAndAbsoluteRegimes) {
  EXPECT_DOUBLE_EQ(GradientError(2.0, 2.0), 0.0);
  EXPECT_NEAR(GradientError(1.0, 1.0 + 1e-6), 1e-6, 1e-11);
  // Below 1e-6 in magnitude an absolute 1e-8 maps onto the 1e-5 threshold.
  EXPECT_LT(GradientError(1e-9, 5e-9), 1e-5);
  EXPECT_GT(GradientError(1e-9, 5e-8), 1e-5);
}

TEST(GradcheckTest, DefaultBatteryPassesQuickly) {
  const auto start = std::chrono::steady_clock::now();
  const auto results = RunGradcheck(GradcheckOptions{});
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  ASSERT_EQ(results.size(), 3u);
  for (const auto& r : results) {
    EXPECT_EQ(r.configurations, 300) << r.family;
    EXPECT_LT(r.worst_error, 1e-5) << r.family << ": " << r.worst_configuration;
  }
  EXPECT_LT(seconds, 5.0);
}

TEST(GradcheckTest, ManipulatorDimensionAlone) {
  GradcheckOptions options;
  options.dimensions = {7};
  options.seed = 99;
  for (const auto& r : RunGradcheck(options)) {
    EXPECT_EQ(r.configurations, 100);
    EXPECT_LT(r.worst_error, 1e-5) << r.family;
  }
}

TEST(GradcheckTest, SignFlipIsCaught) {
  GradcheckOptions options;
  options.inject_sign_flip = true;
  options.configurations_per_dimension = 5;
  const auto results = RunGradcheck(options);
  ASSERT_EQ(results[0].family, "belief");
  EXPECT_GT(results[0].worst_error, 1.0);
  EXPECT_FALSE(results[0].worst_configuration.empty());
}

}  // namespace
}  // namespace aic
