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


#include "aic/config.h"

#include <filesystem>
#include <set>
#include <string>

#include <gtest/gtest.h>

#include "aic/errors.h"

namespace aic {
namespace {

const char* kMinimal = R"(
name: minimal
plant: {kind: msd}
controller: {kind: aic}
targets:
  - {time: 0, mu_d: 1}
)";

std::string With(const std::string& extra) { return std::string(kMinimal) + extra; }

TEST(ParseConfigTest, MinimalUsesDefaults) {
  const RunConfig rc = ParseConfig(kMinimal);
  EXPECT_EQ(rc.name, "minimal");
  EXPECT_EQ(rc.seed, 1u);
  const EpisodeConfig& ep = rc.episode;
  EXPECT_EQ(ep.plant, PlantKind::kMsd);
  EXPECT_EQ(ep.dt, 0.001);
  EXPECT_EQ(ep.duration, 10.0);
  EXPECT_EQ(ep.noise.sigma_pos, 0.001);
  EXPECT_EQ(ep.noise.sigma_vel, 0.01);
  EXPECT_EQ(ep.aic.gains.kappa_mu, GainSet{}.kappa_mu);
  EXPECT_EQ(ep.aic.options.beta_floor, 0.5);
  EXPECT_EQ(ep.targets.size(), 1u);
  EXPECT_FALSE(rc.variants || rc.sweep);
}

TEST(ParseConfigTest, ScalarsBroadcastAndPrecisionForms) {
  const RunConfig rc = ParseConfig(R"(
name: arm
plant: {kind: surrogate_arm}
controller:
  kind: aic
  pi_o: 2
  pi_op: [1, 2, 3, 4, 5, 6, 7]
  beta: 1.5
targets:
  - {time: 0, mu_d: 0.25}
)");
  const EpisodeConfig& ep = rc.episode;
  ASSERT_EQ(ep.size(), 7);
  EXPECT_EQ(ep.aic.precisions.pi_o, PrecisionMatrix::Scalar(7, 2.0));
  EXPECT_EQ(ep.aic.precisions.pi_op.diagonal()[6], 7.0);
  EXPECT_EQ(ep.aic.beta.beta, Vector::Constant(7, 1.5));
  EXPECT_EQ(ep.targets[0].mu_d, Vector::Constant(7, 0.25));

  const RunConfig dense = ParseConfig(R"(
name: dense
plant: {kind: two_link}
controller:
  kind: aic
  pi_o: [[2, 0.5], [0.5, 1]]
targets:
  - {time: 0, mu_d: [0, 0]}
)");
  EXPECT_FALSE(dense.episode.aic.precisions.pi_o.is_diagonal());
  EXPECT_EQ(dense.episode.aic.precisions.pi_o.dense()(0, 1), 0.5);
}

TEST(ParseConfigTest, SchemaViolationsRejected) {
  const char* bad[] = {
      "name: x\nplant: {kind: msd}\ncontroller: {kind: aic}\ntargets: [{time: 0, mu_d: 1}]\n"
      "bogus: 1\n",
      "plant: {kind: msd}\ncontroller: {kind: aic}\ntargets: [{time: 0, mu_d: 1}]\n",
      "name: x\nplant: {kind: rocket}\ncontroller: {kind: aic}\ntargets: [{time: 0, mu_d: 1}]\n",
      "name: x\nplant: {kind: msd}\ncontroller: {kind: aic, pi_o: -1}\n"
      "targets: [{time: 0, mu_d: 1}]\n",
      "name: x\nplant: {kind: msd}\ncontroller: {kind: aic, pi_o: [[1, 2], [2, 1]]}\n"
      "targets: [{time: 0, mu_d: 1}]\n",
      "name: x\nplant: {kind: msd}\ncontroller: {kind: aic}\ntargets: []\n",
      "name: x\nplant: {kind: msd}\ncontroller: {kind: aic}\ntargets: [{time: 1, mu_d: 1}]\n",
      "name: x\nplant: {kind: msd}\ncontroller: {kind: aic}\ntargets: [{time: 0, mu_d: [1, 2]}]\n",
      "name: x\nplant: {kind: msd}\ncontroller: {kind: aic, kappa_mu: abc}\n"
      "targets: [{time: 0, mu_d: 1}]\n",
      "name: x\nplant: {kind: msd}\ncontroller: {kind: pid, p: 1, pi_o: 2}\n"
      "targets: [{time: 0, mu_d: 1}]\n",
      "name: x\nplant: {kind: msd}\ncontroller: {kind: pid, d: 1, form: velocity}\n"
      "targets: [{time: 0, mu_d: 1}]\n",
      "name: x\nplant: {kind: msd}\ncontroller: {kind: aic}\ntargets: [{time: 0, mu_d: 1}]\n"
      "noise: {sigma_pos: -1}\n",
      "name: x\nplant: {kind: msd}\ncontroller: {kind: aic}\ntargets: [{time: 0, mu_d: 1}]\n"
      "variants: {axis: controller.nope, values: [1]}\n",
      "name: x\nplant: {kind: msd}\ncontroller: {kind: aic}\ntargets: [{time: 0, mu_d: 1}]\n"
      "sweep: {axis: controller.beta, values: [1, -2]}\n",
      "name: x\nplant: {kind: msd}\ncontroller: {kind: aic}\ntargets: [{time: 0, mu_d: 1}]\n"
      "payloads: [{time: 1, mass: 2}]\n",
      "name: [unterminated\n",
  };
  for (const char* text : bad) {
    EXPECT_THROW(ParseConfig(text), ConfigError) << text;
  }
}

TEST(ParseConfigTest, MatchedPiUsesVelocityForm) {
  const RunConfig rc = ParseConfig(R"(
name: pi
plant: {kind: msd}
controller: {kind: pid, matched_pi: true, kappa_a: 2, pi_o: 0.05, pi_op: 1}
targets: [{time: 0, mu_d: 0}]
)");
  EXPECT_EQ(rc.episode.pid.p[0], 2.0);
  EXPECT_EQ(rc.episode.pid.i[0], 0.1);
  EXPECT_EQ(rc.episode.pid.form, PidForm::kVelocity);
}

TEST(SerializeConfigTest, RoundTripIsHashEqual) {
  for (const auto& entry : std::filesystem::directory_iterator(AIC_CONFIG_DIR)) {
    if (entry.path().extension() != ".cfg") continue;
    const RunConfig rc = LoadConfig(entry.path().string());
    const std::string canonical = SerializeConfig(rc);
    const RunConfig again = ParseConfig(canonical);
    EXPECT_EQ(SerializeConfig(again), canonical) << entry.path();
    EXPECT_EQ(ConfigHash(again), ConfigHash(rc)) << entry.path();
    // Semantic spot checks.
    EXPECT_EQ(again.seed, rc.seed);
    EXPECT_EQ(again.episode.dt, rc.episode.dt);
    EXPECT_EQ(again.episode.targets.size(), rc.episode.targets.size());
    EXPECT_EQ(again.episode.aic.precisions.pi_mu, rc.episode.aic.precisions.pi_mu);
    EXPECT_EQ(again.episode.aic.switches.learn_beta, rc.episode.aic.switches.learn_beta);
  }
}

TEST(SerializeConfigTest, HashSeesEveryChange) {
  const RunConfig a = ParseConfig(kMinimal);
  const RunConfig b = ParseConfig(With("dt: 0.002\n"));
  const RunConfig c = ParseConfig(With("seed: 2\n"));
  EXPECT_NE(ConfigHash(a), ConfigHash(b));
  EXPECT_NE(ConfigHash(a), ConfigHash(c));
  EXPECT_EQ(HashHex(0xabcULL), "0000000000000abc");
}

TEST(LoadConfigTest, MissingFile) {
  EXPECT_THROW(LoadConfig("/nonexistent/dir/x.cfg"), ConfigNotFound);
}

TEST(LoadConfigTest, EveryBundledConfigLoads) {
  int count = 0;
  for (const auto& entry : std::filesystem::directory_iterator(AIC_CONFIG_DIR)) {
    if (entry.path().extension() != ".cfg") continue;
    EXPECT_NO_THROW(LoadConfig(entry.path().string())) << entry.path();
    ++count;
  }
  EXPECT_GE(count, 11);
}

TEST(DeriveSeedTest, DeterministicAndDistinct) {
  EXPECT_EQ(DeriveSeed(1, 0), DeriveSeed(1, 0));
  std::set<std::uint64_t> seen;
  for (std::uint64_t s = 0; s < 10; ++s) {
    for (std::uint64_t i = 0; i < 100; ++i) seen.insert(DeriveSeed(s * 1000, i));
  }
  EXPECT_EQ(seen.size(), 1000u);
  // splitmix64 reference output for state 0 after one increment.
  EXPECT_EQ(DeriveSeed(0, 0), 0xe220a8397b1dcdafULL);
}

TEST(ApplyAxisTest, SetsTheNamedParameter) {
  EpisodeConfig ep = ParseConfig(R"(
name: arm
plant: {kind: surrogate_arm}
controller: {kind: aic}
targets: [{time: 0, mu_d: 0.1}]
payloads: [{time: 0, mass: 0}, {time: 8, mass: 1}]
)").episode;
  ApplyAxis(ep, "controller.pi_mu", 0.3);
  EXPECT_EQ(ep.aic.precisions.pi_mu, PrecisionMatrix::Scalar(7, 0.3));
  ApplyAxis(ep, "controller.beta_scale", 2.0);
  EXPECT_EQ(ep.aic.beta.beta, Vector::Constant(7, 2.0));
  ApplyAxis(ep, "controller.kappa_a", 12.0);
  EXPECT_EQ(ep.aic.gains.kappa_a, 12.0);
  ApplyAxis(ep, "payload.mass", 3.0);
  EXPECT_EQ(ep.payloads[0].mass, 0.0);
  EXPECT_EQ(ep.payloads[1].mass, 3.0);
  ApplyAxis(ep, "noise.sigma_vel", 0.05);
  EXPECT_EQ(ep.noise.sigma_vel, 0.05);
  ApplyAxis(ep, "controller.learn_mode", 1);
  EXPECT_TRUE(ep.aic.switches.learn_pi_o && ep.aic.switches.learn_pi_op);
  EXPECT_FALSE(ep.aic.switches.learn_beta);
  ApplyAxis(ep, "controller.learn_mode", 2);
  EXPECT_FALSE(ep.aic.switches.learn_pi_o);
  EXPECT_TRUE(ep.aic.switches.learn_beta);
  ApplyAxis(ep, "controller.learn_mode", 0);
  EXPECT_FALSE(ep.aic.switches.any());
  EXPECT_THROW(ApplyAxis(ep, "controller.nope", 1.0), ConfigError);
  EXPECT_FALSE(KnownAxes().empty());
}

}  // namespace
}  // namespace aic
