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

// Closed-loop episodes: plant, sensor, controller and schedules wired into a
// deterministic tick loop, plus the metrics computed from its log.

#ifndef AIC_EPISODE_H_
#define AIC_EPISODE_H_

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "aic/baselines.h"
#include "aic/controller.h"
#include "aic/plants.h"

namespace aic {

enum class PlantKind { kMsd, kSurrogateArm, kTwoLink };
enum class ControllerKind { kAic, kPid, kFilter };

const char* PlantKindName(PlantKind kind);
const char* ControllerKindName(ControllerKind kind);
int PlantDimension(PlantKind kind);

struct TargetWaypoint {
  double time = 0.0;
  Vector mu_d;
};

struct PayloadEvent {
  double time = 0.0;
  double mass = 0.0;
};

struct EpisodeConfig {
  PlantKind plant = PlantKind::kMsd;
  MsdParams msd;
  SurrogateArmParams arm;
  TwoLinkParams two_link;

  ControllerKind controller = ControllerKind::kAic;
  AicSettings aic;
  PidGains pid;

  PlantState initial_state;
  // Defaults to (q0, q_dot0, 0) when unset.
  std::optional<GeneralizedBelief> initial_belief;

  std::vector<TargetWaypoint> targets;  // first entry at t = 0
  std::vector<PayloadEvent> payloads;   // surrogate arm only

  double dt = 0.001;
  double duration = 10.0;
  int rate_divider = 1;  // controller runs every rate_divider plant ticks
  NoiseSpec noise;       // noise.seed seeds the episode

  int size() const { return PlantDimension(plant); }
  // Throws ContractViolation describing the first violated constraint.
  void Validate() const;
};

struct DivergenceRecord {
  std::int64_t tick = -1;
  double t = 0.0;
  std::string message;
};

// One row per tick. Belief, F and hyperparameters are pre-tick values; `a`
// is the action applied during the tick. PID episodes log mu = o, mu' = o',
// mu'' = 0 and NaN for F, beta and the precisions.
struct TrajectoryLog {
  int n = 0;
  double dt = 0.0;
  std::vector<double> t;
  std::vector<Vector> q, q_dot, o, o_p, mu, mu_p, mu_pp, a, mu_d;
  std::vector<double> free_energy;
  std::vector<Vector> beta, pi_o, pi_op;
  std::optional<DivergenceRecord> divergence;

  std::size_t rows() const { return t.size(); }
};

// ceil(duration / dt), or a single initial row when duration < dt.
std::int64_t TickCount(double duration, double dt);

// Never throws on divergence: the log is truncated at the failing tick and
// `divergence` is set.
TrajectoryLog RunEpisode(const EpisodeConfig& config);

struct MetricsSummary {
  double mae = 0.0;    // mean |mu_d - mu| over ticks and joints
  double mae_q = 0.0;  // same against the latent q
  double overshoot = 0.0;
  double settling_time_2pct = 0.0;
  bool settled = true;
  int zero_crossings = 0;
  std::vector<int> zero_crossings_per_joint;
  double target_bias = 0.0;     // mean ||mu - mu_d||
  double tracking_error = 0.0;  // mean ||mu - q||
  double target_pull = 0.0;     // mean (||q - mu_d|| - ||mu - mu_d||)
};

// Metrics against the per-tick targets recorded in the log.
//
// The log is split into segments of constant mu_d. Within a segment a joint
// is excited when its step |mu_d - q(start)| exceeds 1e-6; only excited
// joints contribute to overshoot, crossings and settling.
//   overshoot: largest max(0, sign(step) (q - mu_d)), in units of q.
//   zero_crossings: sign changes of q - mu_d after the first one, with a
//     hysteresis band of 2% of the step.
//   settling_time_2pct: time from the start of the last segment until every
//     excited joint stays within 2% of its step; `settled` is false and the
//     time equals the segment length when that never happens.
MetricsSummary ComputeMetrics(const TrajectoryLog& log);
// Same, with a constant target replacing the logged one.
MetricsSummary ComputeMetrics(const TrajectoryLog& log, const Target& target);

// Sign changes of `signal` outside [-band, band], minus the first one.
int CountZeroCrossings(const std::vector<double>& signal, double band);

std::string CsvHeader(int n);
void WriteCsv(const TrajectoryLog& log, std::ostream& out);
std::string ToCsv(const TrajectoryLog& log);

}  // namespace aic

#endif  // AIC_EPISODE_H_
