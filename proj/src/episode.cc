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

#include "aic/episode.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>
#include <sstream>

#include "aic/errors.h"

namespace aic {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kExcitedStep = 1e-6;
constexpr double kBandFraction = 0.02;

// A schedule entry is due at the first tick whose time reaches it. The slack
// absorbs the rounding in k * dt so an event at 8.0 s fires at tick 8000.
bool Due(double tick_time, double event_time, double dt) {
  return tick_time >= event_time - 1e-9 * dt;
}

void CheckVector(const Vector& v, int n, const std::string& what) {
  CheckSameSize(n, static_cast<int>(v.size()), what.c_str());
  if (!v.allFinite()) throw ContractViolation(what + " has non-finite entries");
}

PlantState StepPlant(const EpisodeConfig& c, const PlantState& s,
                     const Vector& a, double payload_mass) {
  switch (c.plant) {
    case PlantKind::kMsd:
      return MsdStep(s, a, c.msd, c.dt);
    case PlantKind::kSurrogateArm: {
      SurrogateArmParams p = c.arm;
      p.payload_mass = payload_mass;
      return SurrogateArmStep(s, a, p, c.dt);
    }
    case PlantKind::kTwoLink:
      return TwoLinkStep(s, a, c.two_link, c.dt);
  }
  throw ContractViolation("unknown plant");
}

}  // namespace

const char* PlantKindName(PlantKind kind) {
  switch (kind) {
    case PlantKind::kMsd:
      return "msd";
    case PlantKind::kSurrogateArm:
      return "surrogate_arm";
    case PlantKind::kTwoLink:
      return "two_link";
  }
  return "?";
}

const char* ControllerKindName(ControllerKind kind) {
  switch (kind) {
    case ControllerKind::kAic:
      return "aic";
    case ControllerKind::kPid:
      return "pid";
    case ControllerKind::kFilter:
      return "filter";
  }
  return "?";
}

int PlantDimension(PlantKind kind) {
  switch (kind) {
    case PlantKind::kMsd:
      return 1;
    case PlantKind::kSurrogateArm:
      return 7;
    case PlantKind::kTwoLink:
      return 2;
  }
  return 0;
}

void EpisodeConfig::Validate() const {
  const int n = size();
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ContractViolation("dt must be > 0");
  if (!(duration > 0.0) || !std::isfinite(duration)) {
    throw ContractViolation("duration must be > 0");
  }
  if (rate_divider < 1) throw ContractViolation("rate_divider must be >= 1");
  switch (plant) {
    case PlantKind::kMsd:
      msd.Validate();
      break;
    case PlantKind::kSurrogateArm:
      arm.Validate();
      break;
    case PlantKind::kTwoLink:
      two_link.Validate();
      break;
  }
  noise.Validate();
  CheckVector(initial_state.q, n, "initial q");
  CheckVector(initial_state.q_dot, n, "initial q_dot");
  if (initial_belief) {
    initial_belief->Validate();
    CheckSameSize(n, initial_belief->size(), "initial belief");
  }
  if (targets.empty()) throw ContractViolation("at least one target is required");
  if (targets.front().time != 0.0) {
    throw ContractViolation("the first target must start at t = 0");
  }
  for (std::size_t i = 0; i < targets.size(); ++i) {
    CheckVector(targets[i].mu_d, n, "target mu_d");
    if (i > 0 && !(targets[i].time > targets[i - 1].time)) {
      throw ContractViolation("target schedule must be strictly time-sorted");
    }
  }
  for (std::size_t i = 0; i < payloads.size(); ++i) {
    if (plant != PlantKind::kSurrogateArm) {
      throw ContractViolation("payload schedules apply to the surrogate arm only");
    }
    if (!(payloads[i].mass >= 0.0) || !(payloads[i].time >= 0.0)) {
      throw ContractViolation("payload events need time >= 0 and mass >= 0");
    }
    if (i > 0 && !(payloads[i].time > payloads[i - 1].time)) {
      throw ContractViolation("payload schedule must be strictly time-sorted");
    }
  }
  if (controller == ControllerKind::kPid) {
    pid.Validate();
    CheckSameSize(n, pid.size(), "pid gains");
  } else {
    aic.gains.Validate();
    aic.options.Validate();
    const PrecisionSet& p = aic.precisions;
    for (const auto& [m, what] :
         {std::pair{&p.pi_o, "Pi_o"}, std::pair{&p.pi_op, "Pi_o'"},
          std::pair{&p.pi_mu, "Pi_mu"}, std::pair{&p.pi_mup, "Pi_mu'"}}) {
      CheckSameSize(n, m->size(), what);
      if (!m->IsPositiveDefinite()) {
        throw ContractViolation(std::string(what) + " must be positive definite");
      }
    }
    CheckVector(aic.beta.beta, n, "beta");
    if (!(aic.beta.beta.array() >= 0.0).all()) {
      throw ContractViolation("beta must be >= 0");
    }
  }
}

std::int64_t TickCount(double duration, double dt) {
  if (duration < dt) return 1;
  return static_cast<std::int64_t>(std::ceil(duration / dt - 1e-9));
}

TrajectoryLog RunEpisode(const EpisodeConfig& config) {
  config.Validate();
  const int n = config.size();
  const std::int64_t ticks = TickCount(config.duration, config.dt);
  const bool steps = config.duration >= config.dt;
  // A controller running every rate_divider ticks integrates over that span.
  const double ctrl_dt = config.dt * config.rate_divider;

  AicSettings aic = config.aic;
  if (config.controller == ControllerKind::kFilter) aic = PureFilterMode(aic);
  const bool is_pid = config.controller == ControllerKind::kPid;

  const GeneralizedBelief belief0 =
      config.initial_belief
          ? *config.initial_belief
          : GeneralizedBelief{config.initial_state.q, config.initial_state.q_dot,
                              Vector::Zero(n)};
  ControllerState ctrl;
  if (!is_pid) ctrl = InitialState(aic, belief0);
  PidState pid = PidState::Zero(n);
  Vector action = Vector::Zero(n);

  PlantState plant = config.initial_state;
  plant.t = 0.0;
  std::mt19937_64 rng(config.noise.seed);

  TrajectoryLog log;
  log.n = n;
  log.dt = config.dt;
  const Vector nan_n = Vector::Constant(n, kNaN);

  std::size_t target_idx = 0;
  std::size_t payload_idx = 0;
  double payload_mass = config.arm.payload_mass;
  double last_f = kNaN;

  for (std::int64_t k = 0; k < ticks; ++k) {
    const double t = static_cast<double>(k) * config.dt;
    while (target_idx + 1 < config.targets.size() &&
           Due(t, config.targets[target_idx + 1].time, config.dt)) {
      ++target_idx;
    }
    while (payload_idx < config.payloads.size() &&
           Due(t, config.payloads[payload_idx].time, config.dt)) {
      payload_mass = config.payloads[payload_idx].mass;
      ++payload_idx;
    }
    const Target target{config.targets[target_idx].mu_d};
    const GeneralizedObservation obs = Observe(plant, config.noise, rng);
    const bool control_tick = steps && k % config.rate_divider == 0;

    GeneralizedBelief logged_belief;
    Vector logged_beta = nan_n, logged_pi_o = nan_n, logged_pi_op = nan_n;
    try {
      if (is_pid) {
        logged_belief = {obs.o, obs.o_p, Vector::Zero(n)};
        if (control_tick) {
          // Targets are piecewise constant, so the error rate is -o'.
          PidResult r = PidStep(pid, target.mu_d - obs.o, -obs.o_p, config.pid,
                                ctrl_dt);
          pid = std::move(r.state);
          action = std::move(r.action);
          if (!action.allFinite()) throw DivergenceError("pid action became non-finite");
        }
      } else {
        logged_belief = ctrl.belief;
        logged_beta = ctrl.beta.beta;
        logged_pi_o = ctrl.precisions.pi_o.diagonal();
        logged_pi_op = ctrl.precisions.pi_op.diagonal();
        if (control_tick) {
          TickResult r = ControllerTick(ctrl, obs, target, ctrl_dt,
                                        aic.switches, aic.gains, aic.options,
                                        aic.control_enabled, k);
          last_f = r.free_energy;
          ctrl = std::move(r.state);
          if (aic.control_enabled) action = r.action;
        } else if (!steps) {
          last_f = FreeEnergy(ComputeErrors(ctrl.belief, obs, target, ctrl.beta),
                              ctrl.precisions);
        }
      }
    } catch (const DivergenceError& e) {
      log.divergence = DivergenceRecord{k, t, e.what()};
      return log;
    }

    log.t.push_back(t);
    log.q.push_back(plant.q);
    log.q_dot.push_back(plant.q_dot);
    log.o.push_back(obs.o);
    log.o_p.push_back(obs.o_p);
    log.mu.push_back(logged_belief.mu);
    log.mu_p.push_back(logged_belief.mu_p);
    log.mu_pp.push_back(logged_belief.mu_pp);
    log.a.push_back(action);
    log.mu_d.push_back(target.mu_d);
    log.free_energy.push_back(is_pid ? kNaN : last_f);
    log.beta.push_back(logged_beta);
    log.pi_o.push_back(logged_pi_o);
    log.pi_op.push_back(logged_pi_op);

    if (!steps) break;
    try {
      plant = StepPlant(config, plant, action, payload_mass);
    } catch (const DomainError& e) {
      log.divergence = DivergenceRecord{k, t, e.what()};
      return log;
    }
    plant.t = static_cast<double>(k + 1) * config.dt;
    if (!plant.q.allFinite() || !plant.q_dot.allFinite()) {
      log.divergence = DivergenceRecord{k, t, "plant state became non-finite"};
      return log;
    }
  }
  return log;
}

int CountZeroCrossings(const std::vector<double>& signal, double band) {
  int side = 0;
  int changes = 0;
  for (double x : signal) {
    int s;
    if (x > band) {
      s = 1;
    } else if (x < -band) {
      s = -1;
    } else {
      continue;
    }
    if (side != 0 && s != side) ++changes;
    side = s;
  }
  return std::max(0, changes - 1);
}

MetricsSummary ComputeMetrics(const TrajectoryLog& log) {
  const std::size_t rows = log.rows();
  if (rows == 0) throw ContractViolation("metrics need a non-empty log");
  const int n = log.n;
  MetricsSummary m;
  m.zero_crossings_per_joint.assign(n, 0);

  double abs_mu = 0.0, abs_q = 0.0;
  for (std::size_t k = 0; k < rows; ++k) {
    abs_mu += (log.mu_d[k] - log.mu[k]).cwiseAbs().sum();
    abs_q += (log.mu_d[k] - log.q[k]).cwiseAbs().sum();
    const double bias = (log.mu[k] - log.mu_d[k]).norm();
    m.target_bias += bias;
    m.tracking_error += (log.mu[k] - log.q[k]).norm();
    m.target_pull += (log.q[k] - log.mu_d[k]).norm() - bias;
  }
  const double count = static_cast<double>(rows);
  m.mae = abs_mu / (count * n);
  m.mae_q = abs_q / (count * n);
  m.target_bias /= count;
  m.tracking_error /= count;
  m.target_pull /= count;

  // Segments of constant target.
  std::vector<std::size_t> starts = {0};
  for (std::size_t k = 1; k < rows; ++k) {
    if (log.mu_d[k] != log.mu_d[k - 1]) starts.push_back(k);
  }
  for (std::size_t s = 0; s < starts.size(); ++s) {
    const std::size_t begin = starts[s];
    const std::size_t end = s + 1 < starts.size() ? starts[s + 1] : rows;
    const bool last_segment = s + 1 == starts.size();
    std::size_t settle_index = begin;
    for (int j = 0; j < n; ++j) {
      const double target = log.mu_d[begin][j];
      const double step = target - log.q[begin][j];
      if (std::abs(step) <= kExcitedStep) continue;
      const double band = kBandFraction * std::abs(step);
      const double dir = step > 0.0 ? 1.0 : -1.0;
      std::vector<double> err;
      err.reserve(end - begin);
      for (std::size_t k = begin; k < end; ++k) {
        const double e = log.q[k][j] - target;
        err.push_back(e);
        m.overshoot = std::max(m.overshoot, dir * e);
        if (last_segment && std::abs(e) > band) {
          settle_index = std::max(settle_index, k + 1);
        }
      }
      m.zero_crossings_per_joint[j] += CountZeroCrossings(err, band);
    }
    if (last_segment) {
      const double seg_len = static_cast<double>(end - begin) * log.dt;
      if (settle_index >= end) {
        m.settled = false;
        m.settling_time_2pct = seg_len;
      } else {
        m.settling_time_2pct = static_cast<double>(settle_index - begin) * log.dt;
      }
    }
  }
  for (int c : m.zero_crossings_per_joint) m.zero_crossings += c;
  return m;
}

MetricsSummary ComputeMetrics(const TrajectoryLog& log, const Target& target) {
  CheckSameSize(log.n, target.size(), "target");
  TrajectoryLog copy = log;
  std::fill(copy.mu_d.begin(), copy.mu_d.end(), target.mu_d);
  return ComputeMetrics(copy);
}

std::string CsvHeader(int n) {
  std::string h = "t";
  auto group = [&](const char* name) {
    for (int i = 0; i < n; ++i) h += "," + std::string(name) + std::to_string(i);
  };
  group("q");
  group("qd");
  group("o");
  group("op");
  group("mu");
  group("mup");
  group("mupp");
  group("a");
  h += ",F";
  group("beta");
  group("pio");
  group("piop");
  return h;
}

void WriteCsv(const TrajectoryLog& log, std::ostream& out) {
  out << CsvHeader(log.n) << '\n';
  char buf[32];
  std::string line;
  auto put = [&](double v) {
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    line += ',';
    line += buf;
  };
  auto put_vec = [&](const Vector& v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) put(v[i]);
  };
  for (std::size_t k = 0; k < log.rows(); ++k) {
    std::snprintf(buf, sizeof(buf), "%.9g", log.t[k]);
    line = buf;
    put_vec(log.q[k]);
    put_vec(log.q_dot[k]);
    put_vec(log.o[k]);
    put_vec(log.o_p[k]);
    put_vec(log.mu[k]);
    put_vec(log.mu_p[k]);
    put_vec(log.mu_pp[k]);
    put_vec(log.a[k]);
    put(log.free_energy[k]);
    put_vec(log.beta[k]);
    put_vec(log.pi_o[k]);
    put_vec(log.pi_op[k]);
    line += '\n';
    out << line;
  }
}

std::string ToCsv(const TrajectoryLog& log) {
  std::ostringstream os;
  WriteCsv(log, os);
  return os.str();
}

}  // namespace aic
