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

// Experiment runner behind the command-line tool: expands configs into
// episodes, runs them on a worker pool, and writes CSV, JSON and SVG outputs.

#ifndef AIC_HARNESS_H_
#define AIC_HARNESS_H_

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"

#include "aic/config.h"
#include "aic/episode.h"

namespace aic {

inline constexpr const char* kToolVersion = "0.1.0";

enum ExitCode : int {
  kExitOk = 0,
  kExitMissingFile = 1,
  kExitSchema = 2,
  kExitDivergence = 3,  // also a gradcheck threshold breach
};

struct PlannedEpisode {
  std::size_t index = 0;
  std::optional<double> axis_value;
  bool learning = false;
  EpisodeConfig config;
};

struct EpisodeOutcome {
  PlannedEpisode plan;
  TrajectoryLog log;
  MetricsSummary metrics;
  std::string status;  // "ok", "diverged" or "error: ..."
};

// One episode, one per variant value, or one (or a pair) per sweep value.
// Seeds come from DeriveSeed(config.seed, value index); a pair shares it.
std::vector<PlannedEpisode> PlanEpisodes(const RunConfig& config);

// Results are ordered by plan index, whatever the worker count.
std::vector<EpisodeOutcome> RunPlanned(const std::vector<PlannedEpisode>& plan,
                                       int workers);

nlohmann::json MetricsJson(const MetricsSummary& m);
std::string SummaryCsv(const std::vector<EpisodeOutcome>& outcomes);
std::string SvgPlot(const TrajectoryLog& log, const std::string& title);

struct HarnessOptions {
  std::string out_dir;  // empty: $AIC_OUT_DIR/<name>, else ./aic_out/<name>
  int workers = 1;
  std::optional<std::uint64_t> seed_override;
  bool emit_plots = false;
  bool write_trajectories = false;  // sweeps only; runs always write them
};

// run: trajectory CSV(s), metrics.json, manifest.json.
int RunCommand(const std::string& config_path, const HarnessOptions& options,
               std::ostream& out, std::ostream& err);
// sweep: summary.csv, metrics.json, manifest.json.
int SweepCommand(const std::string& sweep_path, const HarnessOptions& options,
                 std::ostream& out, std::ostream& err);
int GradcheckCommand(bool inject_sign_flip, std::ostream& out,
                     std::ostream& err);

}  // namespace aic

#endif  // AIC_HARNESS_H_
