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

#include "aic/harness.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <thread>

#include "aic/errors.h"
#include "aic/fd_oracle.h"

namespace aic {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json Finite(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

std::string Fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

void WriteFile(const fs::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << contents;
  if (!out) throw std::runtime_error("failed writing '" + path.string() + "'");
}

fs::path ResolveOutDir(const HarnessOptions& options, const RunConfig& config) {
  if (!options.out_dir.empty()) return options.out_dir;
  if (const char* root = std::getenv("AIC_OUT_DIR"); root && *root) {
    return fs::path(root) / config.name;
  }
  return fs::path("aic_out") / config.name;
}

void Diagnostic(std::ostream& err, const std::string& kind,
                const std::string& message, const json& extra = json::object()) {
  json d = {{"error", kind}, {"message", message}};
  for (auto it = extra.begin(); it != extra.end(); ++it) d[it.key()] = it.value();
  err << d.dump() << "\n";
}

// Parses and applies the seed override, mapping failures to exit codes.
std::optional<RunConfig> Load(const std::string& path,
                              const HarnessOptions& options, std::ostream& err,
                              int& code) {
  try {
    RunConfig rc = LoadConfig(path);
    if (options.seed_override) {
      rc.seed = *options.seed_override;
      rc.episode.noise.seed = DeriveSeed(rc.seed, 0);
    }
    code = kExitOk;
    return rc;
  } catch (const ConfigNotFound& e) {
    Diagnostic(err, "missing_file", e.what(), {{"path", path}});
    code = kExitMissingFile;
  } catch (const ConfigError& e) {
    Diagnostic(err, "schema", e.what(), {{"path", path}});
    code = kExitSchema;
  }
  return std::nullopt;
}

json EpisodeJson(const EpisodeOutcome& o, const std::string& trajectory) {
  json j = {{"index", o.plan.index},
            {"axis_value", o.plan.axis_value ? json(*o.plan.axis_value) : json()},
            {"learning", o.plan.learning},
            {"seed", o.plan.config.noise.seed},
            {"status", o.status},
            {"metrics", MetricsJson(o.metrics)}};
  if (!trajectory.empty()) j["trajectory"] = trajectory;
  if (o.log.divergence) {
    j["divergence"] = {{"tick", o.log.divergence->tick},
                       {"t", o.log.divergence->t},
                       {"message", o.log.divergence->message}};
  }
  return j;
}

json Manifest(const RunConfig& rc, const std::string& config_path,
              const std::vector<std::string>& outputs, const json& metrics) {
  return {{"tool", "aic_cli"},
          {"version", kToolVersion},
          {"config", config_path},
          {"config_name", rc.name},
          {"config_hash", HashHex(ConfigHash(rc))},
          {"seed", rc.seed},
          {"outputs", outputs},
          {"metrics", metrics}};
}

std::string ModeName(const RunConfig& rc) {
  return rc.sweep ? "sweep" : "run";
}

}  // namespace

std::vector<PlannedEpisode> PlanEpisodes(const RunConfig& rc) {
  std::vector<PlannedEpisode> plan;
  auto add = [&](std::size_t value_index, std::optional<double> value,
                 const std::string& axis, std::optional<LearningSwitches> learn) {
    PlannedEpisode p;
    p.index = plan.size();
    p.axis_value = value;
    p.config = rc.episode;
    if (value) ApplyAxis(p.config, axis, *value);
    if (learn) p.config.aic.switches = *learn;
    p.learning = p.config.controller == ControllerKind::kAic &&
                 p.config.aic.switches.any();
    p.config.noise.seed = DeriveSeed(rc.seed, value_index);
    plan.push_back(std::move(p));
  };
  if (rc.sweep) {
    for (std::size_t i = 0; i < rc.sweep->values.size(); ++i) {
      if (rc.sweep->paired) {
        add(i, rc.sweep->values[i], rc.sweep->axis, LearningSwitches{});
        add(i, rc.sweep->values[i], rc.sweep->axis, rc.sweep->learn);
      } else {
        add(i, rc.sweep->values[i], rc.sweep->axis, std::nullopt);
      }
    }
  } else if (rc.variants) {
    for (std::size_t i = 0; i < rc.variants->values.size(); ++i) {
      add(i, rc.variants->values[i], rc.variants->axis, std::nullopt);
    }
  } else {
    add(0, std::nullopt, "", std::nullopt);
  }
  return plan;
}

std::vector<EpisodeOutcome> RunPlanned(const std::vector<PlannedEpisode>& plan,
                                       int workers) {
  std::vector<EpisodeOutcome> results(plan.size());
  std::atomic<std::size_t> next{0};
  auto work = [&]() {
    for (std::size_t i = next++; i < plan.size(); i = next++) {
      EpisodeOutcome& r = results[i];
      r.plan = plan[i];
      try {
        r.log = RunEpisode(plan[i].config);
        r.status = r.log.divergence ? "diverged" : "ok";
        if (r.log.rows() > 0) r.metrics = ComputeMetrics(r.log);
      } catch (const std::exception& e) {
        r.status = std::string("error: ") + e.what();
      }
    }
  };
  const int n = std::max(1, std::min<int>(workers, static_cast<int>(plan.size())));
  if (n == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < n; ++w) pool.emplace_back(work);
    for (std::thread& t : pool) t.join();
  }
  return results;
}

json MetricsJson(const MetricsSummary& m) {
  return {{"mae", Finite(m.mae)},
          {"mae_q", Finite(m.mae_q)},
          {"overshoot", Finite(m.overshoot)},
          {"settling_time_2pct", Finite(m.settling_time_2pct)},
          {"settled", m.settled},
          {"zero_crossings", m.zero_crossings},
          {"zero_crossings_per_joint", m.zero_crossings_per_joint},
          {"target_bias", Finite(m.target_bias)},
          {"tracking_error", Finite(m.tracking_error)},
          {"target_pull", Finite(m.target_pull)}};
}

std::string SummaryCsv(const std::vector<EpisodeOutcome>& outcomes) {
  std::string s =
      "axis_value,learning,mae,overshoot,settling_time_2pct,zero_crossings,"
      "status\n";
  for (const EpisodeOutcome& o : outcomes) {
    s += o.plan.axis_value ? Fmt(*o.plan.axis_value) : std::string();
    s += o.plan.learning ? ",1," : ",0,";
    s += Fmt(o.metrics.mae) + "," + Fmt(o.metrics.overshoot) + "," +
         Fmt(o.metrics.settling_time_2pct) + "," +
         std::to_string(o.metrics.zero_crossings) + ",";
    // Quote statuses that carry free text.
    if (o.status == "ok" || o.status == "diverged") {
      s += o.status;
    } else {
      std::string q = o.status;
      std::replace(q.begin(), q.end(), '"', '\'');
      s += "\"" + q + "\"";
    }
    s += "\n";
  }
  return s;
}

std::string SvgPlot(const TrajectoryLog& log, const std::string& title) {
  constexpr double kW = 720, kH = 360, kPad = 40;
  const std::size_t rows = log.rows();
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW
     << "\" height=\"" << kH << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << kPad << "\" y=\"20\" font-family=\"sans-serif\" "
        "font-size=\"14\">"
     << title << ": q (solid), mu (dashed), mu_d (dotted)</text>\n";
  if (rows < 2) {
    os << "</svg>\n";
    return os.str();
  }
  double lo = 1e300, hi = -1e300;
  for (std::size_t k = 0; k < rows; ++k) {
    for (const Vector* v : {&log.q[k], &log.mu[k], &log.mu_d[k]}) {
      lo = std::min(lo, v->minCoeff());
      hi = std::max(hi, v->maxCoeff());
    }
  }
  if (!(hi > lo)) hi = lo + 1.0;
  const double t0 = log.t.front(), t1 = std::max(log.t.back(), t0 + 1e-12);
  auto x = [&](double t) { return kPad + (t - t0) / (t1 - t0) * (kW - 2 * kPad); };
  auto y = [&](double v) { return kH - kPad - (v - lo) / (hi - lo) * (kH - 2 * kPad); };
  os << "<rect x=\"" << kPad << "\" y=\"" << kPad << "\" width=\""
     << kW - 2 * kPad << "\" height=\"" << kH - 2 * kPad
     << "\" fill=\"none\" stroke=\"#888\"/>\n";
  const std::size_t stride = std::max<std::size_t>(1, rows / 1500);
  static const char* kColors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                  "#9467bd", "#8c564b", "#e377c2"};
  os << std::fixed << std::setprecision(2);
  for (int j = 0; j < log.n; ++j) {
    const char* color = kColors[j % 7];
    for (int series = 0; series < 3; ++series) {
      const std::vector<Vector>& data =
          series == 0 ? log.q : (series == 1 ? log.mu : log.mu_d);
      os << "<polyline fill=\"none\" stroke=\"" << color << "\"";
      if (series == 1) os << " stroke-dasharray=\"6,3\"";
      if (series == 2) os << " stroke-dasharray=\"2,3\"";
      os << " points=\"";
      for (std::size_t k = 0; k < rows; k += stride) {
        os << x(log.t[k]) << "," << y(data[k][j]) << " ";
      }
      os << "\"/>\n";
    }
  }
  os << "</svg>\n";
  return os.str();
}

int RunCommand(const std::string& config_path, const HarnessOptions& options,
               std::ostream& out, std::ostream& err) {
  int code;
  std::optional<RunConfig> rc = Load(config_path, options, err, code);
  if (!rc) return code;
  if (rc->sweep) {
    Diagnostic(err, "schema", "config has a sweep section; use the sweep command",
               {{"path", config_path}});
    return kExitSchema;
  }
  const std::vector<PlannedEpisode> plan = PlanEpisodes(*rc);
  const std::vector<EpisodeOutcome> results = RunPlanned(plan, options.workers);

  const fs::path dir = ResolveOutDir(options, *rc);
  try {
    fs::create_directories(dir);
    std::vector<std::string> outputs;
    json episodes = json::array();
    bool diverged = false;
    for (const EpisodeOutcome& o : results) {
      char name[32];
      if (rc->variants) {
        std::snprintf(name, sizeof(name), "trajectory_%03zu", o.plan.index);
      } else {
        std::snprintf(name, sizeof(name), "trajectory");
      }
      const std::string csv = std::string(name) + ".csv";
      WriteFile(dir / csv, ToCsv(o.log));
      outputs.push_back(csv);
      if (options.emit_plots) {
        const std::string svg = std::string(name) + ".svg";
        WriteFile(dir / svg, SvgPlot(o.log, rc->name + " " + name));
        outputs.push_back(svg);
      }
      episodes.push_back(EpisodeJson(o, csv));
      if (o.status != "ok") {
        diverged = true;
        json extra = {{"episode", o.plan.index}};
        if (o.log.divergence) {
          extra["tick"] = o.log.divergence->tick;
          extra["t"] = o.log.divergence->t;
        }
        Diagnostic(err, "divergence", o.status, extra);
      }
    }
    json metrics = {{"config_name", rc->name},
                    {"axis", rc->variants ? json(rc->variants->axis) : json()},
                    {"episodes", episodes}};
    WriteFile(dir / "metrics.json", metrics.dump(2) + "\n");
    outputs.push_back("metrics.json");
    outputs.push_back("manifest.json");
    WriteFile(dir / "manifest.json",
              Manifest(*rc, config_path, outputs, episodes).dump(2) + "\n");
    out << ModeName(*rc) << " " << rc->name << ": " << results.size()
        << " episode(s) written to " << dir.string() << "\n";
    return diverged ? kExitDivergence : kExitOk;
  } catch (const std::exception& e) {
    Diagnostic(err, "io", e.what());
    return kExitMissingFile;
  }
}

int SweepCommand(const std::string& sweep_path, const HarnessOptions& options,
                 std::ostream& out, std::ostream& err) {
  int code;
  std::optional<RunConfig> rc = Load(sweep_path, options, err, code);
  if (!rc) return code;
  if (!rc->sweep) {
    Diagnostic(err, "schema", "sweep section is required",
               {{"path", sweep_path}});
    return kExitSchema;
  }
  const std::vector<PlannedEpisode> plan = PlanEpisodes(*rc);
  const std::vector<EpisodeOutcome> results = RunPlanned(plan, options.workers);

  const fs::path dir = ResolveOutDir(options, *rc);
  try {
    fs::create_directories(dir);
    std::vector<std::string> outputs;
    json episodes = json::array();
    for (const EpisodeOutcome& o : results) {
      std::string csv;
      if (options.write_trajectories || options.emit_plots) {
        char name[48];
        std::snprintf(name, sizeof(name), "episode_%03zu_%s", o.plan.index,
                      o.plan.learning ? "adaptive" : "fixed");
        if (options.write_trajectories) {
          csv = std::string(name) + ".csv";
          WriteFile(dir / csv, ToCsv(o.log));
          outputs.push_back(csv);
        }
        if (options.emit_plots) {
          const std::string svg = std::string(name) + ".svg";
          WriteFile(dir / svg, SvgPlot(o.log, rc->name + " " + name));
          outputs.push_back(svg);
        }
      }
      episodes.push_back(EpisodeJson(o, csv));
      if (o.status != "ok") {
        Diagnostic(err, "divergence", o.status, {{"episode", o.plan.index}});
      }
    }
    WriteFile(dir / "summary.csv", SummaryCsv(results));
    outputs.push_back("summary.csv");
    json metrics = {{"config_name", rc->name},
                    {"axis", rc->sweep->axis},
                    {"paired", rc->sweep->paired},
                    {"episodes", episodes}};
    WriteFile(dir / "metrics.json", metrics.dump(2) + "\n");
    outputs.push_back("metrics.json");
    outputs.push_back("manifest.json");
    WriteFile(dir / "manifest.json",
              Manifest(*rc, sweep_path, outputs, episodes).dump(2) + "\n");
    out << "sweep " << rc->name << ": " << results.size()
        << " episode(s) summarized in " << (dir / "summary.csv").string()
        << "\n";
    return kExitOk;
  } catch (const std::exception& e) {
    Diagnostic(err, "io", e.what());
    return kExitMissingFile;
  }
}

int GradcheckCommand(bool inject_sign_flip, std::ostream& out,
                     std::ostream& err) {
  constexpr double kThreshold = 1e-5;
  GradcheckOptions opts;
  opts.inject_sign_flip = inject_sign_flip;
  const std::vector<GradcheckFamilyResult> results = RunGradcheck(opts);
  bool ok = true;
  for (const GradcheckFamilyResult& r : results) {
    const bool pass = r.worst_error < kThreshold;
    ok = ok && pass;
    out << std::left << std::setw(10) << r.family << " configurations="
        << r.configurations << " worst_error=" << std::scientific
        << std::setprecision(3) << r.worst_error << std::defaultfloat
        << (pass ? " ok" : " FAIL") << "\n";
    if (!pass) {
      Diagnostic(err, "gradcheck", r.family + " gradient exceeds threshold",
                 {{"worst_error", r.worst_error},
                  {"configuration", r.worst_configuration}});
    }
  }
  return ok ? kExitOk : kExitDivergence;
}

}  // namespace aic
