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

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "aic/errors.h"

namespace aic {

namespace {

// ---------------------------------------------------------------------------
// Parsing

std::string Real(double v);

[[noreturn]] void Fail(const std::string& where, const std::string& what) {
  throw ConfigError(where + ": " + what);
}

void ExpectMap(const YAML::Node& node, const std::string& where) {
  if (!node.IsMap()) Fail(where, "expected a mapping");
}

void CheckKeys(const YAML::Node& node, const std::string& where,
               const std::set<std::string>& allowed) {
  ExpectMap(node, where);
  for (const auto& kv : node) {
    const std::string key = kv.first.as<std::string>();
    if (!allowed.count(key)) Fail(where, "unknown key '" + key + "'");
  }
}

double AsReal(const YAML::Node& node, const std::string& where) {
  if (!node.IsScalar()) Fail(where, "expected a number");
  double v;
  try {
    v = node.as<double>();
  } catch (const YAML::Exception&) {
    Fail(where, "expected a number, got '" + node.Scalar() + "'");
  }
  if (!std::isfinite(v)) Fail(where, "must be finite");
  return v;
}

double GetReal(const YAML::Node& map, const std::string& key,
               const std::string& where, double fallback) {
  const YAML::Node n = map[key];
  if (!n) return fallback;
  return AsReal(n, where + "." + key);
}

bool GetBool(const YAML::Node& map, const std::string& key,
             const std::string& where, bool fallback) {
  const YAML::Node n = map[key];
  if (!n) return fallback;
  try {
    return n.as<bool>();
  } catch (const YAML::Exception&) {
    Fail(where + "." + key, "expected true or false");
  }
}

std::string GetString(const YAML::Node& map, const std::string& key,
                      const std::string& where, const std::string& fallback) {
  const YAML::Node n = map[key];
  if (!n) return fallback;
  if (!n.IsScalar()) Fail(where + "." + key, "expected a string");
  return n.Scalar();
}

// A scalar broadcasts to every joint; a list must have exactly n entries.
Vector AsVector(const YAML::Node& node, int n, const std::string& where) {
  if (node.IsScalar()) return Vector::Constant(n, AsReal(node, where));
  if (!node.IsSequence()) Fail(where, "expected a number or a list");
  if (static_cast<int>(node.size()) != n) {
    Fail(where, "expected " + std::to_string(n) + " entries, got " +
                    std::to_string(node.size()));
  }
  Vector v(n);
  for (int i = 0; i < n; ++i) {
    v[i] = AsReal(node[i], where + "[" + std::to_string(i) + "]");
  }
  return v;
}

Vector GetVector(const YAML::Node& map, const std::string& key, int n,
                 const std::string& where, const Vector& fallback) {
  const YAML::Node node = map[key];
  if (!node) return fallback;
  return AsVector(node, n, where + "." + key);
}

// Scalar -> value * I, flat list -> diagonal, list of lists -> dense.
PrecisionMatrix AsPrecision(const YAML::Node& node, int n,
                            const std::string& where) {
  if (node.IsSequence() && node.size() > 0 && node[0].IsSequence()) {
    if (static_cast<int>(node.size()) != n) {
      Fail(where, "expected " + std::to_string(n) + " rows");
    }
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) {
      m.row(i) = AsVector(node[i], n, where).transpose();
    }
    try {
      return PrecisionMatrix::Dense(m);
    } catch (const ContractViolation& e) {
      Fail(where, e.what());
    }
  }
  return PrecisionMatrix::Diagonal(AsVector(node, n, where));
}

PrecisionMatrix GetPrecision(const YAML::Node& map, const std::string& key,
                             int n, const std::string& where,
                             const PrecisionMatrix& fallback) {
  const YAML::Node node = map[key];
  if (!node) return fallback;
  return AsPrecision(node, n, where + "." + key);
}

PlantKind ParsePlantKind(const std::string& s) {
  if (s == "msd") return PlantKind::kMsd;
  if (s == "surrogate_arm") return PlantKind::kSurrogateArm;
  if (s == "two_link") return PlantKind::kTwoLink;
  Fail("plant.kind", "expected msd, surrogate_arm or two_link, got '" + s + "'");
}

ControllerKind ParseControllerKind(const std::string& s) {
  if (s == "aic") return ControllerKind::kAic;
  if (s == "pid") return ControllerKind::kPid;
  if (s == "filter") return ControllerKind::kFilter;
  Fail("controller.kind", "expected aic, pid or filter, got '" + s + "'");
}

void ParsePlant(const YAML::Node& node, EpisodeConfig& ep) {
  if (!node) Fail("plant", "section is required");
  ExpectMap(node, "plant");
  if (!node["kind"]) Fail("plant", "kind is required");
  ep.plant = ParsePlantKind(GetString(node, "kind", "plant", ""));
  switch (ep.plant) {
    case PlantKind::kMsd:
      CheckKeys(node, "plant", {"kind", "k1", "k2", "mass"});
      ep.msd.k1 = GetReal(node, "k1", "plant", ep.msd.k1);
      ep.msd.k2 = GetReal(node, "k2", "plant", ep.msd.k2);
      ep.msd.mass = GetReal(node, "mass", "plant", ep.msd.mass);
      break;
    case PlantKind::kSurrogateArm: {
      CheckKeys(node, "plant",
                {"kind", "inertia", "damping", "gravity_gain", "payload_mass",
                 "payload_coupling"});
      SurrogateArmParams& a = ep.arm;
      a.inertia = GetVector(node, "inertia", 7, "plant", a.inertia);
      a.damping = GetVector(node, "damping", 7, "plant", a.damping);
      a.gravity_gain = GetVector(node, "gravity_gain", 7, "plant", a.gravity_gain);
      a.payload_mass = GetReal(node, "payload_mass", "plant", a.payload_mass);
      a.payload_coupling =
          GetVector(node, "payload_coupling", 7, "plant", a.payload_coupling);
      break;
    }
    case PlantKind::kTwoLink:
      CheckKeys(node, "plant", {"kind", "m1", "m2", "l1", "l2", "g"});
      ep.two_link.m1 = GetReal(node, "m1", "plant", ep.two_link.m1);
      ep.two_link.m2 = GetReal(node, "m2", "plant", ep.two_link.m2);
      ep.two_link.l1 = GetReal(node, "l1", "plant", ep.two_link.l1);
      ep.two_link.l2 = GetReal(node, "l2", "plant", ep.two_link.l2);
      ep.two_link.g = GetReal(node, "g", "plant", ep.two_link.g);
      break;
  }
}

LearningSwitches ParseLearn(const YAML::Node& node, const std::string& where,
                            LearningSwitches fallback) {
  if (!node) return fallback;
  CheckKeys(node, where, {"pi_o", "pi_op", "beta"});
  return {GetBool(node, "pi_o", where, fallback.learn_pi_o),
          GetBool(node, "pi_op", where, fallback.learn_pi_op),
          GetBool(node, "beta", where, fallback.learn_beta)};
}

void ParseController(const YAML::Node& node, EpisodeConfig& ep) {
  if (!node) Fail("controller", "section is required");
  ExpectMap(node, "controller");
  const int n = ep.size();
  ep.controller =
      ParseControllerKind(GetString(node, "kind", "controller", "aic"));
  if (ep.controller == ControllerKind::kPid) {
    CheckKeys(node, "controller",
              {"kind", "p", "i", "d", "form", "matched_pi", "kappa_a", "pi_o",
               "pi_op"});
    if (GetBool(node, "matched_pi", "controller", false)) {
      if (node["p"] || node["i"] || node["d"]) {
        Fail("controller", "matched_pi excludes explicit p, i, d");
      }
      const double kappa_a = GetReal(node, "kappa_a", "controller", 600.0);
      const PrecisionMatrix one = PrecisionMatrix::Scalar(n, 1.0);
      try {
        ep.pid = MatchedPiGains(kappa_a,
                                GetPrecision(node, "pi_o", n, "controller", one),
                                GetPrecision(node, "pi_op", n, "controller", one));
      } catch (const ContractViolation& e) {
        Fail("controller", e.what());
      }
    } else {
      if (node["kappa_a"] || node["pi_o"] || node["pi_op"]) {
        Fail("controller", "kappa_a, pi_o and pi_op need matched_pi: true");
      }
      const Vector zero = Vector::Zero(n);
      ep.pid = {GetVector(node, "p", n, "controller", zero),
                GetVector(node, "i", n, "controller", zero),
                GetVector(node, "d", n, "controller", zero)};
    }
    if (node["form"]) {
      const std::string form = GetString(node, "form", "controller", "");
      if (form == "positional") {
        ep.pid.form = PidForm::kPositional;
      } else if (form == "velocity") {
        ep.pid.form = PidForm::kVelocity;
      } else {
        Fail("controller.form",
             "expected positional or velocity, got '" + form + "'");
      }
    }
    return;
  }
  CheckKeys(node, "controller",
            {"kind", "kappa_mu", "kappa_a", "kappa_sigma", "kappa_tau", "pi_o",
             "pi_op", "pi_mu", "pi_mup", "beta", "learn", "precision_floor",
             "beta_floor", "action_limit", "control", "integrator"});
  AicSettings& s = ep.aic;
  s.gains.kappa_mu = GetReal(node, "kappa_mu", "controller", s.gains.kappa_mu);
  s.gains.kappa_a = GetReal(node, "kappa_a", "controller", s.gains.kappa_a);
  s.gains.kappa_sigma =
      GetReal(node, "kappa_sigma", "controller", s.gains.kappa_sigma);
  s.gains.kappa_tau = GetReal(node, "kappa_tau", "controller", s.gains.kappa_tau);
  const PrecisionMatrix one = PrecisionMatrix::Scalar(n, 1.0);
  s.precisions.pi_o = GetPrecision(node, "pi_o", n, "controller", one);
  s.precisions.pi_op = GetPrecision(node, "pi_op", n, "controller", one);
  s.precisions.pi_mu = GetPrecision(node, "pi_mu", n, "controller", one);
  s.precisions.pi_mup = GetPrecision(node, "pi_mup", n, "controller", one);
  s.beta = {GetVector(node, "beta", n, "controller", Vector::Ones(n))};
  s.switches = ParseLearn(node["learn"], "controller.learn", {});
  s.options.precision_floor = GetReal(node, "precision_floor", "controller",
                                      s.options.precision_floor);
  s.options.beta_floor =
      GetReal(node, "beta_floor", "controller", s.options.beta_floor);
  if (node["action_limit"] && !node["action_limit"].IsNull()) {
    s.options.action_limit = GetReal(node, "action_limit", "controller", 0.0);
  }
  s.control_enabled = GetBool(node, "control", "controller", true);
  const std::string integ =
      GetString(node, "integrator", "controller", "explicit");
  if (integ == "explicit") {
    s.options.integrator = BeliefIntegrator::kExplicit;
  } else if (integ == "implicit") {
    s.options.integrator = BeliefIntegrator::kImplicit;
  } else {
    Fail("controller.integrator", "expected explicit or implicit");
  }
}

std::vector<double> ParseValues(const YAML::Node& node, const std::string& where) {
  if (!node || !node.IsSequence() || node.size() == 0) {
    Fail(where, "values must be a non-empty list");
  }
  std::vector<double> v;
  for (std::size_t i = 0; i < node.size(); ++i) {
    v.push_back(AsReal(node[i], where + "[" + std::to_string(i) + "]"));
  }
  return v;
}

// Every value must produce a valid episode.
void CheckAxis(const EpisodeConfig& ep, const std::string& axis,
               const std::vector<double>& values, const std::string& where) {
  for (double v : values) {
    EpisodeConfig probe = ep;
    try {
      ApplyAxis(probe, axis, v);
      probe.Validate();
    } catch (const ConfigError& e) {
      Fail(where, e.what());
    } catch (const ContractViolation& e) {
      Fail(where, "value " + Real(v) + ": " + e.what());
    }
  }
}

RunConfig ParseRoot(const YAML::Node& root) {
  CheckKeys(root, "config",
            {"name", "seed", "dt", "duration", "rate_divider", "plant",
             "controller", "initial", "belief", "targets", "payloads", "noise",
             "variants", "sweep"});
  RunConfig rc;
  rc.name = GetString(root, "name", "config", "");
  if (rc.name.empty()) Fail("name", "is required");
  for (char ch : rc.name) {
    if (!(std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' ||
          ch == '-' || ch == '.')) {
      Fail("name", "may contain only letters, digits, '_', '-' and '.'");
    }
  }
  if (root["seed"]) {
    try {
      rc.seed = root["seed"].as<std::uint64_t>();
    } catch (const YAML::Exception&) {
      Fail("seed", "expected a non-negative integer");
    }
  }
  EpisodeConfig& ep = rc.episode;
  ep.dt = GetReal(root, "dt", "config", ep.dt);
  ep.duration = GetReal(root, "duration", "config", ep.duration);
  if (root["rate_divider"]) {
    try {
      ep.rate_divider = root["rate_divider"].as<int>();
    } catch (const YAML::Exception&) {
      Fail("rate_divider", "expected an integer");
    }
  }
  ParsePlant(root["plant"], ep);
  const int n = ep.size();
  ParseController(root["controller"], ep);

  const YAML::Node init = root["initial"];
  ep.initial_state = {Vector::Zero(n), Vector::Zero(n), 0.0};
  if (init) {
    CheckKeys(init, "initial", {"q", "q_dot"});
    ep.initial_state.q = GetVector(init, "q", n, "initial", ep.initial_state.q);
    ep.initial_state.q_dot =
        GetVector(init, "q_dot", n, "initial", ep.initial_state.q_dot);
  }
  const YAML::Node belief = root["belief"];
  if (belief) {
    CheckKeys(belief, "belief", {"mu", "mu_p", "mu_pp"});
    GeneralizedBelief b{ep.initial_state.q, ep.initial_state.q_dot,
                        Vector::Zero(n)};
    b.mu = GetVector(belief, "mu", n, "belief", b.mu);
    b.mu_p = GetVector(belief, "mu_p", n, "belief", b.mu_p);
    b.mu_pp = GetVector(belief, "mu_pp", n, "belief", b.mu_pp);
    ep.initial_belief = b;
  }

  const YAML::Node targets = root["targets"];
  if (!targets || !targets.IsSequence() || targets.size() == 0) {
    Fail("targets", "a non-empty list is required");
  }
  ep.targets.clear();
  for (std::size_t i = 0; i < targets.size(); ++i) {
    const std::string where = "targets[" + std::to_string(i) + "]";
    CheckKeys(targets[i], where, {"time", "mu_d"});
    if (!targets[i]["mu_d"]) Fail(where, "mu_d is required");
    ep.targets.push_back({GetReal(targets[i], "time", where, 0.0),
                          AsVector(targets[i]["mu_d"], n, where + ".mu_d")});
  }
  const YAML::Node payloads = root["payloads"];
  if (payloads) {
    if (!payloads.IsSequence()) Fail("payloads", "expected a list");
    for (std::size_t i = 0; i < payloads.size(); ++i) {
      const std::string where = "payloads[" + std::to_string(i) + "]";
      CheckKeys(payloads[i], where, {"time", "mass"});
      ep.payloads.push_back({GetReal(payloads[i], "time", where, 0.0),
                             GetReal(payloads[i], "mass", where, 0.0)});
    }
  }
  const YAML::Node noise = root["noise"];
  if (noise) {
    CheckKeys(noise, "noise", {"sigma_pos", "sigma_vel"});
    ep.noise.sigma_pos = GetReal(noise, "sigma_pos", "noise", ep.noise.sigma_pos);
    ep.noise.sigma_vel = GetReal(noise, "sigma_vel", "noise", ep.noise.sigma_vel);
  }
  ep.noise.seed = DeriveSeed(rc.seed, 0);

  const YAML::Node variants = root["variants"];
  if (variants) {
    CheckKeys(variants, "variants", {"axis", "values"});
    VariantSpec v{GetString(variants, "axis", "variants", ""),
                  ParseValues(variants["values"], "variants.values")};
    CheckAxis(ep, v.axis, v.values, "variants.axis");
    rc.variants = v;
  }
  const YAML::Node sweep = root["sweep"];
  if (sweep) {
    if (variants) Fail("config", "variants and sweep are mutually exclusive");
    CheckKeys(sweep, "sweep", {"axis", "values", "paired", "learn"});
    SweepSpec s;
    s.axis = GetString(sweep, "axis", "sweep", "");
    s.values = ParseValues(sweep["values"], "sweep.values");
    s.paired = GetBool(sweep, "paired", "sweep", false);
    s.learn = ParseLearn(sweep["learn"], "sweep.learn", s.learn);
    CheckAxis(ep, s.axis, s.values, "sweep.axis");
    rc.sweep = s;
  }

  try {
    ep.Validate();
  } catch (const ContractViolation& e) {
    throw ConfigError(std::string("invalid episode: ") + e.what());
  }
  return rc;
}

// ---------------------------------------------------------------------------
// Canonical serialization

std::string Real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string Flow(const Vector& v) {
  std::string s = "[";
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) s += ", ";
    s += Real(v[i]);
  }
  return s + "]";
}

std::string FlowPrecision(const PrecisionMatrix& p) {
  if (p.is_diagonal()) return Flow(p.diagonal());
  const Matrix m = p.dense();
  std::string s = "[";
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    if (i) s += ", ";
    s += Flow(m.row(i).transpose());
  }
  return s + "]";
}

std::string Bool(bool b) { return b ? "true" : "false"; }

std::string FlowLearn(const LearningSwitches& l) {
  return "{pi_o: " + Bool(l.learn_pi_o) + ", pi_op: " + Bool(l.learn_pi_op) +
         ", beta: " + Bool(l.learn_beta) + "}";
}

std::string FlowValues(const std::vector<double>& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ", ";
    s += Real(v[i]);
  }
  return s + "]";
}

std::uint64_t Fnv1a(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

RunConfig ParseConfig(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("malformed YAML: ") + e.what());
  }
  if (!root || root.IsNull()) throw ConfigError("config is empty");
  try {
    return ParseRoot(root);
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
}

RunConfig LoadConfig(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigNotFound("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ParseConfig(ss.str());
}

std::string SerializeConfig(const RunConfig& rc) {
  const EpisodeConfig& ep = rc.episode;
  std::ostringstream os;
  os << "name: " << rc.name << "\n";
  os << "seed: " << rc.seed << "\n";
  os << "dt: " << Real(ep.dt) << "\n";
  os << "duration: " << Real(ep.duration) << "\n";
  os << "rate_divider: " << ep.rate_divider << "\n";
  os << "plant:\n  kind: " << PlantKindName(ep.plant) << "\n";
  switch (ep.plant) {
    case PlantKind::kMsd:
      os << "  k1: " << Real(ep.msd.k1) << "\n  k2: " << Real(ep.msd.k2)
         << "\n  mass: " << Real(ep.msd.mass) << "\n";
      break;
    case PlantKind::kSurrogateArm:
      os << "  inertia: " << Flow(ep.arm.inertia) << "\n";
      os << "  damping: " << Flow(ep.arm.damping) << "\n";
      os << "  gravity_gain: " << Flow(ep.arm.gravity_gain) << "\n";
      os << "  payload_mass: " << Real(ep.arm.payload_mass) << "\n";
      os << "  payload_coupling: " << Flow(ep.arm.payload_coupling) << "\n";
      break;
    case PlantKind::kTwoLink:
      os << "  m1: " << Real(ep.two_link.m1) << "\n  m2: " << Real(ep.two_link.m2)
         << "\n  l1: " << Real(ep.two_link.l1) << "\n  l2: "
         << Real(ep.two_link.l2) << "\n  g: " << Real(ep.two_link.g) << "\n";
      break;
  }
  os << "controller:\n  kind: " << ControllerKindName(ep.controller) << "\n";
  if (ep.controller == ControllerKind::kPid) {
    os << "  p: " << Flow(ep.pid.p) << "\n  i: " << Flow(ep.pid.i)
       << "\n  d: " << Flow(ep.pid.d) << "\n  form: "
       << (ep.pid.form == PidForm::kVelocity ? "velocity" : "positional")
       << "\n";
  } else {
    const AicSettings& s = ep.aic;
    os << "  kappa_mu: " << Real(s.gains.kappa_mu) << "\n";
    os << "  kappa_a: " << Real(s.gains.kappa_a) << "\n";
    os << "  kappa_sigma: " << Real(s.gains.kappa_sigma) << "\n";
    os << "  kappa_tau: " << Real(s.gains.kappa_tau) << "\n";
    os << "  pi_o: " << FlowPrecision(s.precisions.pi_o) << "\n";
    os << "  pi_op: " << FlowPrecision(s.precisions.pi_op) << "\n";
    os << "  pi_mu: " << FlowPrecision(s.precisions.pi_mu) << "\n";
    os << "  pi_mup: " << FlowPrecision(s.precisions.pi_mup) << "\n";
    os << "  beta: " << Flow(s.beta.beta) << "\n";
    os << "  learn: " << FlowLearn(s.switches) << "\n";
    os << "  precision_floor: " << Real(s.options.precision_floor) << "\n";
    os << "  beta_floor: " << Real(s.options.beta_floor) << "\n";
    os << "  action_limit: "
       << (s.options.action_limit ? Real(*s.options.action_limit) : "null")
       << "\n";
    os << "  control: " << Bool(s.control_enabled) << "\n";
    os << "  integrator: "
       << (s.options.integrator == BeliefIntegrator::kImplicit ? "implicit"
                                                               : "explicit")
       << "\n";
  }
  os << "initial:\n  q: " << Flow(ep.initial_state.q)
     << "\n  q_dot: " << Flow(ep.initial_state.q_dot) << "\n";
  if (ep.initial_belief) {
    os << "belief:\n  mu: " << Flow(ep.initial_belief->mu)
       << "\n  mu_p: " << Flow(ep.initial_belief->mu_p)
       << "\n  mu_pp: " << Flow(ep.initial_belief->mu_pp) << "\n";
  }
  os << "targets:\n";
  for (const TargetWaypoint& w : ep.targets) {
    os << "  - {time: " << Real(w.time) << ", mu_d: " << Flow(w.mu_d) << "}\n";
  }
  os << "payloads:";
  if (ep.payloads.empty()) os << " []";
  os << "\n";
  for (const PayloadEvent& p : ep.payloads) {
    os << "  - {time: " << Real(p.time) << ", mass: " << Real(p.mass) << "}\n";
  }
  os << "noise:\n  sigma_pos: " << Real(ep.noise.sigma_pos)
     << "\n  sigma_vel: " << Real(ep.noise.sigma_vel) << "\n";
  if (rc.variants) {
    os << "variants:\n  axis: " << rc.variants->axis
       << "\n  values: " << FlowValues(rc.variants->values) << "\n";
  }
  if (rc.sweep) {
    os << "sweep:\n  axis: " << rc.sweep->axis
       << "\n  values: " << FlowValues(rc.sweep->values)
       << "\n  paired: " << Bool(rc.sweep->paired)
       << "\n  learn: " << FlowLearn(rc.sweep->learn) << "\n";
  }
  return os.str();
}

std::uint64_t ConfigHash(const RunConfig& config) {
  return Fnv1a(SerializeConfig(config));
}

std::string HashHex(std::uint64_t hash) {
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(hash));
  return buf;
}

std::uint64_t DeriveSeed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + index + 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::vector<std::string> KnownAxes() {
  return {"controller.pi_o",        "controller.pi_op",
          "controller.pi_mu",       "controller.pi_mup",
          "controller.beta",        "controller.kappa_mu",
          "controller.kappa_a",     "controller.kappa_sigma",
          "controller.kappa_tau",   "controller.learn_mode",
          "payload.mass",
          "noise.sigma_pos",        "noise.sigma_vel",
          "plant.k1",               "plant.k2"};
}

void ApplyAxis(EpisodeConfig& ep, const std::string& axis_in, double value) {
  std::string axis = axis_in;
  // "controller.pi_mu_scale" is accepted as a synonym for "controller.pi_mu".
  const std::string suffix = "_scale";
  if (axis.size() > suffix.size() &&
      axis.compare(axis.size() - suffix.size(), suffix.size(), suffix) == 0) {
    axis.resize(axis.size() - suffix.size());
  }
  const int n = ep.size();
  AicSettings& s = ep.aic;
  const bool aic = ep.controller != ControllerKind::kPid;
  auto need_aic = [&]() {
    if (!aic) throw ConfigError("axis '" + axis_in + "' needs an aic controller");
  };
  if (axis == "controller.pi_o") {
    need_aic();
    s.precisions.pi_o = PrecisionMatrix::Scalar(n, value);
  } else if (axis == "controller.pi_op") {
    need_aic();
    s.precisions.pi_op = PrecisionMatrix::Scalar(n, value);
  } else if (axis == "controller.pi_mu") {
    need_aic();
    s.precisions.pi_mu = PrecisionMatrix::Scalar(n, value);
  } else if (axis == "controller.pi_mup") {
    need_aic();
    s.precisions.pi_mup = PrecisionMatrix::Scalar(n, value);
  } else if (axis == "controller.beta") {
    need_aic();
    s.beta = TemporalScale::Uniform(n, value);
  } else if (axis == "controller.kappa_mu") {
    need_aic();
    s.gains.kappa_mu = value;
  } else if (axis == "controller.kappa_a") {
    need_aic();
    s.gains.kappa_a = value;
  } else if (axis == "controller.kappa_sigma") {
    need_aic();
    s.gains.kappa_sigma = value;
  } else if (axis == "controller.kappa_tau") {
    need_aic();
    s.gains.kappa_tau = value;
  } else if (axis == "controller.learn_mode") {
    // 0: frozen, 1: observation precisions, 2: beta, 3: both.
    need_aic();
    const int mode = static_cast<int>(value);
    if (mode != value || mode < 0 || mode > 3) {
      throw ConfigError("controller.learn_mode must be 0, 1, 2 or 3");
    }
    s.switches = {(mode & 1) != 0, (mode & 1) != 0, (mode & 2) != 0};
  } else if (axis == "payload.mass") {
    if (ep.plant != PlantKind::kSurrogateArm) {
      throw ConfigError("axis 'payload.mass' needs the surrogate arm");
    }
    if (ep.payloads.empty()) {
      throw ConfigError("axis 'payload.mass' needs a payload schedule");
    }
    for (PayloadEvent& p : ep.payloads) {
      if (p.mass > 0.0) p.mass = value;
    }
  } else if (axis == "noise.sigma_pos") {
    ep.noise.sigma_pos = value;
  } else if (axis == "noise.sigma_vel") {
    ep.noise.sigma_vel = value;
  } else if (axis == "plant.k1" && ep.plant == PlantKind::kMsd) {
    ep.msd.k1 = value;
  } else if (axis == "plant.k2" && ep.plant == PlantKind::kMsd) {
    ep.msd.k2 = value;
  } else {
    throw ConfigError("unknown axis '" + axis_in + "'");
  }
}

}  // namespace aic
