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

// Experiment configuration files (YAML). The schema is documented in
// docs/config_schema.md.

#ifndef AIC_CONFIG_H_
#define AIC_CONFIG_H_

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "aic/episode.h"

namespace aic {

// The config file could not be opened.
class ConfigNotFound : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Runs one episode per value of a scalar axis (e.g. a beta grid).
struct VariantSpec {
  std::string axis;
  std::vector<double> values;
};

struct SweepSpec {
  std::string axis;
  std::vector<double> values;
  // Run every value twice: all learning off, then with `learn`.
  bool paired = false;
  LearningSwitches learn{true, true, true};
};

struct RunConfig {
  std::string name;
  std::uint64_t seed = 1;
  EpisodeConfig episode;  // noise.seed is filled in per episode
  std::optional<VariantSpec> variants;
  std::optional<SweepSpec> sweep;
};

// Throws ConfigError on any schema violation, including unknown keys.
RunConfig ParseConfig(const std::string& text);
// Throws ConfigNotFound, then as ParseConfig.
RunConfig LoadConfig(const std::string& path);

// Canonical normal form: fixed key order, every field explicit, reals at 17
// significant digits. Parsing the output yields an identical config.
std::string SerializeConfig(const RunConfig& config);

// FNV-1a 64 of the canonical form.
std::uint64_t ConfigHash(const RunConfig& config);
std::string HashHex(std::uint64_t hash);

// Counter-based per-episode seed: splitmix64(seed + index).
std::uint64_t DeriveSeed(std::uint64_t seed, std::uint64_t index);

// Sets one scalar parameter. Precision and beta axes set value * I.
// Throws ConfigError for an unknown axis.
void ApplyAxis(EpisodeConfig& episode, const std::string& axis, double value);
std::vector<std::string> KnownAxes();

}  // namespace aic

#endif  // AIC_CONFIG_H_
