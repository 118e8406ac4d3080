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

// aic_cli run <config> | sweep <config> | gradcheck

#include <cstdint>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "aic/harness.h"

int main(int argc, char** argv) {
  CLI::App app{"Active inference controller experiments"};
  app.set_version_flag("--version", std::string(aic::kToolVersion));
  app.require_subcommand(1);

  aic::HarnessOptions options;
  std::string config_path;
  std::uint64_t seed = 0;
  bool inject_sign_flip = false;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("config", config_path, "Experiment config file")->required();
    sub->add_option("--out", options.out_dir,
                    "Output directory (default: $AIC_OUT_DIR/<name>)");
    sub->add_option("--workers", options.workers, "Parallel episodes")
        ->check(CLI::PositiveNumber);
    sub->add_option("--seed-override", seed, "Replace the config seed");
    sub->add_flag("--emit-plots", options.emit_plots, "Write SVG line plots");
  };

  CLI::App* run = app.add_subcommand("run", "Run one config");
  add_common(run);
  CLI::App* sweep = app.add_subcommand("sweep", "Run a parameter sweep");
  add_common(sweep);
  sweep->add_flag("--write-trajectories", options.write_trajectories,
                  "Also write one CSV per episode");
  CLI::App* gradcheck =
      app.add_subcommand("gradcheck", "Check analytic gradients against FD");
  // Mutation canary for the test suite.
  gradcheck->add_flag("--inject-sign-flip", inject_sign_flip)
      ->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : aic::kExitSchema;
  }
  for (CLI::App* sub : {run, sweep}) {
    if (sub->count("--seed-override")) options.seed_override = seed;
  }

  if (*run) return aic::RunCommand(config_path, options, std::cout, std::cerr);
  if (*sweep) {
    return aic::SweepCommand(config_path, options, std::cout, std::cerr);
  }
  return aic::GradcheckCommand(inject_sign_flip, std::cout, std::cerr);
}
