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

// Central-difference gradients and the randomized battery that checks every
// analytic free-energy gradient against them.

#ifndef AIC_FD_ORACLE_H_
#define AIC_FD_ORACLE_H_

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "aic/gm_core.h"

namespace aic {

inline constexpr double kDefaultFdStep = 1e-6;

class OracleFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using ScalarFunction = std::function<double(const Vector&)>;

// (f(x + h e_i) - f(x - h e_i)) / 2h for every coordinate i.
Vector CentralDifference(const ScalarFunction& f, const Vector& point,
                         double step = kDefaultFdStep);

// Relative error with an absolute floor: |a - b| / max(|a|, |b|), except that
// pairs whose magnitude is below `small` are compared absolutely.
double GradientError(double analytic, double numeric, double small = 1e-6);

struct GradcheckFamilyResult {
  std::string family;  // "belief", "precision" or "beta"
  int configurations = 0;
  double worst_error = 0.0;
  std::string worst_configuration;  // human-readable dump of the worst case
};

struct GradcheckOptions {
  int configurations_per_dimension = 100;
  std::vector<int> dimensions = {1, 2, 7};
  std::uint64_t seed = 20201;
  double step = kDefaultFdStep;
  // Negates the analytic belief gradient. Used only to prove the battery
  // can fail.
  bool inject_sign_flip = false;
};

// Randomized configurations: entries in [-2, 2], precision diagonals in
// [0.1, 5], beta diagonals in [0.5, 2].
std::vector<GradcheckFamilyResult> RunGradcheck(const GradcheckOptions& options);

}  // namespace aic

#endif  // AIC_FD_ORACLE_H_
