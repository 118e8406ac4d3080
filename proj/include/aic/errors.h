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

#ifndef AIC_ERRORS_H_
#define AIC_ERRORS_H_

#include <cstdint>
#include <stdexcept>
#include <string>

namespace aic {

// Mismatched dimensions or a violated precondition on the caller's side.
class ContractViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A quantity is mathematically undefined at the given input, e.g. the
// log-determinant of a matrix that is not positive definite.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A non-finite number appeared in controller or plant state.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(const std::string& what, std::int64_t tick = -1)
      : std::runtime_error(what), tick_(tick) {}

  std::int64_t tick() const { return tick_; }

 private:
  std::int64_t tick_;
};

// Configuration text that does not match the schema.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace aic

#endif  // AIC_ERRORS_H_
