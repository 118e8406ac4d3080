# Copyright 2026 The aicontrol Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.


"""Active inference control: free energy, controller, plants and experiments."""

from aicontrol._core import (
    Belief,
    ConfigError,
    Config,
    ContractViolation,
    Controller,
    DivergenceError,
    DomainError,
    Errors,
    Gains,
    Learning,
    Observation,
    Precisions,
    __version__,
    central_difference,
    compute_errors,
    free_energy,
    grad_belief,
    grad_beta,
    grad_precision,
    gradcheck,
    load_config,
    matched_pi_gains,
    msd_step,
    parse_config,
    run,
    run_episode,
    sweep,
    two_link_energy,
)

__all__ = [
    "Belief",
    "Config",
    "ConfigError",
    "ContractViolation",
    "Controller",
    "DivergenceError",
    "DomainError",
    "Errors",
    "Gains",
    "Learning",
    "Observation",
    "Precisions",
    "__version__",
    "central_difference",
    "compute_errors",
    "free_energy",
    "grad_belief",
    "grad_beta",
    "grad_precision",
    "gradcheck",
    "load_config",
    "matched_pi_gains",
    "msd_step",
    "parse_config",
    "run",
    "run_episode",
    "sweep",
    "two_link_energy",
]
