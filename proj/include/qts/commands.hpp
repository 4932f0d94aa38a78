// Copyright 2026 The QTS Tomography Authors
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

// commands.hpp - the spectrum / sweep / evolve / validate experiments as
// library calls, so the CLI is only argument handling.

#pragma once

#include "qts/config.hpp"
#include "qts/output.hpp"

#include <string>
#include <vector>

namespace qts {

struct CommandResult {
    std::string command;
    std::vector<Table> tables;
    std::vector<std::string> warnings;
    std::vector<std::string> summary;  // human-readable lines for stdout
};

LanczosOptions lanczos_options(const RunConfig& cfg);
SweepSpec sweep_spec(const RunConfig& cfg);

// Rate matrix of the evolve experiment: both manifolds for the configured
// kink position, truncated to states within 5W of resonance with the
// initial down ground state or below.
struct EvolveSetup {
    RateMatrix rates;
    double epsilon = 0.0;  // probe bias used (GHz)
    double gamma0 = 0.0;   // escape rate of the initial state (1/ns)
    std::vector<double> times;
};

EvolveSetup prepare_evolve(const RunConfig& cfg);

CommandResult spectrum_command(const RunConfig& cfg);
CommandResult sweep_command(const RunConfig& cfg);
CommandResult evolve_command(const RunConfig& cfg);
CommandResult validate_command(const RunConfig& cfg);

std::vector<std::string> output_header(const RunConfig& cfg, const CommandResult& result);

// One file per table in `dir`: <name>.csv or <name>.json.
void write_outputs(const RunConfig& cfg, const CommandResult& result, const std::string& dir);

}  // namespace qts
