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

// config.hpp - run configuration (INI text with [model], [probe], [bath],
// [experiment] and [output] sections) and the built-in presets.

#pragma once

#include "qts/bath.hpp"
#include "qts/master_equation.hpp"
#include "qts/model.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace qts {

enum class OutputFormat { Table, Tree };

struct EpsilonRange {
    double min = 0.0;
    double max = 0.0;
    double step = 0.0;

    std::vector<double> points() const;
};

struct RunConfig {
    // [model]
    std::string model_kind = "kink";  // kink | explicit
    double chain_j = 0.0;             // kink shorthand
    double chain_delta = 0.0;
    ModelSpec model;

    // [probe]
    double jp = 0.0;
    double delta_p = 1.0;
    std::optional<EpsilonRange> epsilon;  // unset: automatic grid
    std::size_t levels = 4;

    // [bath]
    BathParams bath;
    double width_mk = 0.0;        // FDT mode inputs, zero otherwise
    double temperature_mk = 0.0;
    RateModel rate_model = RateModel::Marcus;

    // [experiment]
    std::vector<std::size_t> positions;  // empty: all N+1
    Eigen::Index k = 0;                  // eigenpairs; 0 = automatic
    std::uint64_t seed = 0;
    double tol = 1e-10;
    std::size_t dense_limit = 10;
    bool peaks = true;
    std::optional<double> evolve_epsilon;  // unset: ground-state peak
    std::size_t evolve_position = 1;
    std::optional<double> t_max;           // unset: 10 / Gamma_0
    std::size_t t_points = 201;

    // [output]
    std::string out_dir = "out";
    OutputFormat format = OutputFormat::Table;
    bool normalize = true;

    // Runtime only, never echoed.
    std::size_t threads = 1;

    // Resolved configuration as INI lines, every default filled in.
    std::vector<std::string> resolved() const;
};

// Every problem found while parsing, not just the first.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(std::vector<std::string> errors);
    const std::vector<std::string>& errors() const noexcept { return errors_; }

private:
    std::vector<std::string> errors_;
};

RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::string& path);

// Built-in presets: fig3 (N=7 chain), fig4 (N=16 chain), smoke (one qubit).
std::vector<std::string> preset_names();
std::string preset_text(std::string_view name);
RunConfig preset_config(std::string_view name);

}  // namespace qts
