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

// output.hpp - numeric tables and their CSV / JSON renderings. Floating-point
// values are written with 17 significant digits so files round-trip exactly.

#pragma once

#include "qts/eigensolver.hpp"
#include "qts/master_equation.hpp"
#include "qts/tomography.hpp"

#include <string>
#include <vector>

namespace qts {

struct Table {
    std::string name;  // file stem
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

std::string format_number(double v);

// '#'-prefixed header lines, a column line, then one line per row.
std::string render_csv(const Table& table, const std::vector<std::string>& header);
// {"header": [...], "columns": [...], "rows": [[...], ...]}
std::string render_tree(const Table& table, const std::vector<std::string>& header);

Table spectrum_table(const EigenSet<double>& set);
// Columns: l, epsilon_ghz, epsilon_rel_ghz, gamma_over_deltap_sq, gamma_normalized.
Table grid_table(const TomographyGrid& grid, bool normalize);
Table peaks_table(const PeakSet& peaks);
Table amplitudes_table(const SweepResult& sweep, const AmplitudeMap& map);
Table references_table(const std::vector<ReferenceColumn>& columns);
Table trajectory_table(const std::vector<PopulationState>& states);

}  // namespace qts
