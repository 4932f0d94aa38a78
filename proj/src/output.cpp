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

#include "qts/output.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <limits>

namespace qts {

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (v == 0.0) return "0";  // folds -0
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string render_csv(const Table& table, const std::vector<std::string>& header) {
    std::string s;
    for (const auto& h : header) s += "# " + h + "\n";
    for (std::size_t c = 0; c < table.columns.size(); ++c) s += (c ? "," : "") + table.columns[c];
    s += "\n";
    for (const auto& row : table.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) s += (c ? "," : "") + format_number(row[c]);
        s += "\n";
    }
    return s;
}

std::string render_tree(const Table& table, const std::vector<std::string>& header) {
    nlohmann::ordered_json doc;
    doc["header"] = header;
    doc["columns"] = table.columns;
    auto rows = nlohmann::ordered_json::array();
    for (const auto& row : table.rows) {
        auto r = nlohmann::ordered_json::array();
        for (double v : row) {
            if (std::isfinite(v)) {
                r.push_back(v);
            } else {
                r.push_back(nullptr);
            }
        }
        rows.push_back(std::move(r));
    }
    doc["rows"] = std::move(rows);
    return doc.dump(1) + "\n";
}

Table spectrum_table(const EigenSet<double>& set) {
    Table t{"spectrum", {"n", "energy_ghz", "energy_rel_ghz", "residual"}, {}};
    for (Eigen::Index i = 0; i < set.size(); ++i) {
        t.rows.push_back({static_cast<double>(i), set.eigenvalues(i), set.eigenvalues(i) - set.eigenvalues(0),
                          set.residuals(i)});
    }
    return t;
}

Table grid_table(const TomographyGrid& grid, bool normalize) {
    Table t{"grid", {"l", "epsilon_ghz", "epsilon_rel_ghz", "gamma_over_deltap_sq", "gamma_normalized"}, {}};
    const double m = grid.max_rate();
    for (Eigen::Index r = 0; r < grid.rate.rows(); ++r) {
        for (Eigen::Index j = 0; j < grid.rate.cols(); ++j) {
            const double g = grid.rate(r, j);
            t.rows.push_back({static_cast<double>(grid.positions[static_cast<std::size_t>(r)]), grid.epsilon(r, j),
                              grid.epsilon_rel(r, j), g,
                              normalize && m > 0.0 ? g / m : std::numeric_limits<double>::quiet_NaN()});
        }
    }
    return t;
}

Table peaks_table(const PeakSet& peaks) {
    Table t{"peaks",
            {"l", "n", "epsilon_ghz", "epsilon_rel_ghz", "predicted_ghz", "height", "width_ghz", "multiplicity",
             "resolved"},
            {}};
    auto add = [&](const Peak& p) {
        t.rows.push_back({static_cast<double>(p.l), static_cast<double>(p.level), p.epsilon, p.epsilon_rel,
                          p.level >= 0 ? p.predicted : std::numeric_limits<double>::quiet_NaN(), p.height, p.width,
                          static_cast<double>(p.multiplicity), p.resolved ? 1.0 : 0.0});
    };
    for (const auto& p : peaks.peaks) add(p);
    for (const auto& p : peaks.unmatched) add(p);  // n = -1
    return t;
}

Table amplitudes_table(const SweepResult& sweep, const AmplitudeMap& map) {
    Table t{"amplitudes",
            {"n", "l", "amplitude_sq", "raw_amplitude_sq", "fidelity", "direct_amplitude_sq", "resolved",
             "multiplicity"},
            {}};
    const Eigen::MatrixXd direct =
        direct_kink_amplitudes(sweep.up, sweep.n_qubits, static_cast<std::size_t>(sweep.up.size()));
    for (Eigen::Index n = 0; n < map.amplitude_sq.rows(); ++n) {
        // Direct value of a level: cluster-summed over its members.
        const auto& cl = sweep.levels[static_cast<std::size_t>(n)];
        for (Eigen::Index c = 0; c < map.amplitude_sq.cols(); ++c) {
            const std::size_t l = map.positions[static_cast<std::size_t>(c)];
            const double d = direct.block(cl.first, static_cast<Eigen::Index>(l - 1), cl.count, 1).squaredNorm();
            t.rows.push_back({static_cast<double>(n), static_cast<double>(l), map.amplitude_sq(n, c), map.raw(n, c),
                              map.fidelity(c), d, static_cast<double>(map.resolved(n, c)),
                              static_cast<double>(map.multiplicity(n, c))});
        }
    }
    return t;
}

Table references_table(const std::vector<ReferenceColumn>& columns) {
    Table t{"references", {"l", "fidelity", "gap_ghz", "ground_energy_ghz", "overlap_sum", "flagged"}, {}};
    for (const auto& c : columns) {
        t.rows.push_back({static_cast<double>(c.l), c.report.fidelity, c.report.gap, c.report.ground_energy,
                          c.up_overlaps.size() ? c.up_overlaps.sum() : std::numeric_limits<double>::quiet_NaN(),
                          c.report.flagged ? 1.0 : 0.0});
    }
    return t;
}

Table trajectory_table(const std::vector<PopulationState>& states) {
    Table t{"trajectory", {"t_ns"}, {}};
    if (!states.empty()) {
        for (Eigen::Index i = 0; i < states.front().probabilities.size(); ++i) {
            t.columns.push_back("p_" + std::to_string(i));
        }
    }
    for (const auto& s : states) {
        std::vector<double> row{s.time};
        for (Eigen::Index i = 0; i < s.probabilities.size(); ++i) row.push_back(s.probabilities(i));
        t.rows.push_back(std::move(row));
    }
    return t;
}

}  // namespace qts
