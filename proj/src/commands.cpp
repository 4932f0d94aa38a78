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

#include "qts/commands.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>

#ifndef QTS_VERSION
#define QTS_VERSION "unknown"
#endif

namespace qts {

LanczosOptions lanczos_options(const RunConfig& cfg) {
    LanczosOptions o;
    o.tol = cfg.tol;
    o.seed = cfg.seed;
    return o;
}

SweepSpec sweep_spec(const RunConfig& cfg) {
    SweepSpec s;
    s.jp = cfg.jp;
    s.delta_p = cfg.delta_p;
    s.positions = cfg.positions;
    if (cfg.epsilon) s.epsilon = cfg.epsilon->points();
    s.levels = cfg.levels;
    s.retained = cfg.k;
    s.rate_model = cfg.rate_model;
    s.lanczos = lanczos_options(cfg);
    s.dense_limit = cfg.dense_limit;
    s.threads = cfg.threads;
    return s;
}

CommandResult spectrum_command(const RunConfig& cfg) {
    const PauliSum h = build_source_hamiltonian(cfg.model);
    const auto dim = static_cast<Eigen::Index>(h.dimension());
    const Eigen::Index k = std::min<Eigen::Index>(cfg.k > 0 ? cfg.k : 10, dim);
    const EigenSet<double> set = lowest_eigenpairs<double>(h, k, lanczos_options(cfg), cfg.dense_limit);

    CommandResult r;
    r.command = "spectrum";
    r.tables.push_back(spectrum_table(set));
    r.summary.push_back(std::to_string(set.size()) + " eigenpairs, max residual " + format_number(set.max_residual()));
    return r;
}

CommandResult sweep_command(const RunConfig& cfg) {
    const SweepResult sweep = run_sweep(cfg.model, sweep_spec(cfg), cfg.bath);

    CommandResult r;
    r.command = "sweep";
    r.warnings = sweep.warnings;
    r.tables.push_back(grid_table(sweep.grid, cfg.normalize));
    r.tables.push_back(references_table(sweep.columns));
    r.tables.push_back(spectrum_table(sweep.up));
    if (cfg.peaks) {
        const PeakSet peaks = extract_peaks(sweep);
        r.tables.push_back(peaks_table(peaks));
        r.tables.push_back(amplitudes_table(sweep, reconstruct_amplitudes(sweep, peaks)));
        std::size_t unresolved = 0;
        for (const auto& p : peaks.peaks) unresolved += p.resolved ? 0 : 1;
        r.summary.push_back(std::to_string(peaks.peaks.size()) + " matched peaks (" + std::to_string(unresolved) +
                            " unresolved), " + std::to_string(peaks.unmatched.size()) + " unmatched maxima");
    }
    r.summary.insert(r.summary.begin(), std::to_string(sweep.grid.positions.size()) + " positions x " +
                                            std::to_string(sweep.grid.epsilon.cols()) + " bias points, " +
                                            std::to_string(sweep.up.size()) + " retained up-states");
    return r;
}

EvolveSetup prepare_evolve(const RunConfig& cfg) {
    const std::size_t n = cfg.model.n_qubits;
    const PauliSum source = build_source_hamiltonian(cfg.model);
    const ProbeCoupling pc = coupler_for_kink(n, cfg.evolve_position, cfg.jp, cfg.delta_p);
    const PauliSum down_h = build_down_hamiltonian(source, build_coupling(pc));
    const auto dim = static_cast<Eigen::Index>(source.dimension());
    const Eigen::Index k = n <= cfg.dense_limit ? dim : std::min<Eigen::Index>(cfg.k > 0 ? cfg.k : 10, dim);
    const LanczosOptions lo = lanczos_options(cfg);
    const EigenSet<double> up = lowest_eigenpairs<double>(source, k, lo, cfg.dense_limit);
    const EigenSet<double> down = lowest_eigenpairs<double>(down_h, k, lo, cfg.dense_limit);

    const BathParams& bath = cfg.bath;
    EvolveSetup s;
    s.epsilon = cfg.evolve_epsilon.value_or(up.eigenvalues(0) - down.eigenvalues(0) + bath.reorganization);

    // Up-states up to 5W above resonance with the initial state, then the
    // down-states those can reach within 5W.
    const double up_top = down.eigenvalues(0) + s.epsilon - bath.reorganization + 5.0 * bath.width;
    Eigen::Index n_up = 1;
    while (n_up < up.size() && up.eigenvalues(n_up) <= up_top) ++n_up;
    const double down_top = up.eigenvalues(n_up - 1) - bath.reorganization + 5.0 * bath.width - s.epsilon;
    Eigen::Index n_down = 1;
    while (n_down < down.size() && down.eigenvalues(n_down) <= down_top) ++n_down;
    // Keep degenerate clusters whole.
    while (n_up < up.size() && up.eigenvalues(n_up) - up.eigenvalues(n_up - 1) < kClusterSpacing) ++n_up;
    while (n_down < down.size() && down.eigenvalues(n_down) - down.eigenvalues(n_down - 1) < kClusterSpacing) {
        ++n_down;
    }

    const Eigen::MatrixXd overlap = (up.eigenvectors.leftCols(n_up).transpose() * down.eigenvectors.leftCols(n_down))
                                        .cwiseAbs2();
    s.rates = assemble_rates(up.eigenvalues.head(n_up), down.eigenvalues.head(n_down), overlap, s.epsilon, bath,
                             cfg.rate_model, cfg.delta_p);
    s.gamma0 = escape_rate(s.rates, 0);

    const double t_max = cfg.t_max.value_or(s.gamma0 > 0.0 ? 10.0 / s.gamma0 : 1.0);
    for (std::size_t i = 0; i < cfg.t_points; ++i) {
        s.times.push_back(t_max * static_cast<double>(i) / static_cast<double>(cfg.t_points - 1));
    }
    return s;
}

CommandResult evolve_command(const RunConfig& cfg) {
    const EvolveSetup s = prepare_evolve(cfg);
    PopulationState p0;
    p0.probabilities = Eigen::VectorXd::Zero(s.rates.size());
    p0.probabilities(0) = 1.0;
    const auto traj = evolve(s.rates, p0, s.times);

    CommandResult r;
    r.command = "evolve";
    r.tables.push_back(trajectory_table(traj));
    r.summary.push_back("epsilon " + format_number(s.epsilon) + " GHz, Gamma_0 " + format_number(s.gamma0) +
                        " 1/ns, " + std::to_string(s.rates.n_down()) + " down + " + std::to_string(s.rates.n_up()) +
                        " up states");
    if (s.gamma0 == 0.0) r.warnings.push_back("initial state has zero escape rate");
    return r;
}

CommandResult validate_command(const RunConfig& cfg) {
    const std::size_t n = cfg.model.n_qubits;
    std::vector<std::size_t> positions = cfg.positions;
    if (positions.empty()) {
        for (std::size_t l = 1; l <= n + 1; ++l) positions.push_back(l);
    }
    CommandResult r;
    r.command = "validate";
    std::vector<ReferenceColumn> columns;
    for (std::size_t l : positions) {
        ReferenceColumn c;
        c.l = l;
        c.report = verify_reference<double>(cfg.model, coupler_for_kink(n, l, cfg.jp, cfg.delta_p),
                                            kink_reference_state<double>(n, l), cfg.bath.width, 0.9,
                                            lanczos_options(cfg), cfg.dense_limit);
        if (c.report.flagged) r.warnings.push_back("l=" + std::to_string(l) + ": " + c.report.reason);
        columns.push_back(std::move(c));
    }
    r.tables.push_back(references_table(columns));
    r.summary.push_back("configuration valid; " + std::to_string(r.warnings.size()) + " of " +
                        std::to_string(positions.size()) + " reference states flagged");
    return r;
}

std::vector<std::string> output_header(const RunConfig& cfg, const CommandResult& result) {
    std::vector<std::string> h;
    h.push_back(std::string("qts ") + QTS_VERSION);
    h.push_back("command: " + result.command);
    for (const auto& line : cfg.resolved()) h.push_back("config: " + line);
    for (const auto& w : result.warnings) h.push_back("warning: " + w);
    return h;
}

void write_outputs(const RunConfig& cfg, const CommandResult& result, const std::string& dir) {
    std::filesystem::create_directories(dir);
    const auto header = output_header(cfg, result);
    for (const auto& t : result.tables) {
        const bool tree = cfg.format == OutputFormat::Tree;
        const auto path = std::filesystem::path(dir) / (t.name + (tree ? ".json" : ".csv"));
        std::ofstream out(path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + path.string());
        out << (tree ? render_tree(t, header) : render_csv(t, header));
    }
}

}  // namespace qts
