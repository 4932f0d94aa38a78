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

// tomography.hpp - eigenstate tomography of the frustrated chain by probe
// tunneling spectroscopy.
//
// For every kink position l the probe is wired so that the ground state of
// H_S + 2 H_C approximates the single-kink state |psi_l>; sweeping the probe
// bias then produces escape-rate peaks at E_n - E_0^down + eps_p whose heights
// are proportional to |<Psi_n|Psi_0^down>|^2.

#pragma once

#include "qts/bath.hpp"
#include "qts/eigensolver.hpp"
#include "qts/master_equation.hpp"
#include "qts/model.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace qts {

// Kink positions are 1-based: l = 1 .. N+1.
std::uint64_t kink_basis_index(std::size_t n_qubits, std::size_t l);

template <typename Scalar = double>
StateVector<Scalar> kink_reference_state(std::size_t n_qubits, std::size_t l) {
    return basis_state<Scalar>(n_qubits, kink_basis_index(n_qubits, l));
}

// z-couplers whose strong limit pins the probe-down ground state to |psi_l>.
ProbeCoupling coupler_for_kink(std::size_t n_qubits, std::size_t l, double jp, double delta_p = 1.0);

struct ReferenceReport {
    double fidelity = 0.0;        // |<target|Psi_0^down>|^2
    double gap = 0.0;             // E_1^down - E_0^down
    double ground_energy = 0.0;   // E_0^down (probe bias excluded)
    bool flagged = false;
    std::string reason;
};

// Fidelity of the engineered reference state and the probe-down gap. Flags
// fidelity below `min_fidelity` or a gap below `min_gap`.
template <typename Scalar>
ReferenceReport verify_reference(const ModelSpec& model, const ProbeCoupling& pc, const StateVector<Scalar>& target,
                                 double min_gap, double min_fidelity = 0.9, const LanczosOptions& lanczos = {},
                                 std::size_t dense_limit = 10);

struct SweepSpec {
    double jp = 0.0;                          // probe coupling J_p (GHz)
    double delta_p = 1.0;                     // probe tunneling amplitude (GHz)
    std::vector<std::size_t> positions;       // kink positions l; empty = all N+1
    std::optional<std::vector<double>> epsilon;  // raw bias grid; unset = automatic relative grid
    std::size_t levels = 4;                   // source levels covered by the automatic grid
    Eigen::Index retained = 0;                // up-manifold eigenpairs to compute; 0 = automatic
    RateModel rate_model = RateModel::Marcus;
    LanczosOptions lanczos;
    std::size_t dense_limit = 10;             // dense diagonalization up to this many qubits
    std::size_t threads = 1;
    double min_fidelity = 0.9;
};

// Gamma_0(eps, l) / Delta_p^2 on a per-row bias grid. Row r belongs to
// kink position positions[r].
struct TomographyGrid {
    std::vector<std::size_t> positions;
    Eigen::MatrixXd epsilon;      // raw probe bias (GHz)
    Eigen::MatrixXd epsilon_rel;  // bias relative to the row's ground-state peak
    Eigen::MatrixXd rate;         // Gamma_0 / Delta_p^2 (ns^-1 GHz^-2)

    double max_rate() const { return rate.size() ? rate.maxCoeff() : 0.0; }
    Eigen::MatrixXd normalized() const;
};

struct ReferenceColumn {
    std::size_t l = 0;
    ReferenceReport report;
    Eigen::VectorXd up_overlaps;  // |<Psi_n^up|Psi_0^down>|^2 for retained n
};

struct SweepResult {
    std::size_t n_qubits = 0;
    EigenSet<double> up;          // retained source eigenpairs
    std::vector<EnergyCluster> levels;  // distinct source levels among `up`
    std::size_t levels_shown = 0;
    std::vector<ReferenceColumn> columns;
    TomographyGrid grid;
    BathParams bath;
    std::vector<std::string> warnings;

    // Predicted peak positions E_n - E_0^down(l) + eps_p for every level cluster.
    Eigen::MatrixXd predicted_peaks() const;  // (rows x clusters)
};

// Sweeps the probe bias for every requested kink position. Columns are
// independent and run on `spec.threads` workers; output order is (l, eps).
SweepResult run_sweep(const ModelSpec& model, const SweepSpec& spec, const BathParams& bath);

struct Peak {
    std::size_t l = 0;
    Eigen::Index level = -1;      // matched source level cluster, -1 when unmatched
    double epsilon = 0.0;
    double epsilon_rel = 0.0;
    double height = 0.0;          // Gamma_0 / Delta_p^2 at the maximum
    double width = 0.0;           // Gaussian sigma from the curvature, NaN if unresolved
    double predicted = 0.0;       // predicted raw position of the matched level
    int multiplicity = 1;         // levels within one linewidth of the maximum
    bool resolved = true;         // false: no local maximum, height read at the predicted position
};

struct PeakSet {
    std::vector<Peak> peaks;      // matched, ordered by (row, level)
    std::vector<Peak> unmatched;  // maxima farther than 2W from every predicted level

    const Peak* find(std::size_t l, Eigen::Index level) const;
};

// Local maxima by three-point quadratic interpolation, matched to the nearest
// predicted level. `predicted` has one row per grid row and one column per
// level; levels below `levels_shown` without a maximum get an unresolved
// entry. Rejects grids coarser than W/4.
PeakSet extract_peaks(const TomographyGrid& grid, const Eigen::MatrixXd& predicted, std::size_t levels_shown,
                      double width);
PeakSet extract_peaks(const SweepResult& sweep);

// |C_l^(n)|^2 = height / sqrt(2 pi / W^2), divided by the reference fidelity.
struct AmplitudeMap {
    std::vector<std::size_t> positions;
    Eigen::MatrixXd amplitude_sq;   // (levels x positions), fidelity corrected
    Eigen::MatrixXd raw;            // before the fidelity correction
    Eigen::VectorXd fidelity;       // per position
    Eigen::MatrixXi resolved;       // 1 when read from a resolved maximum
    Eigen::MatrixXi multiplicity;
};

AmplitudeMap reconstruct_amplitudes(const PeakSet& peaks, const std::vector<std::size_t>& positions,
                                    std::size_t levels, double width, const std::vector<double>& fidelity);
AmplitudeMap reconstruct_amplitudes(const SweepResult& sweep, const PeakSet& peaks);

// Direct amplitudes <psi_l|Psi_n> for the first `levels` up eigenstates
// (levels x N+1), the oracle for the reconstruction.
Eigen::MatrixXd direct_kink_amplitudes(const EigenSet<double>& up, std::size_t n_qubits, std::size_t levels);

struct NodeReport {
    std::vector<double> positions;  // 1-based l; plateau minima report their midpoint
    std::vector<double> depth;      // value / row maximum
};

// Interior local minima of a row indexed by l = 1, 2, ...; runs of values equal
// within 1e-9 of the row maximum count once. Only minima at or below
// `max_fraction` of the row maximum are reported.
NodeReport find_nodes(const Eigen::VectorXd& row, double max_fraction = 1.0);

// Sign changes along a real amplitude row, ignoring entries below `zero_tol`.
int count_sign_changes(const Eigen::VectorXd& row, double zero_tol = 1e-12);

}  // namespace qts
