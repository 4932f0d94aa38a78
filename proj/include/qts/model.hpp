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

// model.hpp - source-qubit models and probe couplings. All energies in GHz.

#pragma once

#include "qts/pauli.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <map>
#include <utility>
#include <vector>

namespace qts {

// Transverse Ising model  sum_i (h_i Z_i - Delta_i X_i) + sum_{i<j} J_ij Z_i Z_j.
// Qubit indices are 0-based.
struct ModelSpec {
    std::size_t n_qubits = 0;
    std::vector<double> bias;       // h_i
    std::vector<double> tunneling;  // Delta_i
    std::map<std::pair<std::size_t, std::size_t>, double> couplings;  // (i, j) with i < j

    void validate() const;
};

// Probe-to-source couplings (J^x_pi, J^y_pi, J^z_pi) plus the probe's own
// tunneling amplitude and bias.
struct ProbeCoupling {
    std::vector<Eigen::Vector3d> couplings;
    double delta_p = 1.0;
    double epsilon = 0.0;

    std::size_t n_qubits() const noexcept { return couplings.size(); }
    void validate() const;
};

PauliSum build_source_hamiltonian(const ModelSpec& spec);

// Frustrated ferromagnetic chain: h_1 = -J, h_N = +J, J_{i,i+1} = -J, Delta_i = Delta.
ModelSpec build_kink_chain(std::size_t n_qubits, double coupling, double tunneling);

PauliSum build_coupling(const ProbeCoupling& pc);

// H_S + 2 H_C. The probe bias is a pure identity shift and is not included.
PauliSum build_down_hamiltonian(const PauliSum& source, const PauliSum& coupling);

}  // namespace qts
