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

#include "qts/model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace qts {

namespace {

void require_finite(double v, const char* what) {
    if (!std::isfinite(v)) {
        throw std::invalid_argument(std::string("non-finite ") + what);
    }
}

}  // namespace

void ModelSpec::validate() const {
    if (n_qubits == 0) {
        throw std::invalid_argument("ModelSpec: n_qubits must be >= 1");
    }
    if (n_qubits > kMaxQubits) {
        throw std::invalid_argument("ModelSpec: n_qubits exceeds " + std::to_string(kMaxQubits));
    }
    if (bias.size() != n_qubits || tunneling.size() != n_qubits) {
        throw std::invalid_argument("ModelSpec: bias and tunneling arrays must have length n_qubits");
    }
    for (double v : bias) require_finite(v, "bias");
    for (double v : tunneling) require_finite(v, "tunneling amplitude");
    for (const auto& [ij, v] : couplings) {
        if (ij.first >= ij.second) {
            throw std::invalid_argument("ModelSpec: couplings need i < j (no self coupling)");
        }
        if (ij.second >= n_qubits) {
            throw std::invalid_argument("ModelSpec: coupling index out of range");
        }
        require_finite(v, "coupling");
    }
}

void ProbeCoupling::validate() const {
    if (couplings.empty()) {
        throw std::invalid_argument("ProbeCoupling: needs one coupling triple per source qubit");
    }
    for (const auto& c : couplings) {
        if (!c.allFinite()) throw std::invalid_argument("ProbeCoupling: non-finite coupling");
    }
    if (!(delta_p > 0.0) || !std::isfinite(delta_p)) {
        throw std::invalid_argument("ProbeCoupling: delta_p must be > 0");
    }
    require_finite(epsilon, "probe bias");
}

PauliSum build_source_hamiltonian(const ModelSpec& spec) {
    spec.validate();
    const auto n = spec.n_qubits;
    std::vector<PauliTerm> terms;
    for (std::size_t i = 0; i < n; ++i) {
        terms.push_back({spec.bias[i], PauliString::single(n, i, Pauli::Z)});
        terms.push_back({-spec.tunneling[i], PauliString::single(n, i, Pauli::X)});
    }
    for (const auto& [ij, j_ij] : spec.couplings) {
        PauliString zz(n);
        zz.set(ij.first, Pauli::Z).set(ij.second, Pauli::Z);
        terms.push_back({j_ij, zz});
    }
    return PauliSum(n, std::move(terms));
}

ModelSpec build_kink_chain(std::size_t n_qubits, double coupling, double tunneling) {
    if (n_qubits < 2) {
        throw std::invalid_argument("build_kink_chain: chain needs at least 2 qubits");
    }
    if (!(coupling > 0.0)) {
        throw std::invalid_argument("build_kink_chain: J must be > 0");
    }
    ModelSpec spec;
    spec.n_qubits = n_qubits;
    spec.bias.assign(n_qubits, 0.0);
    spec.bias.front() = -coupling;
    spec.bias.back() = coupling;
    spec.tunneling.assign(n_qubits, tunneling);
    for (std::size_t i = 0; i + 1 < n_qubits; ++i) spec.couplings[{i, i + 1}] = -coupling;
    spec.validate();
    return spec;
}

PauliSum build_coupling(const ProbeCoupling& pc) {
    pc.validate();
    const auto n = pc.n_qubits();
    std::vector<PauliTerm> terms;
    constexpr Pauli axes[] = {Pauli::X, Pauli::Y, Pauli::Z};
    for (std::size_t i = 0; i < n; ++i) {
        for (int a = 0; a < 3; ++a) {
            if (pc.couplings[i](a) != 0.0) {
                terms.push_back({pc.couplings[i](a), PauliString::single(n, i, axes[a])});
            }
        }
    }
    return PauliSum(n, std::move(terms));
}

PauliSum build_down_hamiltonian(const PauliSum& source, const PauliSum& coupling) {
    if (source.n_qubits() != coupling.n_qubits()) {
        throw std::invalid_argument("build_down_hamiltonian: dimension mismatch");
    }
    return source + 2.0 * coupling;
}

}  // namespace qts
