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

#include "qts/pauli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

namespace qts {

namespace {

// i^k for k mod 4
Complex i_power(int k) {
    switch (((k % 4) + 4) % 4) {
        case 0: return {1.0, 0.0};
        case 1: return {0.0, 1.0};
        case 2: return {-1.0, 0.0};
        default: return {0.0, -1.0};
    }
}

void check_qubits(std::size_t n) {
    if (n == 0) {
        throw std::invalid_argument("PauliString: qubit count must be >= 1");
    }
    if (n > 64) {
        throw std::invalid_argument("PauliString: at most 64 qubits");
    }
}

}  // namespace

char to_char(Pauli p) {
    switch (p) {
        case Pauli::I: return 'I';
        case Pauli::X: return 'X';
        case Pauli::Y: return 'Y';
        case Pauli::Z: return 'Z';
    }
    return '?';
}

PauliString::PauliString(std::size_t n_qubits) : n_(n_qubits) {
    check_qubits(n_qubits);
}

PauliString PauliString::parse(std::string_view text) {
    PauliString s(text.size());
    for (std::size_t q = 0; q < text.size(); ++q) {
        switch (text[q]) {
            case 'I': break;
            case 'X': s.set(q, Pauli::X); break;
            case 'Y': s.set(q, Pauli::Y); break;
            case 'Z': s.set(q, Pauli::Z); break;
            default:
                throw std::invalid_argument("PauliString::parse: unexpected character '" +
                                            std::string(1, text[q]) + "'");
        }
    }
    return s;
}

PauliString PauliString::single(std::size_t n_qubits, std::size_t qubit, Pauli op) {
    PauliString s(n_qubits);
    s.set(qubit, op);
    return s;
}

PauliString& PauliString::set(std::size_t qubit, Pauli op) {
    if (qubit >= n_) {
        throw std::out_of_range("PauliString::set: qubit index out of range");
    }
    const auto b = bit(qubit);
    x_ &= ~b;
    z_ &= ~b;
    if (op == Pauli::X || op == Pauli::Y) x_ |= b;
    if (op == Pauli::Z || op == Pauli::Y) z_ |= b;
    return *this;
}

Pauli PauliString::at(std::size_t qubit) const {
    if (qubit >= n_) {
        throw std::out_of_range("PauliString::at: qubit index out of range");
    }
    const bool x = (x_ & bit(qubit)) != 0;
    const bool z = (z_ & bit(qubit)) != 0;
    if (x && z) return Pauli::Y;
    if (x) return Pauli::X;
    if (z) return Pauli::Z;
    return Pauli::I;
}

std::string PauliString::str() const {
    std::string out(n_, 'I');
    for (std::size_t q = 0; q < n_; ++q) out[q] = to_char(at(q));
    return out;
}

std::strong_ordering operator<=>(const PauliString& a, const PauliString& b) {
    if (auto c = a.n_ <=> b.n_; c != 0) return c;
    for (std::size_t q = 0; q < a.n_; ++q) {
        const auto pa = static_cast<int>(a.at(q));
        const auto pb = static_cast<int>(b.at(q));
        if (pa != pb) return pa <=> pb;
    }
    return std::strong_ordering::equal;
}

// With Y = i X Z every string is i^{#Y} X^x Z^z, and Z^z X^x' = (-1)^{|z & x'|} X^x' Z^z.
PauliProduct multiply(const PauliString& a, const PauliString& b) {
    if (a.n_qubits() != b.n_qubits()) {
        throw std::invalid_argument("multiply: qubit count mismatch");
    }
    const auto x = a.x_mask() ^ b.x_mask();
    const auto z = a.z_mask() ^ b.z_mask();
    const int y_result = std::popcount(x & z);
    const int sign = std::popcount(a.z_mask() & b.x_mask()) % 2 == 0 ? 1 : -1;
    const Complex phase = i_power(a.y_count() + b.y_count() - y_result) * static_cast<double>(sign);

    PauliString out(a.n_qubits());
    for (std::size_t q = 0; q < a.n_qubits(); ++q) {
        const auto m = std::uint64_t{1} << (a.n_qubits() - 1 - q);
        const bool xq = (x & m) != 0;
        const bool zq = (z & m) != 0;
        out.set(q, xq && zq ? Pauli::Y : xq ? Pauli::X : zq ? Pauli::Z : Pauli::I);
    }
    return {phase, out};
}

PauliSum::PauliSum(std::size_t n_qubits) : n_(n_qubits) {
    check_qubits(n_qubits);
}

PauliSum::PauliSum(std::size_t n_qubits, std::vector<PauliTerm> terms) : n_(n_qubits) {
    check_qubits(n_qubits);
    std::map<PauliString, double> merged;
    for (const auto& t : terms) {
        if (t.string.n_qubits() != n_) {
            throw std::invalid_argument("PauliSum: term qubit count mismatch");
        }
        if (!std::isfinite(t.coefficient)) {
            throw std::invalid_argument("PauliSum: non-finite coefficient on " + t.string.str());
        }
        merged[t.string] += t.coefficient;
    }
    terms_.reserve(merged.size());
    for (const auto& [s, c] : merged) {
        if (c != 0.0) terms_.push_back({c, s});
    }
}

bool PauliSum::is_real() const noexcept {
    return std::all_of(terms_.begin(), terms_.end(),
                       [](const PauliTerm& t) { return t.string.y_count() % 2 == 0; });
}

double PauliSum::coefficient(const PauliString& s) const {
    auto it = std::lower_bound(terms_.begin(), terms_.end(), s,
                               [](const PauliTerm& t, const PauliString& key) { return t.string < key; });
    return (it != terms_.end() && it->string == s) ? it->coefficient : 0.0;
}

PauliSum PauliSum::operator+(const PauliSum& other) const {
    if (other.n_ != n_) {
        throw std::invalid_argument("PauliSum: dimension mismatch in sum");
    }
    std::vector<PauliTerm> all = terms_;
    all.insert(all.end(), other.terms_.begin(), other.terms_.end());
    return PauliSum(n_, std::move(all));
}

PauliSum PauliSum::operator-(const PauliSum& other) const {
    return *this + (-1.0) * other;
}

PauliSum operator*(double factor, const PauliSum& sum) {
    std::vector<PauliTerm> scaled = sum.terms_;
    for (auto& t : scaled) t.coefficient *= factor;
    return PauliSum(sum.n_, std::move(scaled));
}

std::string PauliSum::dump() const {
    std::ostringstream os;
    char buf[64];
    for (const auto& t : terms_) {
        std::snprintf(buf, sizeof buf, "%.17g", t.coefficient);
        os << buf << ", " << t.string.str() << '\n';
    }
    return os.str();
}

// ---------------------------------------------------------------------------

template <typename Scalar>
PauliOperator<Scalar>::PauliOperator(const PauliSum& sum) : n_(sum.n_qubits()) {
    if (n_ > kMaxQubits) {
        throw std::invalid_argument("PauliOperator: register exceeds " + std::to_string(kMaxQubits) + " qubits");
    }
    const auto dim = static_cast<Eigen::Index>(sum.dimension());
    diagonal_ = Eigen::VectorXd::Zero(dim);

    std::map<std::uint64_t, std::vector<Part>> flips;
    for (const auto& t : sum.terms()) {
        norm_bound_ += std::abs(t.coefficient);
        const auto z = t.string.z_mask();
        if (t.string.is_diagonal()) {
            for (Eigen::Index s = 0; s < dim; ++s) {
                diagonal_(s) += (std::popcount(static_cast<std::uint64_t>(s) & z) & 1) ? -t.coefficient
                                                                                         : t.coefficient;
            }
            continue;
        }
        const Complex phase = i_power(t.string.y_count()) * t.coefficient;
        Scalar c;
        if constexpr (is_complex_v<Scalar>) {
            c = phase;
        } else {
            if (phase.imag() != 0.0) {
                throw std::invalid_argument("PauliOperator: term " + t.string.str() +
                                            " is imaginary; use a complex scalar");
            }
            c = phase.real();
        }
        flips[t.string.x_mask()].push_back({c, z});
    }
    for (auto& [x, parts] : flips) groups_.push_back({x, std::move(parts)});
}

template <typename Scalar>
void PauliOperator<Scalar>::apply(const Eigen::Ref<const Vector>& in, Eigen::Ref<Vector> out) const {
    const auto dim = dimension();
    if (in.size() != dim || out.size() != dim) {
        throw std::invalid_argument("PauliOperator::apply: dimension mismatch");
    }
    out = diagonal_.cast<Scalar>().cwiseProduct(in);
    // Gather form: out[t] += c (-1)^{|s & z|} in[s] with s = t ^ x.
    for (const auto& g : groups_) {
        if (g.parts.size() == 1 && g.parts.front().z_mask == 0) {
            const Scalar c = g.parts.front().coefficient;
            for (Eigen::Index t = 0; t < dim; ++t) {
                out(t) += c * in(static_cast<Eigen::Index>(static_cast<std::uint64_t>(t) ^ g.x_mask));
            }
            continue;
        }
        for (Eigen::Index t = 0; t < dim; ++t) {
            const auto s = static_cast<std::uint64_t>(t) ^ g.x_mask;
            Scalar acc(0);
            for (const auto& p : g.parts) {
                acc += (std::popcount(s & p.z_mask) & 1) ? -p.coefficient : p.coefficient;
            }
            out(t) += acc * in(static_cast<Eigen::Index>(s));
        }
    }
}

template <typename Scalar>
DenseMatrix<Scalar> to_dense(const PauliSum& op) {
    if (op.n_qubits() > kMaxDenseQubits) {
        throw std::invalid_argument("to_dense: register exceeds " + std::to_string(kMaxDenseQubits) + " qubits");
    }
    const PauliOperator<Scalar> compiled(op);
    const auto dim = static_cast<Eigen::Index>(op.dimension());
    DenseMatrix<Scalar> m(dim, dim);
    StateVector<Scalar> e = StateVector<Scalar>::Zero(dim);
    StateVector<Scalar> col(dim);
    for (Eigen::Index s = 0; s < dim; ++s) {
        e(s) = Scalar(1);
        compiled.apply(e, col);
        m.col(s) = col;
        e(s) = Scalar(0);
    }
    return m;
}

template class PauliOperator<double>;
template class PauliOperator<Complex>;
template DenseMatrix<double> to_dense<double>(const PauliSum&);
template DenseMatrix<Complex> to_dense<Complex>(const PauliSum&);

}  // namespace qts
