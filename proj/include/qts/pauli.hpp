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

// pauli.hpp - Pauli strings, Hermitian Pauli sums and their matrix-free action
// on 2^N-dimensional state vectors.
//
// Basis convention: qubit i (0-based) is bit (N-1-i) of the basis index, so the
// index reads left to right as |q_1 q_2 ... q_N>. Bit value 0 is spin up
// (sigma^z = +1), bit value 1 is spin down.

#pragma once

#include <Eigen/Core>

#include <bit>
#include <compare>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

namespace qts {

using Complex = std::complex<double>;

template <typename Scalar>
using StateVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using DenseMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename T>
struct is_complex : std::false_type {};
template <typename T>
struct is_complex<std::complex<T>> : std::true_type {};
template <typename T>
inline constexpr bool is_complex_v = is_complex<T>::value;

// Largest register the matrix-free path accepts (2^26 amplitudes).
inline constexpr std::size_t kMaxQubits = 26;

// Largest register for which a dense matrix may be materialized.
inline constexpr std::size_t kMaxDenseQubits = 12;

enum class Pauli : std::uint8_t { I = 0, X = 1, Y = 2, Z = 3 };

char to_char(Pauli p);

class PauliString {
public:
    explicit PauliString(std::size_t n_qubits);

    // Parses a string over {I, X, Y, Z}; its length is the qubit count.
    static PauliString parse(std::string_view text);
    static PauliString single(std::size_t n_qubits, std::size_t qubit, Pauli op);

    PauliString& set(std::size_t qubit, Pauli op);
    Pauli at(std::size_t qubit) const;

    std::size_t n_qubits() const noexcept { return n_; }
    std::uint64_t x_mask() const noexcept { return x_; }
    std::uint64_t z_mask() const noexcept { return z_; }
    int y_count() const noexcept { return std::popcount(x_ & z_); }
    bool is_diagonal() const noexcept { return x_ == 0; }
    bool is_identity() const noexcept { return x_ == 0 && z_ == 0; }

    std::string str() const;

    friend bool operator==(const PauliString&, const PauliString&) = default;
    // Lexicographic over qubits 1..N with I < X < Y < Z.
    friend std::strong_ordering operator<=>(const PauliString& a, const PauliString& b);

private:
    std::uint64_t bit(std::size_t qubit) const noexcept { return std::uint64_t{1} << (n_ - 1 - qubit); }

    std::size_t n_;
    std::uint64_t x_ = 0;
    std::uint64_t z_ = 0;
};

struct PauliProduct {
    Complex phase;
    PauliString string;
};

// a * b = phase * string
PauliProduct multiply(const PauliString& a, const PauliString& b);

struct PauliTerm {
    double coefficient;
    PauliString string;
};

// Hermitian operator sum_k c_k P_k with real c_k. Terms are merged on identical
// strings, exact zeros are dropped, and the list is kept in canonical order.
class PauliSum {
public:
    explicit PauliSum(std::size_t n_qubits);
    PauliSum(std::size_t n_qubits, std::vector<PauliTerm> terms);

    std::size_t n_qubits() const noexcept { return n_; }
    std::size_t dimension() const noexcept { return std::size_t{1} << n_; }
    const std::vector<PauliTerm>& terms() const noexcept { return terms_; }
    bool empty() const noexcept { return terms_.empty(); }

    // True when the matrix in the computational basis is real (even number
    // of Y factors in every term).
    bool is_real() const noexcept;

    // Coefficient of an exact string, 0 if absent.
    double coefficient(const PauliString& s) const;

    PauliSum operator+(const PauliSum& other) const;
    PauliSum operator-(const PauliSum& other) const;
    friend PauliSum operator*(double factor, const PauliSum& sum);

    // One "coefficient, string" line per term.
    std::string dump() const;

private:
    std::size_t n_;
    std::vector<PauliTerm> terms_;
};

// Compiled matrix-free form of a PauliSum: the diagonal is tabulated once and
// off-diagonal terms are grouped by their bit-flip mask.
template <typename Scalar>
class PauliOperator {
public:
    using Vector = StateVector<Scalar>;

    explicit PauliOperator(const PauliSum& sum);

    Eigen::Index dimension() const noexcept { return static_cast<Eigen::Index>(diagonal_.size()); }
    std::size_t n_qubits() const noexcept { return n_; }
    const Eigen::VectorXd& diagonal() const noexcept { return diagonal_; }

    // out = op * in; `in` and `out` must not alias.
    void apply(const Eigen::Ref<const Vector>& in, Eigen::Ref<Vector> out) const;

    Vector operator*(const Vector& v) const {
        Vector out(v.size());
        apply(v, out);
        return out;
    }

    // Upper bound on the spectral radius (sum of |coefficients|).
    double norm_bound() const noexcept { return norm_bound_; }

private:
    struct Part {
        Scalar coefficient;  // includes the i^{#Y} phase
        std::uint64_t z_mask;
    };
    struct FlipGroup {
        std::uint64_t x_mask;
        std::vector<Part> parts;
    };

    std::size_t n_;
    Eigen::VectorXd diagonal_;
    std::vector<FlipGroup> groups_;
    double norm_bound_ = 0.0;
};

// op * v without materializing a dense matrix.
template <typename Scalar>
StateVector<Scalar> apply_operator(const PauliSum& op, const StateVector<Scalar>& v) {
    if (static_cast<std::size_t>(v.size()) != op.dimension()) {
        throw std::invalid_argument("apply_operator: dimension mismatch");
    }
    return PauliOperator<Scalar>(op) * v;
}

// Dense matrix of a PauliSum; refuses registers above kMaxDenseQubits.
template <typename Scalar>
DenseMatrix<Scalar> to_dense(const PauliSum& op);

// Computational basis vector with the given index.
template <typename Scalar>
StateVector<Scalar> basis_state(std::size_t n_qubits, std::uint64_t index) {
    StateVector<Scalar> v = StateVector<Scalar>::Zero(static_cast<Eigen::Index>(std::size_t{1} << n_qubits));
    v(static_cast<Eigen::Index>(index)) = Scalar(1);
    return v;
}

extern template class PauliOperator<double>;
extern template class PauliOperator<Complex>;
extern template DenseMatrix<double> to_dense<double>(const PauliSum&);
extern template DenseMatrix<Complex> to_dense<Complex>(const PauliSum&);

}  // namespace qts
