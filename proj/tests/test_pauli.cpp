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

#include "oracles.hpp"

#include "qts/pauli.hpp"

#include <doctest.h>

#include <limits>
#include <random>

using namespace qts;

TEST_CASE("pauli strings parse and print") {
    const auto s = PauliString::parse("IXYZ");
    CHECK(s.n_qubits() == 4);
    CHECK(s.str() == "IXYZ");
    CHECK(s.at(1) == Pauli::X);
    CHECK(s.y_count() == 1);
    CHECK_FALSE(s.is_diagonal());
    CHECK(PauliString::parse("IZZI").is_diagonal());
    CHECK(PauliString(3).is_identity());
    CHECK_THROWS_AS(PauliString::parse("XQ"), std::invalid_argument);
    CHECK_THROWS_AS(PauliString(2).set(2, Pauli::X), std::out_of_range);
}

TEST_CASE("single-qubit multiplication table") {
    const Complex i(0.0, 1.0);
    struct Row {
        const char *a, *b, *c;
        Complex phase;
    };
    const Row table[] = {
        {"X", "Y", "Z", i},  {"Y", "Z", "X", i},  {"Z", "X", "Y", i},  {"Y", "X", "Z", -i}, {"Z", "Y", "X", -i},
        {"X", "Z", "Y", -i}, {"X", "X", "I", 1.0}, {"Y", "Y", "I", 1.0}, {"Z", "Z", "I", 1.0}, {"I", "Y", "Y", 1.0},
    };
    for (const auto& r : table) {
        const auto p = multiply(PauliString::parse(r.a), PauliString::parse(r.b));
        CAPTURE(r.a);
        CAPTURE(r.b);
        CHECK(p.string.str() == r.c);
        CHECK(std::abs(p.phase - r.phase) < 1e-15);
    }
}

TEST_CASE("multi-qubit products match the Kronecker oracle") {
    std::mt19937_64 rng(7);
    const char letters[] = "IXYZ";
    for (int trial = 0; trial < 200; ++trial) {
        std::string a, b;
        for (int q = 0; q < 4; ++q) {
            a += letters[rng() % 4];
            b += letters[rng() % 4];
        }
        const auto p = multiply(PauliString::parse(a), PauliString::parse(b));
        const oracle::Mat lhs = oracle::string_matrix(a) * oracle::string_matrix(b);
        const oracle::Mat rhs = p.phase * oracle::string_matrix(p.string.str());
        CHECK((lhs - rhs).norm() < 1e-14);
    }
}

TEST_CASE("sums merge identical strings and stay canonical") {
    PauliSum s(2, {{1.5, PauliString::parse("ZI")}, {-2.0, PauliString::parse("XX")}, {0.25, PauliString::parse("ZI")},
                   {3.0, PauliString::parse("IZ")}, {2.0, PauliString::parse("XX")}});
    CHECK(s.terms().size() == 2);  // XX cancels exactly
    CHECK(s.coefficient(PauliString::parse("ZI")) == 1.75);
    CHECK(s.coefficient(PauliString::parse("XX")) == 0.0);
    CHECK(s.terms()[0].string.str() == "IZ");
    CHECK(s.terms()[1].string.str() == "ZI");
    CHECK(s.dump() == "3, IZ\n1.75, ZI\n");

    // Order of insertion does not change the serialized form.
    PauliSum t(2, {{3.0, PauliString::parse("IZ")}, {1.75, PauliString::parse("ZI")}});
    CHECK(t.dump() == s.dump());

    const PauliSum sum = s + 2.0 * t;
    CHECK(sum.coefficient(PauliString::parse("IZ")) == 9.0);
    CHECK((s - s).empty());
}

TEST_CASE("sums reject bad input") {
    CHECK_THROWS_AS(PauliSum(2, {{std::numeric_limits<double>::quiet_NaN(), PauliString::parse("ZI")}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(PauliSum(2, {{1.0, PauliString::parse("Z")}}), std::invalid_argument);
    CHECK_THROWS(PauliSum(0));
    CHECK_THROWS_AS(PauliSum(2) + PauliSum(3), std::invalid_argument);
}

TEST_CASE("single-qubit actions") {
    // Z_1 |up ...> = +|up ...>
    const auto up = basis_state<double>(3, 0b000);
    const PauliSum z1(3, {{1.0, PauliString::single(3, 0, Pauli::Z)}});
    CHECK((apply_operator(z1, up) - up).norm() < 1e-15);

    // X_1 |up down> = |down down>
    const PauliSum x1(2, {{1.0, PauliString::single(2, 0, Pauli::X)}});
    const auto out = apply_operator(x1, basis_state<double>(2, 0b01));
    CHECK((out - basis_state<double>(2, 0b11)).norm() < 1e-15);

    // Y|up> = i|down>
    const PauliSum y(1, {{1.0, PauliString::parse("Y")}});
    const auto yv = apply_operator(y, basis_state<Complex>(1, 0));
    CHECK(std::abs(yv(1) - Complex(0.0, 1.0)) < 1e-15);
    CHECK_THROWS_AS(PauliOperator<double>{y}, std::invalid_argument);
}

TEST_CASE("matrix-free application equals the dense Kronecker product") {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> g(0.0, 1.0);
    const char letters[] = "IXYZ";
    for (std::size_t n = 1; n <= 6; ++n) {
        std::vector<PauliTerm> terms;
        for (int k = 0; k < 12; ++k) {
            std::string s;
            for (std::size_t q = 0; q < n; ++q) s += letters[rng() % 4];
            terms.push_back({g(rng), PauliString::parse(s)});
        }
        const PauliSum op(n, terms);
        const oracle::Mat m = oracle::dense(op);
        StateVector<Complex> v(static_cast<Eigen::Index>(op.dimension()));
        for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = Complex(g(rng), g(rng));
        CAPTURE(n);
        CHECK((apply_operator(op, v) - m * v).norm() < 1e-12 * (1.0 + v.norm()));
        CHECK((to_dense<Complex>(op) - m).norm() < 1e-12);
        // Hermiticity of every constructed sum.
        CHECK((m - m.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
        CHECK(PauliOperator<Complex>(op).norm_bound() >= m.operatorNorm() - 1e-12);
    }
}

TEST_CASE("real operators run in real arithmetic") {
    const PauliSum op(3, {{0.5, PauliString::parse("XZI")}, {-1.25, PauliString::parse("YYZ")},
                          {2.0, PauliString::parse("IIZ")}});
    CHECK(op.is_real());
    const oracle::Mat m = oracle::dense(op);
    CHECK(m.imag().norm() < 1e-15);
    CHECK((to_dense<double>(op) - m.real()).norm() < 1e-14);
    CHECK_THROWS_AS(apply_operator(op, StateVector<double>(StateVector<double>::Zero(4))), std::invalid_argument);
}
