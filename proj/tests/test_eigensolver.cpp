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

#include "qts/eigensolver.hpp"
#include "qts/model.hpp"
#include "qts/tomography.hpp"

#include <doctest.h>

#include <random>

using namespace qts;

namespace {

// Projector onto eigenvectors [first, first + count).
template <typename Scalar>
DenseMatrix<Scalar> projector(const EigenSet<Scalar>& s, Eigen::Index first, Eigen::Index count) {
    const auto v = s.eigenvectors.middleCols(first, count);
    return v * v.adjoint();
}

}  // namespace

TEST_CASE("dense eigensolver basics") {
    const PauliSum h(1, {{-2.0, PauliString::parse("X")}});
    const auto s = dense_eigh<double>(h);
    CHECK(s.eigenvalues(0) == doctest::Approx(-2.0));
    CHECK(s.eigenvalues(1) == doctest::Approx(2.0));
    CHECK(std::abs(s.eigenvectors(0, 0) - s.eigenvectors(1, 0)) < 1e-12);  // |+x>
    CHECK(std::abs(s.eigenvectors(0, 1) + s.eigenvectors(1, 1)) < 1e-12);  // |-x>
    CHECK(s.max_residual() < 1e-10);

    const auto k = dense_eigh<double>(build_source_hamiltonian(build_kink_chain(2, 1.0, 0.0)));
    CHECK(k.eigenvalues(0) == doctest::Approx(-1.0));
    CHECK(k.eigenvalues(2) == doctest::Approx(-1.0));
    CHECK(k.eigenvalues(3) == doctest::Approx(3.0));

    CHECK_THROWS_AS(dense_eigh<double>(PauliSum(13)), std::invalid_argument);
}

TEST_CASE("lanczos agrees with dense on the N=7 chain") {
    const PauliSum h = build_source_hamiltonian(build_kink_chain(7, 2.0, 2.0));
    const auto d = dense_eigh<double>(h);
    const auto l = lanczos_lowest<double>(h, 4);
    for (Eigen::Index i = 0; i < 4; ++i) CHECK(std::abs(l.eigenvalues(i) - d.eigenvalues(i)) < 1e-8);
    CHECK(l.max_residual() < 1e-8);
    CHECK(l.orthonormality_error() < 1e-8);
}

TEST_CASE("lanczos over the full dimension of small registers") {
    std::mt19937_64 rng(13);
    for (std::size_t n = 1; n <= 4; ++n) {
        const PauliSum h = build_source_hamiltonian(oracle::random_model(n, rng, false));
        const auto dim = static_cast<Eigen::Index>(h.dimension());
        const auto d = dense_eigh<double>(h);
        const auto l = lanczos_lowest<double>(h, dim);
        CAPTURE(n);
        CHECK((l.eigenvalues - d.eigenvalues).cwiseAbs().maxCoeff() < 1e-8);
    }
}

TEST_CASE("lanczos resolves a degenerate ground space") {
    for (std::size_t n : {3u, 5u, 8u}) {
        const PauliSum h = build_source_hamiltonian(build_kink_chain(n, 1.0, 0.0));
        const auto k = static_cast<Eigen::Index>(n + 2);
        const auto l = lanczos_lowest<double>(h, k);
        CAPTURE(n);
        // N+1 degenerate kink states at -(N-1) J, separated from the rest by a gap.
        for (Eigen::Index i = 0; i <= static_cast<Eigen::Index>(n); ++i) {
            CHECK(l.eigenvalues(i) == doctest::Approx(-static_cast<double>(n - 1)).epsilon(1e-10));
        }
        CHECK(l.eigenvalues(static_cast<Eigen::Index>(n) + 1) > -static_cast<double>(n - 1) + 1.0);
        CHECK(l.orthonormality_error() < 1e-8);
        const auto clusters = energy_clusters(l.eigenvalues);
        CHECK(clusters.front().count == static_cast<Eigen::Index>(n + 1));
        // The cluster spans exactly the kink states.
        const DenseMatrix<double> p = projector(l, 0, static_cast<Eigen::Index>(n + 1));
        for (std::size_t pos = 1; pos <= n + 1; ++pos) {
            const auto idx = static_cast<Eigen::Index>(kink_basis_index(n, pos));
            CHECK(p(idx, idx) == doctest::Approx(1.0).epsilon(1e-10));
        }
    }
}

TEST_CASE("lanczos is deterministic for a fixed seed") {
    const PauliSum h = build_source_hamiltonian(build_kink_chain(9, 2.0, 2.0));
    LanczosOptions o;
    o.seed = 42;
    const auto a = lanczos_lowest<double>(h, 5, o);
    const auto b = lanczos_lowest<double>(h, 5, o);
    CHECK(a.eigenvalues == b.eigenvalues);
    CHECK(a.eigenvectors == b.eigenvectors);
}

TEST_CASE("lanczos in complex arithmetic") {
    const PauliSum h(3, {{1.0, PauliString::parse("XYZ")}, {-0.7, PauliString::parse("ZZI")},
                         {0.4, PauliString::parse("IXI")}, {0.9, PauliString::parse("YIY")}});
    const auto d = dense_eigh<Complex>(h);
    const auto l = lanczos_lowest<Complex>(h, 3);
    for (Eigen::Index i = 0; i < 3; ++i) CHECK(std::abs(l.eigenvalues(i) - d.eigenvalues(i)) < 1e-8);
}

TEST_CASE("lanczos input checks and non-convergence") {
    const PauliSum h = build_source_hamiltonian(build_kink_chain(4, 1.0, 1.0));
    CHECK_THROWS_AS(lanczos_lowest<double>(h, 0), std::invalid_argument);
    CHECK_THROWS_AS(lanczos_lowest<double>(h, 17), std::invalid_argument);
    LanczosOptions o;
    o.max_restarts = 0;
    o.krylov_dim = 3;
    o.tol = 1e-14;
    try {
        lanczos_lowest<double>(build_source_hamiltonian(build_kink_chain(8, 1.0, 1.0)), 4, o);
        FAIL("expected NonConvergence");
    } catch (const NonConvergence& e) {
        CHECK(e.residuals().size() > 0);
    }
}

TEST_CASE("overlaps") {
    const PauliSum h(1, {{-2.0, PauliString::parse("X")}});
    const auto up = dense_eigh<double>(h);
    const auto t = overlaps(up, basis_state<double>(1, 1));
    CHECK(t.per_state(0) == doctest::Approx(0.5));
    CHECK(t.per_state(1) == doctest::Approx(0.5));

    const auto self = overlaps(up, StateVector<double>(up.vector(1)));
    CHECK(self.per_state(0) == doctest::Approx(0.0));
    CHECK(self.per_state(1) == doctest::Approx(1.0));

    // Completeness over all 128 states of the N = 7 chain.
    const ModelSpec m = build_kink_chain(7, 2.0, 2.0);
    const auto full = dense_eigh<double>(build_source_hamiltonian(m));
    for (std::size_t l = 1; l <= 8; ++l) {
        const auto tab = overlaps(full, kink_reference_state<double>(7, l));
        CHECK(std::abs(tab.total() - 1.0) < 1e-10);
        CHECK((tab.per_state.array() >= 0.0).all());
    }
    CHECK_THROWS_AS(overlaps(up, basis_state<double>(2, 0)), std::invalid_argument);
}

TEST_CASE("cluster-summed overlaps are basis invariant") {
    // Degenerate Delta = 0 chain: rotate the ground cluster basis and compare.
    const PauliSum h = build_source_hamiltonian(build_kink_chain(3, 1.0, 0.0));
    auto s = dense_eigh<double>(h);
    const StateVector<double> probe = StateVector<double>::Constant(8, 1.0 / std::sqrt(8.0));
    const auto before = overlaps(s, probe);
    std::mt19937_64 rng(1);
    std::normal_distribution<double> g(0.0, 1.0);
    Eigen::MatrixXd r(4, 4);
    for (auto& x : r.reshaped()) x = g(rng);
    const Eigen::HouseholderQR<Eigen::MatrixXd> qr(r);
    const Eigen::MatrixXd q = qr.householderQ();
    s.eigenvectors.leftCols(4) = s.eigenvectors.leftCols(4) * q;
    const auto after = overlaps(s, probe);
    REQUIRE(before.clusters.size() == after.clusters.size());
    CHECK(before.per_cluster(0) == doctest::Approx(after.per_cluster(0)).epsilon(1e-12));
    CHECK(before.clusters[0].count == 4);
}

TEST_CASE("gap check") {
    const auto flat = dense_eigh<double>(build_source_hamiltonian(build_kink_chain(4, 1.0, 0.0)));
    const auto g0 = gap_check(flat, 0.5);
    CHECK(g0.gap == doctest::Approx(0.0));
    CHECK(g0.flagged);
    CHECK_FALSE(gap_check(flat, 0.0).flagged);

    const ModelSpec m = build_kink_chain(7, 2.0, 2.0);
    const PauliSum down =
        build_down_hamiltonian(build_source_hamiltonian(m), build_coupling(coupler_for_kink(7, 1, 2.0)));
    const auto d = lanczos_lowest<double>(down, 2);
    const auto g = gap_check(d, 0.5);
    CHECK(g.gap > 0.5);
    CHECK_FALSE(g.flagged);

    EigenSet<double> one;
    one.eigenvalues = Eigen::VectorXd::Zero(1);
    CHECK_THROWS_AS(gap_check(one, 0.1), std::invalid_argument);
}

TEST_CASE("solver equivalence on random instances") {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 8; ++trial) {
        const std::size_t n = 3 + static_cast<std::size_t>(trial % 6);
        const PauliSum h = build_source_hamiltonian(oracle::random_model(n, rng, true));
        const auto d = dense_eigh<double>(h);
        const auto l = lanczos_lowest<double>(h, 6);
        CAPTURE(n);
        for (Eigen::Index i = 0; i < 6; ++i) {
            CHECK(std::abs(l.eigenvalues(i) - d.eigenvalues(i)) < 1e-8);
            CHECK(l.eigenvalues(i) >= d.eigenvalues(i) - 1e-10);
        }
        CHECK(l.max_residual() < 1e-8);
        CHECK(l.orthonormality_error() < 1e-8);
    }
}
