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

// eigensolver.hpp - lowest eigenpairs of Pauli-sum Hamiltonians and the
// eigenstate overlaps that weight every tunneling rate.

#pragma once

#include "qts/pauli.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace qts {

// Eigenvalues closer than this (GHz) form one degenerate cluster.
inline constexpr double kClusterSpacing = 1e-6;

template <typename Scalar>
struct EigenSet {
    Eigen::VectorXd eigenvalues;        // ascending, GHz
    DenseMatrix<Scalar> eigenvectors;   // one column per eigenvalue
    Eigen::VectorXd residuals;          // ||H v - lambda v||

    Eigen::Index size() const noexcept { return eigenvalues.size(); }
    StateVector<Scalar> vector(Eigen::Index i) const { return eigenvectors.col(i); }
    double max_residual() const { return residuals.size() ? residuals.maxCoeff() : 0.0; }

    // max |<v_i|v_j> - delta_ij|
    double orthonormality_error() const {
        const Eigen::Index k = size();
        DenseMatrix<Scalar> g = eigenvectors.adjoint() * eigenvectors;
        g -= DenseMatrix<Scalar>::Identity(k, k);
        return k ? g.cwiseAbs().maxCoeff() : 0.0;
    }
};

class NonConvergence : public std::runtime_error {
public:
    NonConvergence(const std::string& what, Eigen::VectorXd residuals)
        : std::runtime_error(what), residuals_(std::move(residuals)) {}
    const Eigen::VectorXd& residuals() const noexcept { return residuals_; }

private:
    Eigen::VectorXd residuals_;
};

template <typename Scalar>
Eigen::VectorXd residual_norms(const PauliOperator<Scalar>& op, const Eigen::VectorXd& values,
                               const DenseMatrix<Scalar>& vectors) {
    Eigen::VectorXd r(values.size());
    StateVector<Scalar> hv(op.dimension());
    for (Eigen::Index i = 0; i < values.size(); ++i) {
        op.apply(vectors.col(i), hv);
        r(i) = (hv - values(i) * vectors.col(i)).norm();
    }
    return r;
}

// Full spectrum by dense Hermitian diagonalization (oracle path, N <= 12).
template <typename Scalar>
EigenSet<Scalar> dense_eigh(const PauliSum& op) {
    if (op.n_qubits() > kMaxDenseQubits) {
        throw std::invalid_argument("dense_eigh: refusing " + std::to_string(op.n_qubits()) +
                                    " qubits (limit " + std::to_string(kMaxDenseQubits) + ")");
    }
    const DenseMatrix<Scalar> h = to_dense<Scalar>(op);
    Eigen::SelfAdjointEigenSolver<DenseMatrix<Scalar>> solver(h);
    if (solver.info() != Eigen::Success) {
        throw NonConvergence("dense_eigh: eigen decomposition failed", {});
    }
    EigenSet<Scalar> out;
    out.eigenvalues = solver.eigenvalues();
    out.eigenvectors = solver.eigenvectors();
    out.residuals = residual_norms(PauliOperator<Scalar>(op), out.eigenvalues, out.eigenvectors);
    return out;
}

struct LanczosOptions {
    double tol = 1e-10;          // residual target per eigenpair
    std::uint64_t seed = 0;      // starting-vector seed
    Eigen::Index krylov_dim = 0; // 0 picks max(2k + 40, 80)
    int max_restarts = 400;
};

namespace detail {

template <typename Scalar>
StateVector<Scalar> random_state(Eigen::Index dim, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    StateVector<Scalar> v(dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
        if constexpr (is_complex_v<Scalar>) {
            const double re = gauss(rng);
            const double im = gauss(rng);
            v(i) = Scalar(re, im);
        } else {
            v(i) = gauss(rng);
        }
    }
    return v / v.norm();
}

// Two-pass classical Gram-Schmidt against the columns of `basis`.
template <typename Scalar, typename Basis>
void project_out(StateVector<Scalar>& w, const Basis& basis) {
    if (basis.cols() == 0) return;
    for (int pass = 0; pass < 2; ++pass) {
        const StateVector<Scalar> c = basis.adjoint() * w;
        w.noalias() -= basis * c;
    }
}

}  // namespace detail

// Lowest k eigenpairs by thick-restart Lanczos with full reorthogonalization
// and locking of converged Ritz pairs. Each restart keeps a block of the
// lowest unconverged Ritz vectors and expands from their common residual
// direction plus a small seeded random admixture, so partners inside exactly
// degenerate levels are reached. A final deflated pass from a fresh random
// vector certifies that no lower eigenvalue was missed.
template <typename Scalar>
EigenSet<Scalar> lanczos_lowest(const PauliSum& op, Eigen::Index k, const LanczosOptions& opts = {}) {
    using Vector = StateVector<Scalar>;
    using Matrix = DenseMatrix<Scalar>;

    const PauliOperator<Scalar> a(op);
    const Eigen::Index dim = a.dimension();
    if (k < 1 || k > dim) {
        throw std::invalid_argument("lanczos_lowest: need 1 <= k <= dimension");
    }
    if (!(opts.tol > 0.0)) {
        throw std::invalid_argument("lanczos_lowest: tolerance must be positive");
    }
    const double scale = std::max(a.norm_bound(), 1.0);
    const double swap_margin = 10.0 * opts.tol;
    const Eigen::Index m_max = std::min<Eigen::Index>(
        dim, opts.krylov_dim > 0 ? opts.krylov_dim : std::max<Eigen::Index>(2 * k + 40, 80));

    std::mt19937_64 rng(opts.seed);
    Matrix locked(dim, k + 1);
    Eigen::VectorXd locked_values(k + 1);
    Eigen::Index n_locked = 0;

    Matrix v(dim, m_max);   // active basis
    Matrix av(dim, m_max);  // its image under the operator
    Eigen::Index kept = 0;  // leading basis columns carried over a restart
    Vector next = detail::random_state<Scalar>(dim, rng);
    Eigen::VectorXd last_residuals;
    bool verifying = false;

    // Orthonormalizes `w` against the locked and active vectors; a random
    // replacement is drawn when nothing new is left.
    auto extend = [&](Vector w, Eigen::Index j) {
        for (int attempt = 0;; ++attempt) {
            const double before = w.norm();
            detail::project_out(w, locked.leftCols(n_locked));
            detail::project_out(w, v.leftCols(j));
            const double after = w.norm();
            if (after > 1e-10 * std::max(before, 1e-300) && after > 1e-14) {
                v.col(j) = w / after;
                break;
            }
            if (attempt > 4) return false;
            w = detail::random_state<Scalar>(dim, rng);
        }
        Vector image(dim);
        a.apply(v.col(j), image);
        av.col(j) = image;
        return true;
    };

    for (int restart = 0;; ++restart) {
        if (restart > opts.max_restarts) {
            throw NonConvergence("lanczos_lowest: no convergence after " + std::to_string(opts.max_restarts) +
                                     " restarts (" + std::to_string(n_locked) + " of " + std::to_string(k) +
                                     " pairs locked)",
                                 last_residuals);
        }
        const Eigen::Index available = dim - n_locked;
        if (available == 0) break;
        const Eigen::Index m = std::min(m_max, available);

        Eigen::Index built = kept;
        for (; built < m; ++built) {
            if (!extend(built == kept ? next : Vector(av.col(built - 1)), built)) break;
        }
        if (built == 0) break;

        // Rayleigh-Ritz on the active basis.
        Matrix h = v.leftCols(built).adjoint() * av.leftCols(built);
        h = (0.5 * (h + h.adjoint())).eval();
        Eigen::SelfAdjointEigenSolver<Matrix> ritz(h);
        const Eigen::Index want = verifying ? 1 : k - n_locked;
        const Eigen::Index nr = std::min(want, built);
        const Matrix s = ritz.eigenvectors();
        const Eigen::VectorXd& theta = ritz.eigenvalues();
        const Matrix x = v.leftCols(built) * s.leftCols(nr);
        const Matrix r = av.leftCols(built) * s.leftCols(nr) - x * theta.head(nr).asDiagonal();
        last_residuals = r.colwise().norm().transpose();
        const bool exhausted = built == available;  // exact invariant subspace

        auto converged = [&](Eigen::Index i) { return exhausted || last_residuals(i) < opts.tol; };

        // Thick restart: keep the lowest `keep` Ritz vectors starting at `first`.
        auto restart_from = [&](Eigen::Index first, Eigen::Index keep) {
            keep = std::min(keep, built - first);
            const Matrix vs = v.leftCols(built) * s.middleCols(first, keep);
            const Matrix as = av.leftCols(built) * s.middleCols(first, keep);
            v.leftCols(keep) = vs;
            av.leftCols(keep) = as;
            kept = keep;
            Vector res = as.col(0) - theta(first) * vs.col(0);
            if (res.norm() < 1e-14 * scale) res = detail::random_state<Scalar>(dim, rng);
            next = res / res.norm() + 1e-3 * detail::random_state<Scalar>(dim, rng);
        };

        if (verifying) {
            const double top = locked_values.head(n_locked).maxCoeff();
            // Clearly above every locked value: nothing was missed.
            if (theta(0) - last_residuals(0) > top + swap_margin) break;
            if (!converged(0)) {
                restart_from(0, std::max<Eigen::Index>(1, m / 3));
                continue;
            }
            if (theta(0) < top - swap_margin) {
                // A lower eigenvalue was missed: replace the highest locked pair.
                Eigen::Index worst = 0;
                locked_values.head(n_locked).maxCoeff(&worst);
                locked.col(worst) = x.col(0);
                locked_values(worst) = theta(0);
                kept = 0;
                next = detail::random_state<Scalar>(dim, rng);
                continue;
            }
            break;
        }

        Eigen::Index i = 0;
        for (; i < nr && converged(i); ++i) {
            Vector y = x.col(i);
            detail::project_out(y, locked.leftCols(n_locked));
            locked.col(n_locked) = y / y.norm();
            locked_values(n_locked) = theta(i);
            ++n_locked;
        }
        if (n_locked >= k) {
            verifying = true;
            if (n_locked == dim) break;
            kept = 0;
            next = detail::random_state<Scalar>(dim, rng);
            continue;
        }
        const Eigen::Index remaining = k - n_locked;
        const Eigen::Index room = std::min(m_max, dim - n_locked);
        restart_from(i, std::min(room - 1, remaining + std::max<Eigen::Index>(1, (room - remaining) / 3)));
    }

    std::vector<Eigen::Index> order(n_locked);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](Eigen::Index i, Eigen::Index j) { return locked_values(i) < locked_values(j); });
    EigenSet<Scalar> out;
    out.eigenvalues.resize(k);
    out.eigenvectors.resize(dim, k);
    for (Eigen::Index i = 0; i < k; ++i) {
        out.eigenvalues(i) = locked_values(order[i]);
        out.eigenvectors.col(i) = locked.col(order[i]);
    }
    out.residuals = residual_norms(a, out.eigenvalues, out.eigenvectors);
    return out;
}

// Lowest k eigenpairs through the dense path when the register is small
// enough, Lanczos otherwise.
template <typename Scalar>
EigenSet<Scalar> lowest_eigenpairs(const PauliSum& op, Eigen::Index k, const LanczosOptions& opts = {},
                                   std::size_t dense_limit = 10) {
    if (op.n_qubits() <= dense_limit) {
        EigenSet<Scalar> full = dense_eigh<Scalar>(op);
        k = std::min(k, full.size());
        return {full.eigenvalues.head(k), full.eigenvectors.leftCols(k), full.residuals.head(k)};
    }
    return lanczos_lowest<Scalar>(op, k, opts);
}

// ---------------------------------------------------------------------------

struct EnergyCluster {
    Eigen::Index first = 0;
    Eigen::Index count = 0;
    double energy = 0.0;  // mean of the member eigenvalues
};

// Groups ascending eigenvalues into chains with spacing below `spacing`.
inline std::vector<EnergyCluster> energy_clusters(const Eigen::VectorXd& ascending,
                                                  double spacing = kClusterSpacing) {
    std::vector<EnergyCluster> out;
    for (Eigen::Index i = 0; i < ascending.size(); ++i) {
        if (!out.empty() && ascending(i) - ascending(i - 1) < spacing) {
            auto& c = out.back();
            c.energy = (c.energy * static_cast<double>(c.count) + ascending(i)) / static_cast<double>(c.count + 1);
            ++c.count;
        } else {
            out.push_back({i, 1, ascending(i)});
        }
    }
    return out;
}

// |<up_n|down_ground>|^2 per retained up-state and per degenerate cluster.
struct OverlapTable {
    Eigen::VectorXd per_state;
    std::vector<EnergyCluster> clusters;
    Eigen::VectorXd per_cluster;  // basis-invariant cluster sums

    double total() const { return per_state.sum(); }
};

template <typename Scalar>
OverlapTable overlaps(const EigenSet<Scalar>& up, const StateVector<Scalar>& down_ground) {
    if (up.eigenvectors.rows() != down_ground.size()) {
        throw std::invalid_argument("overlaps: dimension mismatch");
    }
    OverlapTable table;
    table.per_state = (up.eigenvectors.adjoint() * down_ground).cwiseAbs2();
    table.clusters = energy_clusters(up.eigenvalues);
    table.per_cluster.resize(static_cast<Eigen::Index>(table.clusters.size()));
    for (std::size_t c = 0; c < table.clusters.size(); ++c) {
        const auto& cl = table.clusters[c];
        table.per_cluster(static_cast<Eigen::Index>(c)) = table.per_state.segment(cl.first, cl.count).sum();
    }
    return table;
}

// |<up_n|down_m>|^2 for every retained pair.
template <typename Scalar>
Eigen::MatrixXd overlap_matrix(const EigenSet<Scalar>& up, const EigenSet<Scalar>& down) {
    if (up.eigenvectors.rows() != down.eigenvectors.rows()) {
        throw std::invalid_argument("overlap_matrix: dimension mismatch");
    }
    return (up.eigenvectors.adjoint() * down.eigenvectors).cwiseAbs2();
}

struct GapReport {
    double gap = 0.0;        // E_1 - E_0
    double threshold = 0.0;
    bool flagged = false;    // gap < threshold
};

template <typename Scalar>
GapReport gap_check(const EigenSet<Scalar>& down, double threshold) {
    if (down.size() < 2) {
        throw std::invalid_argument("gap_check: need at least two eigenpairs");
    }
    GapReport r;
    r.gap = down.eigenvalues(1) - down.eigenvalues(0);
    r.threshold = threshold;
    r.flagged = r.gap < threshold;
    return r;
}

}  // namespace qts
