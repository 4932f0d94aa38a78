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

// master_equation.hpp - incoherent probe-tunneling rates between the probe-down
// and probe-up eigenstate manifolds, and the population master equation
//   dP_mu/dt = -Gamma_mu P_mu + sum_nu Gamma_{mu nu} P_nu.

#pragma once

#include "qts/bath.hpp"
#include "qts/eigensolver.hpp"

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <vector>

namespace qts {

enum class RateModel { Marcus, Lineshape };

// States are degenerate-cluster aggregates. Index order in the generator:
// down-manifold clusters first, then up-manifold clusters.
struct RateMatrix {
    Eigen::VectorXd down_energies;   // E_m^down + eps (GHz)
    Eigen::VectorXd up_energies;     // E_n^up (GHz)
    Eigen::VectorXi down_degeneracy;
    Eigen::VectorXi up_degeneracy;
    Eigen::MatrixXd forward;         // (n_up x n_down): down m -> up n
    Eigen::MatrixXd backward;        // (n_down x n_up): up n -> down m
    Eigen::VectorXd escape;          // total outgoing rate per state

    Eigen::Index n_down() const noexcept { return down_energies.size(); }
    Eigen::Index n_up() const noexcept { return up_energies.size(); }
    Eigen::Index size() const noexcept { return n_down() + n_up(); }

    // G with G(mu, nu) = rate nu -> mu off the diagonal and G(mu, mu) = -Gamma_mu;
    // every column sums to zero.
    Eigen::MatrixXd generator() const;
};

// Rates between retained eigenstates. `overlap` is |<up_n|down_m>|^2 with
// shape (up x down); energies ascending. Rates are scaled by delta_p^2.
RateMatrix assemble_rates(const Eigen::VectorXd& up_energies, const Eigen::VectorXd& down_energies,
                          const Eigen::MatrixXd& overlap, double eps, const BathParams& bath,
                          RateModel model = RateModel::Marcus, double delta_p = 1.0);

template <typename Scalar>
RateMatrix assemble_rates(const EigenSet<Scalar>& up, const EigenSet<Scalar>& down, double eps,
                          const BathParams& bath, RateModel model = RateModel::Marcus, double delta_p = 1.0) {
    return assemble_rates(up.eigenvalues, down.eigenvalues, overlap_matrix(up, down), eps, bath, model, delta_p);
}

// Escape rate out of down-manifold cluster `initial` (case-(a) column sum).
double escape_rate(const RateMatrix& rm, Eigen::Index initial = 0);

// Transition rate for final-minus-initial energy `omega` under the chosen model.
double transition_rate(double delta_sq, double omega, const BathParams& bath, RateModel model);

struct PopulationState {
    Eigen::VectorXd probabilities;
    double time = 0.0;  // ns
};

struct IntegratorOptions {
    double rel_tol = 1e-9;
    double abs_tol = 1e-12;
    long max_steps = 10'000'000;
};

class IntegrationError : public std::runtime_error {
public:
    IntegrationError(const std::string& what, double reached) : std::runtime_error(what), reached_(reached) {}
    double reached_time() const noexcept { return reached_; }

private:
    double reached_;
};

// Integrates the master equation with adaptive TR-BDF2 (L-stable), reporting
// the state at every point of `times` (ascending, starting at or after p0.time).
std::vector<PopulationState> evolve(const RateMatrix& rm, const PopulationState& p0, const std::vector<double>& times,
                                    const IntegratorOptions& opts = {});

// Normalized null vector of the generator.
Eigen::VectorXd stationary_state(const RateMatrix& rm);

}  // namespace qts
