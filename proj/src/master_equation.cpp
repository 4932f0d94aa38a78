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

#include "qts/master_equation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace qts {

double transition_rate(double delta_sq, double omega, const BathParams& bath, RateModel model) {
    if (delta_sq == 0.0) return 0.0;
    return model == RateModel::Marcus ? marcus_rate(delta_sq, omega, bath) : lineshape_rate(delta_sq, omega, bath);
}

RateMatrix assemble_rates(const Eigen::VectorXd& up_energies, const Eigen::VectorXd& down_energies,
                          const Eigen::MatrixXd& overlap, double eps, const BathParams& bath, RateModel model,
                          double delta_p) {
    if (overlap.rows() != up_energies.size() || overlap.cols() != down_energies.size()) {
        throw std::invalid_argument("assemble_rates: overlap table does not match the eigensets");
    }
    if ((overlap.array() < 0.0).any() || !overlap.allFinite()) {
        throw std::invalid_argument("assemble_rates: overlaps must be finite and non-negative");
    }
    bath.validate();

    const auto up_clusters = energy_clusters(up_energies);
    const auto down_clusters = energy_clusters(down_energies);
    const auto n_up = static_cast<Eigen::Index>(up_clusters.size());
    const auto n_down = static_cast<Eigen::Index>(down_clusters.size());

    RateMatrix rm;
    rm.up_energies.resize(n_up);
    rm.up_degeneracy.resize(n_up);
    rm.down_energies.resize(n_down);
    rm.down_degeneracy.resize(n_down);
    for (Eigen::Index n = 0; n < n_up; ++n) {
        rm.up_energies(n) = up_clusters[n].energy;
        rm.up_degeneracy(n) = static_cast<int>(up_clusters[n].count);
    }
    for (Eigen::Index m = 0; m < n_down; ++m) {
        rm.down_energies(m) = down_clusters[m].energy + eps;
        rm.down_degeneracy(m) = static_cast<int>(down_clusters[m].count);
    }

    // A cluster's population is spread evenly over its members, so a rate out
    // of a cluster averages over the members and sums over the targets.
    const double delta_sq = delta_p * delta_p;
    rm.forward = Eigen::MatrixXd::Zero(n_up, n_down);
    rm.backward = Eigen::MatrixXd::Zero(n_down, n_up);
    for (Eigen::Index n = 0; n < n_up; ++n) {
        for (Eigen::Index m = 0; m < n_down; ++m) {
            const auto& cu = up_clusters[n];
            const auto& cd = down_clusters[m];
            const double o = overlap.block(cu.first, cd.first, cu.count, cd.count).sum();
            if (o == 0.0) continue;
            const double x = rm.up_energies(n) - rm.down_energies(m);  // up minus down
            rm.forward(n, m) = transition_rate(delta_sq * o / static_cast<double>(cd.count), x, bath, model);
            rm.backward(m, n) = transition_rate(delta_sq * o / static_cast<double>(cu.count), -x, bath, model);
        }
    }
    rm.escape.resize(n_down + n_up);
    rm.escape.head(n_down) = rm.forward.colwise().sum().transpose();
    rm.escape.tail(n_up) = rm.backward.colwise().sum().transpose();
    return rm;
}

Eigen::MatrixXd RateMatrix::generator() const {
    const Eigen::Index nd = n_down();
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(size(), size());
    g.block(nd, 0, n_up(), nd) = forward;
    g.block(0, nd, nd, n_up()) = backward;
    g.diagonal() = -escape;
    return g;
}

double escape_rate(const RateMatrix& rm, Eigen::Index initial) {
    if (initial < 0 || initial >= rm.n_down()) {
        throw std::out_of_range("escape_rate: initial state is not retained");
    }
    return rm.forward.col(initial).sum();
}

namespace {

// One TR-BDF2 step for the linear system dP/dt = G P.
class TrBdf2 {
public:
    explicit TrBdf2(const Eigen::MatrixXd& g) : g_(g), id_(Eigen::MatrixXd::Identity(g.rows(), g.cols())) {}

    Eigen::VectorXd step(const Eigen::VectorXd& y, double h) const {
        constexpr double gamma = 2.0 - std::numbers::sqrt2;
        constexpr double d = (1.0 - gamma) / (2.0 - gamma);
        constexpr double c1 = 1.0 / (gamma * (2.0 - gamma));
        constexpr double c0 = (1.0 - gamma) * (1.0 - gamma) / (gamma * (2.0 - gamma));
        const double half = 0.5 * gamma * h;
        const Eigen::VectorXd y_gamma = (id_ - half * g_).partialPivLu().solve(y + half * (g_ * y));
        return (id_ - d * h * g_).partialPivLu().solve(c1 * y_gamma - c0 * y);
    }

private:
    const Eigen::MatrixXd& g_;
    Eigen::MatrixXd id_;
};

}  // namespace

std::vector<PopulationState> evolve(const RateMatrix& rm, const PopulationState& p0, const std::vector<double>& times,
                                    const IntegratorOptions& opts) {
    if (p0.probabilities.size() != rm.size()) {
        throw std::invalid_argument("evolve: initial state has the wrong size");
    }
    if ((p0.probabilities.array() < 0.0).any() || std::abs(p0.probabilities.sum() - 1.0) > 1e-9) {
        throw std::invalid_argument("evolve: initial populations must be non-negative and sum to 1");
    }
    if (!std::is_sorted(times.begin(), times.end()) || (!times.empty() && times.front() < p0.time)) {
        throw std::invalid_argument("evolve: output times must be ascending and not before the initial time");
    }

    const Eigen::MatrixXd g = rm.generator();
    const TrBdf2 stepper(g);
    const double rate_scale = g.cwiseAbs().colwise().sum().maxCoeff();

    std::vector<PopulationState> out;
    out.reserve(times.size());
    Eigen::VectorXd y = p0.probabilities;
    double t = p0.time;
    double h = rate_scale > 0.0 ? 1e-3 / rate_scale : 1.0;
    long steps = 0;

    for (double target : times) {
        while (t < target) {
            if (rate_scale == 0.0) {
                t = target;
                break;
            }
            if (++steps > opts.max_steps) {
                throw IntegrationError("evolve: step budget exhausted", t);
            }
            const double remaining = target - t;
            const bool last = h >= remaining;
            const double dt = last ? remaining : h;

            // Step doubling: error of the two half steps is (y2 - y1)/3.
            const Eigen::VectorXd y1 = stepper.step(y, dt);
            const Eigen::VectorXd y2 = stepper.step(stepper.step(y, 0.5 * dt), 0.5 * dt);
            const Eigen::ArrayXd scale =
                opts.abs_tol + opts.rel_tol * y.array().abs().max(y2.array().abs());
            const double err = ((y2 - y1).array().abs() / 3.0 / scale).maxCoeff();

            if (err <= 1.0) {
                y = y2;
                t = last ? target : t + dt;
            }
            const double factor = err > 0.0 ? 0.9 * std::pow(err, -1.0 / 3.0) : 4.0;
            const double next = dt * std::clamp(factor, 0.2, 4.0);
            if (err > 1.0 || !last) h = next;
            if (h < 1e-14 * std::max(1.0, std::abs(t))) {
                throw IntegrationError("evolve: step size underflow", t);
            }
        }
        out.push_back({y, target});
    }
    return out;
}

Eigen::VectorXd stationary_state(const RateMatrix& rm) {
    const Eigen::Index n = rm.size();
    Eigen::MatrixXd a(n + 1, n);
    a.topRows(n) = rm.generator();
    a.row(n).setOnes();
    Eigen::VectorXd b = Eigen::VectorXd::Zero(n + 1);
    b(n) = 1.0;
    return a.colPivHouseholderQr().solve(b);
}

}  // namespace qts
