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

#include "qts/tomography.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <thread>

namespace qts {

namespace {

void check_position(std::size_t n_qubits, std::size_t l, const char* who) {
    if (n_qubits < 1 || n_qubits > kMaxQubits) {
        throw std::invalid_argument(std::string(who) + ": unsupported qubit count");
    }
    if (l < 1 || l > n_qubits + 1) {
        throw std::out_of_range(std::string(who) + ": kink position " + std::to_string(l) + " outside 1.." +
                                std::to_string(n_qubits + 1));
    }
}

const double kSqrt2Pi = std::sqrt(2.0 * std::numbers::pi);

}  // namespace

std::uint64_t kink_basis_index(std::size_t n_qubits, std::size_t l) {
    check_position(n_qubits, l, "kink_basis_index");
    // Qubit q (1-based) is bit N - q; qubits l..N are down (bit set).
    const std::size_t down = n_qubits + 1 - l;
    return down == 0 ? 0 : (std::uint64_t{1} << down) - 1;
}

ProbeCoupling coupler_for_kink(std::size_t n_qubits, std::size_t l, double jp, double delta_p) {
    check_position(n_qubits, l, "coupler_for_kink");
    if (!(jp > 0.0) || !std::isfinite(jp)) {
        throw std::invalid_argument("coupler_for_kink: J_p must be > 0");
    }
    ProbeCoupling pc;
    pc.couplings.assign(n_qubits, Eigen::Vector3d::Zero());
    pc.delta_p = delta_p;
    if (l >= 2) pc.couplings[l - 2].z() = -jp;
    if (l <= n_qubits) pc.couplings[l - 1].z() = jp;
    pc.validate();
    return pc;
}

template <typename Scalar>
ReferenceReport verify_reference(const ModelSpec& model, const ProbeCoupling& pc, const StateVector<Scalar>& target,
                                 double min_gap, double min_fidelity, const LanczosOptions& lanczos,
                                 std::size_t dense_limit) {
    const PauliSum down_h = build_down_hamiltonian(build_source_hamiltonian(model), build_coupling(pc));
    if (target.size() != static_cast<Eigen::Index>(down_h.dimension())) {
        throw std::invalid_argument("verify_reference: target has the wrong dimension");
    }
    const EigenSet<Scalar> down = lowest_eigenpairs<Scalar>(down_h, 2, lanczos, dense_limit);

    ReferenceReport r;
    r.ground_energy = down.eigenvalues(0);
    r.gap = down.size() > 1 ? down.eigenvalues(1) - down.eigenvalues(0) : std::numeric_limits<double>::infinity();
    r.fidelity = std::norm(target.dot(down.vector(0)));
    if (r.fidelity < min_fidelity) {
        r.flagged = true;
        r.reason = "fidelity " + std::to_string(r.fidelity) + " below " + std::to_string(min_fidelity);
    }
    if (r.gap < min_gap) {
        if (r.flagged) r.reason += "; ";
        r.flagged = true;
        r.reason += "gap " + std::to_string(r.gap) + " GHz below " + std::to_string(min_gap) + " GHz";
    }
    return r;
}

template ReferenceReport verify_reference<double>(const ModelSpec&, const ProbeCoupling&, const StateVector<double>&,
                                                  double, double, const LanczosOptions&, std::size_t);
template ReferenceReport verify_reference<Complex>(const ModelSpec&, const ProbeCoupling&,
                                                   const StateVector<Complex>&, double, double,
                                                   const LanczosOptions&, std::size_t);

Eigen::MatrixXd TomographyGrid::normalized() const {
    const double m = max_rate();
    return m > 0.0 ? Eigen::MatrixXd(rate / m) : rate;
}

Eigen::MatrixXd SweepResult::predicted_peaks() const {
    Eigen::MatrixXd p(static_cast<Eigen::Index>(columns.size()), static_cast<Eigen::Index>(levels.size()));
    for (std::size_t r = 0; r < columns.size(); ++r) {
        for (std::size_t c = 0; c < levels.size(); ++c) {
            p(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                levels[c].energy - columns[r].report.ground_energy + bath.reorganization;
        }
    }
    return p;
}

namespace {

EigenSet<double> truncate(const EigenSet<double>& s, Eigen::Index k) {
    return {s.eigenvalues.head(k), s.eigenvectors.leftCols(k), s.residuals.head(k)};
}

struct ColumnResult {
    ReferenceColumn column;
    std::exception_ptr error;
};

}  // namespace

SweepResult run_sweep(const ModelSpec& model, const SweepSpec& spec, const BathParams& bath) {
    model.validate();
    bath.validate();
    const std::size_t n = model.n_qubits;
    if (spec.levels < 1) throw std::invalid_argument("run_sweep: at least one level is required");
    if (!(spec.delta_p > 0.0)) throw std::invalid_argument("run_sweep: Delta_p must be > 0");

    SweepResult out;
    out.n_qubits = n;
    out.bath = bath;

    std::vector<std::size_t> positions = spec.positions;
    if (positions.empty()) {
        for (std::size_t l = 1; l <= n + 1; ++l) positions.push_back(l);
    }
    for (std::size_t l : positions) check_position(n, l, "run_sweep");

    const PauliSum source = build_source_hamiltonian(model);
    const auto dim = static_cast<Eigen::Index>(source.dimension());
    const bool dense = n <= spec.dense_limit;

    // Down manifold per position, independent jobs.
    std::vector<ColumnResult> results(positions.size());
    std::vector<EigenSet<double>> grounds(positions.size());
    {
        std::atomic<std::size_t> next{0};
        auto worker = [&]() {
            for (std::size_t i = next++; i < positions.size(); i = next++) {
                const std::size_t l = positions[i];
                try {
                    const ProbeCoupling pc = coupler_for_kink(n, l, spec.jp, spec.delta_p);
                    const PauliSum down_h = build_down_hamiltonian(source, build_coupling(pc));
                    EigenSet<double> down = lowest_eigenpairs<double>(down_h, 2, spec.lanczos, spec.dense_limit);
                    ReferenceReport r;
                    r.ground_energy = down.eigenvalues(0);
                    r.gap = down.size() > 1 ? down.eigenvalues(1) - down.eigenvalues(0)
                                            : std::numeric_limits<double>::infinity();
                    r.fidelity = std::norm(down.vector(0)(static_cast<Eigen::Index>(kink_basis_index(n, l))));
                    results[i].column.l = l;
                    results[i].column.report = r;
                    grounds[i] = std::move(down);
                } catch (const NonConvergence& e) {
                    results[i].error = std::make_exception_ptr(
                        NonConvergence("l=" + std::to_string(l) + ": " + e.what(), e.residuals()));
                } catch (...) {
                    results[i].error = std::current_exception();
                }
            }
        };
        const std::size_t n_threads = std::clamp<std::size_t>(spec.threads, 1, positions.size());
        std::vector<std::thread> pool;
        for (std::size_t t = 1; t < n_threads; ++t) pool.emplace_back(worker);
        worker();
        for (auto& t : pool) t.join();
        for (const auto& r : results) {
            if (r.error) std::rethrow_exception(r.error);
        }
    }

    // Up manifold, diagonalized once.
    Eigen::Index k = spec.retained > 0 ? std::min<Eigen::Index>(spec.retained, dim)
                                       : std::min<Eigen::Index>(static_cast<Eigen::Index>(spec.levels) + 6, dim);
    if (dense) k = dim;
    EigenSet<double> up;
    try {
        up = lowest_eigenpairs<double>(source, k, spec.lanczos, spec.dense_limit);
    } catch (const NonConvergence& e) {
        throw NonConvergence(std::string("up manifold: ") + e.what(), e.residuals());
    }

    auto clusters = energy_clusters(up.eigenvalues);
    const std::size_t levels_shown = std::min(spec.levels, clusters.size());
    if (levels_shown < spec.levels) {
        out.warnings.push_back("only " + std::to_string(levels_shown) + " distinct levels available");
    }
    const double e0_up = clusters.front().energy;
    const double width = bath.width;
    const auto rows = static_cast<Eigen::Index>(positions.size());

    // Peak offset of every row: ground level position E_0^up - E_0^down(l) + eps_p.
    Eigen::VectorXd offset(rows);
    for (Eigen::Index r = 0; r < rows; ++r) {
        offset(r) = e0_up - results[static_cast<std::size_t>(r)].column.report.ground_energy + bath.reorganization;
    }

    TomographyGrid& grid = out.grid;
    grid.positions = positions;
    if (spec.epsilon) {
        const auto& eps = *spec.epsilon;
        if (eps.empty()) throw std::invalid_argument("run_sweep: empty epsilon grid");
        if (!std::is_sorted(eps.begin(), eps.end())) {
            throw std::invalid_argument("run_sweep: epsilon grid must be ascending");
        }
        const auto cols = static_cast<Eigen::Index>(eps.size());
        grid.epsilon.resize(rows, cols);
        for (Eigen::Index r = 0; r < rows; ++r) {
            grid.epsilon.row(r) = Eigen::Map<const Eigen::RowVectorXd>(eps.data(), cols);
        }
        grid.epsilon_rel = grid.epsilon.colwise() - offset;
    } else {
        const double top = clusters[levels_shown - 1].energy - e0_up;
        const double lo = -2.0 * width;
        const double hi = top + 2.0 * width;
        const double step = width / 10.0;
        const auto cols = static_cast<Eigen::Index>(std::floor((hi - lo) / step + 1e-9)) + 1;
        Eigen::RowVectorXd rel(cols);
        for (Eigen::Index j = 0; j < cols; ++j) rel(j) = lo + step * static_cast<double>(j);
        grid.epsilon_rel = rel.replicate(rows, 1);
        grid.epsilon = grid.epsilon_rel.colwise() + offset;
    }

    // Retention window E_n - E_0 <= eps_max + 5W, eps measured from the ground peak.
    const double window = grid.epsilon_rel.maxCoeff() + 5.0 * width;
    if (!dense && up.eigenvalues(up.size() - 1) - e0_up <= window && up.size() < dim) {
        if (spec.retained > 0) {
            out.warnings.push_back("retention window extends past the " + std::to_string(up.size()) +
                                   " computed up-manifold states");
        } else {
            while (up.eigenvalues(up.size() - 1) - e0_up <= window && up.size() < dim) {
                up = lowest_eigenpairs<double>(source, std::min<Eigen::Index>(2 * up.size(), dim), spec.lanczos,
                                               spec.dense_limit);
            }
            clusters = energy_clusters(up.eigenvalues);
        }
    }
    Eigen::Index kept = 0;
    while (kept < up.size() && up.eigenvalues(kept) - e0_up <= window) ++kept;
    // Never split a degenerate cluster at the window edge.
    while (kept < up.size() && up.eigenvalues(kept) - up.eigenvalues(kept - 1) < kClusterSpacing) ++kept;
    kept = std::max<Eigen::Index>(kept, static_cast<Eigen::Index>(clusters[levels_shown - 1].first +
                                                                  clusters[levels_shown - 1].count));
    out.up = truncate(up, kept);
    out.levels = energy_clusters(out.up.eigenvalues);
    out.levels_shown = levels_shown;

    // Rates per position; the grid columns of one row share the eigen-data.
    grid.rate.resize(rows, grid.epsilon.cols());
    {
        std::atomic<std::size_t> next{0};
        auto worker = [&]() {
            for (std::size_t i = next++; i < positions.size(); i = next++) {
                try {
                    auto& col = results[i].column;
                    col.up_overlaps = (out.up.eigenvectors.transpose() * grounds[i].vector(0)).cwiseAbs2();
                    Eigen::VectorXd e_down(1);
                    e_down(0) = col.report.ground_energy;
                    const auto r = static_cast<Eigen::Index>(i);
                    for (Eigen::Index j = 0; j < grid.epsilon.cols(); ++j) {
                        const RateMatrix rm = assemble_rates(out.up.eigenvalues, e_down, col.up_overlaps,
                                                             grid.epsilon(r, j), bath, spec.rate_model, 1.0);
                        grid.rate(r, j) = escape_rate(rm, 0);
                    }
                } catch (...) {
                    results[i].error = std::current_exception();
                }
            }
        };
        const std::size_t n_threads = std::clamp<std::size_t>(spec.threads, 1, positions.size());
        std::vector<std::thread> pool;
        for (std::size_t t = 1; t < n_threads; ++t) pool.emplace_back(worker);
        worker();
        for (auto& t : pool) t.join();
        for (const auto& r : results) {
            if (r.error) std::rethrow_exception(r.error);
        }
    }

    for (auto& r : results) {
        auto& rep = r.column.report;
        if (rep.fidelity < spec.min_fidelity) {
            rep.flagged = true;
            rep.reason = "fidelity " + std::to_string(rep.fidelity) + " below " + std::to_string(spec.min_fidelity);
        }
        if (rep.gap < width) {
            if (rep.flagged) rep.reason += "; ";
            rep.flagged = true;
            rep.reason += "gap " + std::to_string(rep.gap) + " GHz below W";
        }
        if (rep.flagged) out.warnings.push_back("l=" + std::to_string(r.column.l) + ": " + rep.reason);
        out.columns.push_back(std::move(r.column));
    }
    return out;
}

// ---------------------------------------------------------------------------

const Peak* PeakSet::find(std::size_t l, Eigen::Index level) const {
    for (const auto& p : peaks) {
        if (p.l == l && p.level == level) return &p;
    }
    return nullptr;
}

namespace {

// Vertex of the parabola through three points.
struct Vertex {
    double x;
    double y;
    double curvature;  // second derivative
};

Vertex parabola_vertex(double x0, double y0, double x1, double y1, double x2, double y2) {
    const double d01 = (y1 - y0) / (x1 - x0);
    const double d12 = (y2 - y1) / (x2 - x1);
    const double a = (d12 - d01) / (x2 - x0);  // y = y1 + b (x - x1) + a (x - x1)^2
    const double b = d01 + a * (x1 - x0);
    if (!(a < 0.0)) return {x1, y1, 2.0 * a};
    const double dx = std::clamp(-b / (2.0 * a), x0 - x1, x2 - x1);
    return {x1 + dx, y1 + b * dx + a * dx * dx, 2.0 * a};
}

double interpolate_row(const Eigen::RowVectorXd& x, const Eigen::RowVectorXd& y, double at) {
    const Eigen::Index n = x.size();
    if (n == 0 || at < x(0) || at > x(n - 1)) return std::numeric_limits<double>::quiet_NaN();
    const auto it = std::upper_bound(x.data(), x.data() + n, at);
    const Eigen::Index j = std::min<Eigen::Index>(std::max<Eigen::Index>(it - x.data(), 1), n - 1);
    const double t = (at - x(j - 1)) / (x(j) - x(j - 1));
    return (1.0 - t) * y(j - 1) + t * y(j);
}

}  // namespace

PeakSet extract_peaks(const TomographyGrid& grid, const Eigen::MatrixXd& predicted, std::size_t levels_shown,
                      double width) {
    if (!(width > 0.0)) throw std::invalid_argument("extract_peaks: W must be > 0");
    const Eigen::Index rows = grid.rate.rows();
    const Eigen::Index cols = grid.rate.cols();
    if (predicted.rows() != rows || static_cast<std::size_t>(rows) != grid.positions.size()) {
        throw std::invalid_argument("extract_peaks: predicted positions do not match the grid");
    }
    if (static_cast<Eigen::Index>(levels_shown) > predicted.cols()) {
        throw std::invalid_argument("extract_peaks: more levels requested than predicted");
    }
    if (cols >= 2) {
        const double spacing =
            (grid.epsilon.rightCols(cols - 1) - grid.epsilon.leftCols(cols - 1)).maxCoeff();
        if (spacing > width / 4.0) {
            throw std::invalid_argument("extract_peaks: grid spacing " + std::to_string(spacing) +
                                        " GHz coarser than W/4");
        }
    }

    PeakSet out;
    for (Eigen::Index r = 0; r < rows; ++r) {
        const std::size_t l = grid.positions[static_cast<std::size_t>(r)];
        const Eigen::RowVectorXd x = grid.epsilon.row(r);
        const Eigen::RowVectorXd y = grid.rate.row(r);
        const double offset = x.size() ? x(0) - grid.epsilon_rel(r, 0) : 0.0;
        std::vector<Peak> best(static_cast<std::size_t>(predicted.cols()));
        std::vector<bool> have(best.size(), false);

        for (Eigen::Index j = 1; j + 1 < cols; ++j) {
            if (!(y(j) > y(j - 1) && y(j) >= y(j + 1)) || y(j) <= 0.0) continue;
            const Vertex v = parabola_vertex(x(j - 1), y(j - 1), x(j), y(j), x(j + 1), y(j + 1));

            Peak p;
            p.l = l;
            p.epsilon = v.x;
            p.epsilon_rel = v.x - offset;
            p.height = v.y;
            p.width = v.curvature < 0.0 ? std::sqrt(-v.y / v.curvature) : std::numeric_limits<double>::quiet_NaN();
            p.multiplicity = 0;
            Eigen::Index nearest = -1;
            double dist = std::numeric_limits<double>::infinity();
            for (Eigen::Index c = 0; c < predicted.cols(); ++c) {
                const double d = std::abs(predicted(r, c) - v.x);
                if (d <= width) ++p.multiplicity;
                if (d < dist) {
                    dist = d;
                    nearest = c;
                }
            }
            p.multiplicity = std::max(p.multiplicity, 1);
            if (nearest < 0 || dist > 2.0 * width) {
                out.unmatched.push_back(p);
                continue;
            }
            p.level = nearest;
            p.predicted = predicted(r, nearest);
            auto& slot = best[static_cast<std::size_t>(nearest)];
            if (!have[static_cast<std::size_t>(nearest)]) {
                slot = p;
                have[static_cast<std::size_t>(nearest)] = true;
            } else if (std::abs(p.epsilon - p.predicted) < std::abs(slot.epsilon - slot.predicted)) {
                slot.level = -1;
                out.unmatched.push_back(slot);
                slot = p;
            } else {
                p.level = -1;
                out.unmatched.push_back(p);
            }
        }

        for (std::size_t c = 0; c < best.size(); ++c) {
            if (have[c]) {
                out.peaks.push_back(best[c]);
            } else if (c < levels_shown) {
                Peak p;
                p.l = l;
                p.level = static_cast<Eigen::Index>(c);
                p.predicted = predicted(r, static_cast<Eigen::Index>(c));
                p.epsilon = p.predicted;
                p.epsilon_rel = p.predicted - offset;
                p.height = interpolate_row(x, y, p.predicted);
                p.width = std::numeric_limits<double>::quiet_NaN();
                p.resolved = false;
                p.multiplicity = 0;
                for (Eigen::Index o = 0; o < predicted.cols(); ++o) {
                    if (std::abs(predicted(r, o) - p.predicted) <= width) ++p.multiplicity;
                }
                if (!std::isnan(p.height)) out.peaks.push_back(p);
            }
        }
    }
    return out;
}

PeakSet extract_peaks(const SweepResult& sweep) {
    return extract_peaks(sweep.grid, sweep.predicted_peaks(), sweep.levels_shown, sweep.bath.width);
}

AmplitudeMap reconstruct_amplitudes(const PeakSet& peaks, const std::vector<std::size_t>& positions,
                                    std::size_t levels, double width, const std::vector<double>& fidelity) {
    if (fidelity.size() != positions.size()) {
        throw std::invalid_argument("reconstruct_amplitudes: one fidelity per position is required");
    }
    const auto n_levels = static_cast<Eigen::Index>(levels);
    const auto n_pos = static_cast<Eigen::Index>(positions.size());
    AmplitudeMap map;
    map.positions = positions;
    map.raw = Eigen::MatrixXd::Constant(n_levels, n_pos, std::numeric_limits<double>::quiet_NaN());
    map.amplitude_sq = map.raw;
    map.fidelity = Eigen::Map<const Eigen::VectorXd>(fidelity.data(), n_pos);
    map.resolved = Eigen::MatrixXi::Zero(n_levels, n_pos);
    map.multiplicity = Eigen::MatrixXi::Zero(n_levels, n_pos);

    const double peak_scale = kSqrt2Pi / width;  // Gaussian maximum per unit overlap
    for (Eigen::Index c = 0; c < n_pos; ++c) {
        for (Eigen::Index n = 0; n < n_levels; ++n) {
            const Peak* p = peaks.find(positions[static_cast<std::size_t>(c)], n);
            if (!p) continue;
            map.raw(n, c) = p->height / peak_scale;
            const double f = fidelity[static_cast<std::size_t>(c)];
            map.amplitude_sq(n, c) = f > 0.0 ? map.raw(n, c) / f : map.raw(n, c);
            map.resolved(n, c) = p->resolved ? 1 : 0;
            map.multiplicity(n, c) = p->multiplicity;
        }
    }
    return map;
}

AmplitudeMap reconstruct_amplitudes(const SweepResult& sweep, const PeakSet& peaks) {
    std::vector<double> fidelity;
    for (const auto& c : sweep.columns) fidelity.push_back(c.report.fidelity);
    return reconstruct_amplitudes(peaks, sweep.grid.positions, sweep.levels_shown, sweep.bath.width, fidelity);
}

Eigen::MatrixXd direct_kink_amplitudes(const EigenSet<double>& up, std::size_t n_qubits, std::size_t levels) {
    const auto rows = std::min<Eigen::Index>(static_cast<Eigen::Index>(levels), up.size());
    Eigen::MatrixXd c(rows, static_cast<Eigen::Index>(n_qubits + 1));
    for (std::size_t l = 1; l <= n_qubits + 1; ++l) {
        const auto idx = static_cast<Eigen::Index>(kink_basis_index(n_qubits, l));
        c.col(static_cast<Eigen::Index>(l - 1)) = up.eigenvectors.row(idx).head(rows).transpose();
    }
    return c;
}

NodeReport find_nodes(const Eigen::VectorXd& row, double max_fraction) {
    NodeReport out;
    if (row.size() < 3) return out;
    const double peak = row.cwiseAbs().maxCoeff();
    if (!(peak > 0.0)) return out;
    const double tie = 1e-9 * peak;

    // Collapse plateaus into runs [first, last].
    struct Run {
        Eigen::Index first, last;
        double value;
    };
    std::vector<Run> runs;
    for (Eigen::Index i = 0; i < row.size(); ++i) {
        if (!runs.empty() && std::abs(row(i) - runs.back().value) <= tie) {
            runs.back().last = i;
        } else {
            runs.push_back({i, i, row(i)});
        }
    }
    for (std::size_t k = 1; k + 1 < runs.size(); ++k) {
        const auto& r = runs[k];
        if (r.value < runs[k - 1].value && r.value < runs[k + 1].value && r.value <= max_fraction * peak) {
            out.positions.push_back(0.5 * static_cast<double>(r.first + r.last) + 1.0);
            out.depth.push_back(r.value / peak);
        }
    }
    return out;
}

int count_sign_changes(const Eigen::VectorXd& row, double zero_tol) {
    int changes = 0;
    int last = 0;
    for (Eigen::Index i = 0; i < row.size(); ++i) {
        if (std::abs(row(i)) <= zero_tol) continue;
        const int s = row(i) > 0.0 ? 1 : -1;
        if (last != 0 && s != last) ++changes;
        last = s;
    }
    return changes;
}

}  // namespace qts
