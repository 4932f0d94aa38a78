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

#include "qts/bath.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <limits>
#include <numbers>

namespace qts {

double temperature_to_ghz(double millikelvin) {
    if (!(millikelvin >= 0.0)) {
        throw std::invalid_argument("temperature_to_ghz: temperature must be >= 0 mK");
    }
    return millikelvin * 1e-3 * kBoltzmannOverPlanckGHzPerK;
}

double fdt_reorganization(double width, double temperature) {
    if (!(width >= 0.0)) {
        throw std::invalid_argument("fdt_reorganization: width must be >= 0");
    }
    if (!(temperature > 0.0)) {
        throw std::invalid_argument("fdt_reorganization: temperature must be > 0");
    }
    return width * width / (2.0 * temperature);
}

BathParams BathParams::from_fdt(double width, double temperature, double eta, double cutoff) {
    BathParams b;
    b.temperature = temperature;
    b.reorganization = fdt_reorganization(width, temperature);
    b.width_sq = 2.0 * temperature * b.reorganization;
    b.width = std::sqrt(b.width_sq);
    b.eta = eta;
    b.cutoff = cutoff;
    b.mode = BathMode::Fdt;
    b.validate();
    return b;
}

BathParams BathParams::explicit_values(double width, double reorganization, double temperature, double eta,
                                       double cutoff) {
    BathParams b;
    b.width = width;
    b.width_sq = width * width;
    b.reorganization = reorganization;
    b.temperature = temperature;
    b.eta = eta;
    b.cutoff = cutoff;
    b.mode = BathMode::Explicit;
    b.validate();
    return b;
}

void BathParams::validate() const {
    if (!(width > 0.0) || !std::isfinite(width) || !(width_sq > 0.0)) {
        throw std::invalid_argument("BathParams: W must be > 0");
    }
    if (!(temperature > 0.0) || !std::isfinite(temperature)) {
        throw std::invalid_argument("BathParams: T must be > 0");
    }
    if (!(reorganization >= 0.0) || !std::isfinite(reorganization)) {
        throw std::invalid_argument("BathParams: eps_p must be >= 0");
    }
    if (!(eta >= 0.0) || !std::isfinite(eta)) {
        throw std::invalid_argument("BathParams: eta must be >= 0");
    }
    if (!(cutoff > 0.0) || !std::isfinite(cutoff)) {
        throw std::invalid_argument("BathParams: omega_c must be > 0");
    }
}

double marcus_rate(double delta_sq, double omega, const BathParams& bath) {
    const double detuning = omega + bath.reorganization;
    return delta_sq * std::sqrt(2.0 * std::numbers::pi / bath.width_sq) *
           std::exp(-detuning * detuning / (2.0 * bath.width_sq));
}

namespace {

// x / sinh(x), finite for every x >= 0.
double x_over_sinh(double x) {
    if (x < 1e-4) return 1.0 - x * x / 6.0;
    if (x > 700.0) return 2.0 * x * std::exp(-x);
    return x / std::sinh(x);
}

}  // namespace

double lineshape_integrand(double tau, double omega, const BathParams& bath) {
    using namespace std::complex_literals;
    const double detuning = omega + bath.reorganization;
    std::complex<double> value = std::exp(-1i * detuning * tau) * std::exp(-0.5 * bath.width_sq * tau * tau);
    if (bath.eta > 0.0) {
        const double power = 4.0 * bath.eta / std::numbers::pi;
        const std::complex<double> high_freq =
            (1.0 / (1.0 + 1i * bath.cutoff * tau)) * x_over_sinh(std::numbers::pi * bath.temperature * tau);
        value *= std::pow(high_freq, power);
    }
    return 2.0 * value.real();
}

double lineshape_rate(double delta_sq, double omega, const BathParams& bath, const LineshapeOptions& opts) {
    bath.validate();
    const double width = std::sqrt(bath.width_sq);
    const double t_max = std::sqrt(-2.0 * std::log(opts.envelope)) / width;
    const double detuning = std::abs(omega + bath.reorganization);

    // Panels no longer than one oscillation period and no longer than the
    // shortest time scale of the high-frequency factor.
    double panel = t_max / 8.0;
    if (detuning > 0.0) panel = std::min(panel, 2.0 * std::numbers::pi / detuning);
    if (bath.eta > 0.0) {
        panel = std::min(panel, 4.0 / bath.cutoff);
        panel = std::min(panel, 4.0 / (std::numbers::pi * bath.temperature));
    }
    const auto n_panels = static_cast<long>(std::ceil(t_max / panel));
    if (n_panels > 2'000'000) {
        throw QuadratureError("lineshape_rate: detuning too large for the oscillatory quadrature",
                              std::numeric_limits<double>::infinity());
    }
    panel = t_max / static_cast<double>(n_panels);

    auto f = [&](double tau) { return lineshape_integrand(tau, omega, bath); };
    using Quadrature = boost::math::quadrature::gauss_kronrod<double, 31>;

    double total = 0.0;
    double error = 0.0;
    double l1 = 0.0;
    for (long p = 0; p < n_panels; ++p) {
        const double a = panel * static_cast<double>(p);
        const double b = p + 1 == n_panels ? t_max : a + panel;
        double panel_error = 0.0;
        double panel_l1 = 0.0;
        total += Quadrature::integrate(f, a, b, 12, 1e-13, &panel_error, &panel_l1);
        error += panel_error;
        l1 += panel_l1;
    }
    // Accuracy relative to the result, floored at the rounding level of the
    // oscillating panel sum and at a fraction of the resonant peak height.
    const double peak = std::sqrt(2.0 * std::numbers::pi) / width;
    const double target = opts.rel_tol * std::abs(total) + 1e-15 * l1 + opts.peak_floor * peak;
    if (error > target) {
        char msg[128];
        std::snprintf(msg, sizeof msg, "lineshape_rate: quadrature error %.3g exceeds target %.3g", error, target);
        throw QuadratureError(msg, error);
    }
    return delta_sq * std::max(total, 0.0);
}

}  // namespace qts
