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

// bath.hpp - probe-bath line shapes.
//
// Energies, temperatures and frequencies are all in GHz (k_B T / h for
// temperatures). Rates come out per unit probe tunneling amplitude squared:
// multiply by Delta_p^2 for an absolute rate.

#pragma once

#include <stdexcept>
#include <string>

namespace qts {

// k_B / h in GHz per kelvin (exact SI constants).
inline constexpr double kBoltzmannOverPlanckGHzPerK = 1.380649e-23 / 6.62607015e-34 * 1e-9;

double temperature_to_ghz(double millikelvin);

// Reorganization energy fixed by the fluctuation-dissipation relation W^2 = 2 T eps_p.
double fdt_reorganization(double width, double temperature);

enum class BathMode { Fdt, Explicit };

struct BathParams {
    double width = 0.0;           // W, MRT linewidth
    double width_sq = 0.0;        // W^2 as used by every formula
    double reorganization = 0.0;  // eps_p
    double temperature = 0.0;     // T
    double eta = 0.0;             // Ohmic coupling, dimensionless
    double cutoff = 1.0;          // omega_c
    BathMode mode = BathMode::Explicit;

    // eps_p = W^2/(2T); width_sq is then defined as 2 T eps_p so the FDT
    // relation holds exactly in floating point.
    static BathParams from_fdt(double width, double temperature, double eta = 0.0, double cutoff = 1.0);
    static BathParams explicit_values(double width, double reorganization, double temperature, double eta = 0.0,
                                      double cutoff = 1.0);

    void validate() const;
};

// delta_sq * sqrt(2 pi / W^2) * exp(-(omega + eps_p)^2 / (2 W^2)); omega is the
// final-minus-initial energy of the transition.
double marcus_rate(double delta_sq, double omega, const BathParams& bath);

class QuadratureError : public std::runtime_error {
public:
    QuadratureError(const std::string& what, double estimate) : std::runtime_error(what), estimate_(estimate) {}
    double error_estimate() const noexcept { return estimate_; }

private:
    double estimate_;
};

struct LineshapeOptions {
    double rel_tol = 1e-8;     // required relative accuracy of the result
    double envelope = 1e-14;   // Gaussian envelope value at the truncation point
    double peak_floor = 1e-12; // absolute accuracy, as a fraction of sqrt(2 pi)/W
};

// Full line shape with the Ohmic high-frequency factor:
//   delta_sq * 2 Re int_0^inf dtau e^{-i(omega+eps_p)tau} e^{-W^2 tau^2/2}
//              [ (1/(1 + i omega_c tau)) (pi T tau / sinh(pi T tau)) ]^{4 eta/pi}
double lineshape_rate(double delta_sq, double omega, const BathParams& bath, const LineshapeOptions& opts = {});

// The integrand above (without delta_sq), exposed for independent checks.
double lineshape_integrand(double tau, double omega, const BathParams& bath);

}  // namespace qts
