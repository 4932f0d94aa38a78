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

#include "qts/bath.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace qts;

TEST_CASE("temperature conversion") {
    // k_B / h from the SI constants: 20.8366... GHz/K.
    CHECK(temperature_to_ghz(1000.0) == doctest::Approx(20.836619123).epsilon(1e-9));
    CHECK(temperature_to_ghz(12.0) == doctest::Approx(0.2500).epsilon(2e-4));
    CHECK(temperature_to_ghz(10.0) == doctest::Approx(0.2084).epsilon(2e-4));
    CHECK(temperature_to_ghz(0.0) == 0.0);
    CHECK_THROWS_AS(temperature_to_ghz(-1.0), std::invalid_argument);
}

TEST_CASE("FDT reorganization energy") {
    CHECK(fdt_reorganization(0.2084, 0.2500) == doctest::Approx(0.08686).epsilon(1e-4));
    CHECK(fdt_reorganization(0.0, 0.25) == 0.0);
    CHECK_THROWS_AS(fdt_reorganization(0.2, 0.0), std::invalid_argument);

    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(0.01, 3.0);
    for (int i = 0; i < 1000; ++i) {
        const auto b = BathParams::from_fdt(u(rng), u(rng));
        CHECK(b.width_sq - 2.0 * b.temperature * b.reorganization == 0.0);
        CHECK(b.mode == BathMode::Fdt);
    }
}

TEST_CASE("bath validation") {
    CHECK_THROWS_AS(BathParams::explicit_values(0.0, 0.1, 0.2), std::invalid_argument);
    CHECK_THROWS_AS(BathParams::explicit_values(0.1, -0.1, 0.2), std::invalid_argument);
    CHECK_THROWS_AS(BathParams::explicit_values(0.1, 0.1, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(BathParams::explicit_values(0.1, 0.1, 0.2, -1.0), std::invalid_argument);
    CHECK_THROWS_AS(BathParams::explicit_values(0.1, 0.1, 0.2, 0.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(BathParams::from_fdt(0.0, 0.2), std::invalid_argument);
}

TEST_CASE("Marcus rate closed forms") {
    const auto b = BathParams::explicit_values(1.0, 0.3, 0.5);
    CHECK(marcus_rate(1.0, -0.3, b) == doctest::Approx(std::sqrt(2.0 * std::numbers::pi)).epsilon(1e-15));
    const auto c = BathParams::explicit_values(0.37, 0.11, 0.5);
    CHECK(marcus_rate(1.0, 0.37 - 0.11, c) ==
          doctest::Approx(std::sqrt(2.0 * std::numbers::pi) / 0.37 * std::exp(-0.5)).epsilon(1e-14));
    CHECK(marcus_rate(2.5, -0.11, c) == doctest::Approx(2.5 * marcus_rate(1.0, -0.11, c)).epsilon(1e-15));
    CHECK(marcus_rate(1.0, 10.0 * 0.37 - 0.11, c) ==
          doctest::Approx(marcus_rate(1.0, -0.11, c) * std::exp(-50.0)).epsilon(1e-12));
}

TEST_CASE("detailed balance in log space") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(0.02, 2.0);
    std::uniform_real_distribution<double> ux(-1.0, 1.0);
    std::uniform_real_distribution<double> ut(0.5, 5.0);
    for (int i = 0; i < 1000; ++i) {
        // T >= W/2 keeps both Gaussians far from underflow.
        const double w = u(rng);
        const auto b = BathParams::from_fdt(w, w * ut(rng));
        const double x = ux(rng) * 3.0 * b.width;
        // Case (a) has omega = x, case (b) the reverse transition, omega = -x.
        const double log_a = std::log(marcus_rate(1.0, x, b));
        const double log_b = std::log(marcus_rate(1.0, -x, b));
        CHECK(std::abs((log_b - log_a) - x / b.temperature) < 1e-10 * std::max(1.0, std::abs(x / b.temperature)));
    }
}

TEST_CASE("Marcus normalization and positivity") {
    const auto b = BathParams::from_fdt(0.2084, 0.25);
    const double area = oracle::simpson([&](double w) { return marcus_rate(1.0, w, b); }, -b.reorganization - 12 * b.width,
                                        -b.reorganization + 12 * b.width, 4000);
    CHECK(area == doctest::Approx(2.0 * std::numbers::pi).epsilon(1e-6));
    for (double w = -5.0; w <= 5.0; w += 0.25) {
        CHECK(marcus_rate(1.0, w, b) >= 0.0);
        CHECK(lineshape_rate(1.0, w, b) >= 0.0);
    }
}

TEST_CASE("line shape reduces to Marcus at eta = 0") {
    const auto b = BathParams::from_fdt(temperature_to_ghz(10.0), temperature_to_ghz(12.0));
    for (int i = 0; i <= 100; ++i) {
        const double w = -5.0 * b.width + 0.1 * b.width * i;
        const double m = marcus_rate(1.0, w, b);
        CAPTURE(w);
        CHECK(std::abs(lineshape_rate(1.0, w, b) - m) <= 1e-6 * m);
    }
}

TEST_CASE("integrand regularity at tau = 0") {
    const auto b = BathParams::explicit_values(0.2, 0.1, 0.25, 0.05, 2.0);
    CHECK(lineshape_integrand(0.0, 0.7, b) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(lineshape_integrand(1e-9, 0.7, b) == doctest::Approx(2.0).epsilon(1e-8));
    CHECK(std::isfinite(lineshape_integrand(1e4, 0.7, b)));
}

TEST_CASE("Ohmic line shape against a fine Simpson oracle") {
    const double t = temperature_to_ghz(12.0);
    const double w = temperature_to_ghz(10.0);
    const double wc = 8.0 * std::numbers::pi * t;
    const auto b = BathParams::from_fdt(w, t, 0.01, wc);
    for (double omega : {-0.5, -0.2, -0.0868, 0.0, 0.15, 0.4}) {
        const double got = lineshape_rate(1.0, omega, b);
        const double ref = oracle::lineshape_simpson(omega, w, b.reorganization, t, 0.01, wc, 200000);
        CAPTURE(omega);
        CHECK(std::isfinite(got));
        CHECK(got > 0.0);
        CHECK(std::abs(got - ref) < 1e-7 * std::abs(ref) + 1e-12);
    }
}

TEST_CASE("Ohmic line shape approaches Marcus monotonically as eta -> 0") {
    const double t = temperature_to_ghz(12.0);
    const double w = temperature_to_ghz(10.0);
    const double wc = 8.0 * std::numbers::pi * t;
    const auto marcus = BathParams::from_fdt(w, t);
    for (double omega : {-0.0868, 0.1}) {
        const double m = marcus_rate(1.0, omega, marcus);
        double previous = std::numeric_limits<double>::infinity();
        for (double eta : {0.02, 0.01, 0.005, 0.0025, 0.00125}) {
            const double d = std::abs(lineshape_rate(1.0, omega, BathParams::from_fdt(w, t, eta, wc)) - m);
            CAPTURE(eta);
            CHECK(d < previous);
            previous = d;
        }
        CHECK(previous < 0.01 * m);
    }
}

TEST_CASE("oscillatory quadrature refuses hopeless detunings") {
    const auto b = BathParams::explicit_values(1e-6, 0.0, 1.0);
    CHECK_THROWS_AS(lineshape_rate(1.0, 1e6, b), QuadratureError);
}
