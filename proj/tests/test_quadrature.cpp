// Copyright 2026 The Robinet Authors
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

#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"

using namespace robinet;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("Gauss-Hermite integrates Gaussian moments exactly") {
    const auto rule = gauss_hermite(31);
    rule.validate();
    double w0 = 0, w2 = 0, w4 = 0;
    for (int i = 0; i < rule.n_p; ++i) {
        w0 += rule.weights[i];
        w2 += rule.weights[i] * rule.nodes[i] * rule.nodes[i];
        w4 += rule.weights[i] * std::pow(rule.nodes[i], 4);
    }
    REQUIRE(w0 == Catch::Approx(std::sqrt(kPi)).epsilon(1e-13));
    REQUIRE(w2 == Catch::Approx(0.5 * std::sqrt(kPi)).epsilon(1e-13));
    REQUIRE(w4 == Catch::Approx(0.75 * std::sqrt(kPi)).epsilon(1e-13));
}

TEST_CASE("Gauss-Hermite handles oscillatory integrands") {
    // int e^{-u^2} cos(a u) du = sqrt(pi) e^{-a^2/4}
    const auto rule = gauss_hermite(40);
    for (double a : {0.5, 2.0, 5.0}) {
        double acc = 0;
        for (int i = 0; i < rule.n_p; ++i) acc += rule.weights[i] * std::cos(a * rule.nodes[i]);
        REQUIRE(acc == Catch::Approx(std::sqrt(kPi) * std::exp(-a * a / 4)).margin(1e-12));
    }
}

TEST_CASE("Gauss-Legendre on [-pi, pi] resolves Fourier modes") {
    const auto rule = gauss_legendre_pi(33);
    rule.validate();
    REQUIRE(rule.nodes.front() > -kPi);
    REQUIRE(rule.nodes.back() < kPi);
    double mass = 0;
    for (double w : rule.weights) mass += w;
    REQUIRE(mass == Catch::Approx(2.0 * kPi).epsilon(1e-13));
    for (int n : {1, 3, 7}) {
        double acc = 0;
        for (int i = 0; i < rule.n_p; ++i) acc += rule.weights[i] * std::cos(n * rule.nodes[i]);
        REQUIRE(std::abs(acc) < 1e-12);  // int cos(n p) dp over a full period
    }
}

TEST_CASE("quadrature validation rejects broken rules") {
    QuadratureRule bad{QuadratureKind::GaussHermite, 2, {0.0, -1.0}, {1.0, 1.0}};
    REQUIRE_THROWS_AS(bad.validate(), validation_error);
}

TEST_CASE("hermite polynomial closed forms") {
    REQUIRE(hermite(0, 1.7) == 1.0);
    REQUIRE(hermite(1, 1.7) == 1.7);
    PhiloxStream rng(41, 0);
    for (int i = 0; i < 100; ++i) {
        const double x = 6.0 * (rng.uniform() - 0.5);
        REQUIRE(hermite(2, x) == Catch::Approx(x * x - 1.0).margin(1e-12));
        REQUIRE(hermite(4, x) ==
                Catch::Approx(x * x * x * x - 6 * x * x + 3).epsilon(1e-12).margin(1e-12));
        REQUIRE(hermite(5, x) ==
                Catch::Approx(std::pow(x, 5) - 10 * x * x * x + 15 * x).epsilon(1e-12).margin(1e-12));
    }
}

TEST_CASE("hermite coefficient table matches evaluations") {
    const auto coef = hermite_coefficients(6);
    for (double x : {-2.3, 0.4, 1.9}) {
        for (int k = 0; k <= 6; ++k) {
            double acc = 0, xn = 1;
            for (double c : coef[k]) {
                acc += c * xn;
                xn *= x;
            }
            REQUIRE(acc == Catch::Approx(hermite(k, x)).epsilon(1e-12).margin(1e-12));
        }
    }
}
