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
using namespace robinet::test;

TEST_CASE("empty model gives the zero Liouvillian") {
    MeasurementModel m;
    m.dim = 2;
    m.hamiltonian = Matrix::Zero(2, 2);
    Channel ch;
    ch.op = Matrix::Zero(2, 2);
    ch.eta = 0.0;
    m.monitored.push_back(ch);
    const auto liou = build_liouvillian(m);
    REQUIRE(liou.mat.norm() == 0.0);
}

TEST_CASE("decay dissipator maps excited to ground minus excited") {
    MeasurementModel m;
    m.dim = 2;
    m.hamiltonian = Matrix::Zero(2, 2);
    Channel ch;
    ch.op = sigma_minus();
    m.monitored.push_back(ch);
    const auto liou = build_liouvillian(m);
    const Matrix out = liou.apply(fock_state(2, 0));
    const Matrix expected = fock_state(2, 1) - fock_state(2, 0);
    REQUIRE((out - expected).norm() < 1e-14);
}

TEST_CASE("Liouvillian annihilates traces on random states") {
    const auto liou = build_liouvillian(fig1_model());
    PhiloxStream rng(11, 0);
    for (int i = 0; i < 100; ++i) {
        const Matrix rho = random_hermitian(rng, 2, 1.0);
        REQUIRE(std::abs(liou.apply(rho).trace()) < 1e-12 * std::max(rho.norm(), 1.0));
    }
}

TEST_CASE("Liouvillian preserves Hermiticity") {
    PhiloxStream rng(12, 0);
    const auto m = random_diffusive_model(rng, 3);
    const auto liou = build_liouvillian(m);
    for (int i = 0; i < 20; ++i) {
        const Matrix rho = random_hermitian(rng, 3, 1.0);
        const Matrix out = liou.apply(rho);
        REQUIRE((out - out.adjoint()).norm() < 1e-12 * std::max(out.norm(), 1.0));
    }
}

TEST_CASE("measurement superoperator closed forms") {
    SECTION("diffusive with eta = 0 vanishes") {
        Channel ch;
        ch.op = sigma_x();
        ch.eta = 0.0;
        REQUIRE(build_measurement_superop(ch).mat.norm() == 0.0);
    }
    SECTION("diffusive, eta = 1, Hermitian L on the maximally mixed state") {
        Channel ch;
        ch.op = sigma_x() + 2.0 * sigma_z();
        ch.eta = 1.0;
        const auto c = build_measurement_superop(ch);
        const Matrix rho = Matrix::Identity(2, 2) / 2.0;
        REQUIRE((c.apply(rho) - 2.0 * ch.op / 2.0).norm() < 1e-14);
    }
    SECTION("jump channel with theta = 0 relays the click map") {
        Channel ch;
        ch.op = sigma_minus();
        ch.eta = 1.0;
        ch.kind = ChannelKind::Jump;
        const auto c = build_measurement_superop(ch);
        REQUIRE((c.apply(fock_state(2, 0)) - fock_state(2, 1)).norm() < 1e-14);
    }
}

TEST_CASE("tilted generator limits") {
    PhiloxStream rng(13, 0);
    SECTION("zero tilt equals the Liouvillian") {
        const auto m = random_diffusive_model(rng, 2);
        const auto liou = build_liouvillian(m);
        const auto tilted = tilted_generator(m, {0.0});
        REQUIRE((tilted.mat - liou.mat).cwiseAbs().maxCoeff() < 1e-14);
    }
    SECTION("one diffusive channel matches L - ipC - p^2/2") {
        const auto m = fig1_model();
        const double p = 0.7;
        const auto tilted = tilted_generator(m, {p});
        Matrix expected = build_liouvillian(m).mat;
        expected -= Complex(0, p) * build_measurement_superop(m.monitored[0]).mat;
        expected -= 0.5 * p * p * Matrix::Identity(4, 4);
        REQUIRE((tilted.mat - expected).norm() < 1e-14);
    }
    SECTION("jump channel at p = pi gives L - 2C") {
        auto m = random_jump_model(rng, 2);
        m.monitored[0].dark_rate = 0.0;
        const auto tilted = tilted_generator(m, {3.14159265358979323846});
        Matrix expected = build_liouvillian(m).mat -
                          2.0 * build_measurement_superop(m.monitored[0]).mat;
        REQUIRE((tilted.mat - expected).norm() < 1e-12);
    }
    SECTION("tilt arity is checked") {
        REQUIRE_THROWS_AS(tilted_generator(fig1_model(), {0.0, 0.0}), validation_error);
    }
}

TEST_CASE("Fig. 1 Liouvillian drives the excited state toward the ground state") {
    const auto m = fig1_model();
    const auto liou = build_liouvillian(m);
    const auto evolved = expm_apply(Superoperator{liou.mat, 2}, excited_qubit(), 2.0);
    REQUIRE(std::abs(evolved.trace() - 1.0) < 1e-10);
    REQUIRE(evolved.rho(1, 1).real() > 0.5);
}
