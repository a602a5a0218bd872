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

TEST_CASE("zero-efficiency post-selection recovers the Lindblad state exactly") {
    const auto m = fig1_model(0.0);
    const double dt = 1.0;
    // wide tolerance keeps essentially every trajectory
    const auto rep = postselect_verify(m, excited_qubit(), dt, {0.0, 0.0}, 3.5, 2000, 17, 31,
                                       400, 0, 100);
    REQUIRE(rep.n_kept > 1500);
    const auto liou = build_liouvillian(m);
    const auto expect = expm_apply(Superoperator{liou.mat, 2}, excited_qubit(), 2 * dt);
    // every trajectory state equals the deterministic flow up to fine-step error
    REQUIRE(trace_distance(rep.mc_mean_state, hermitize(expect.rho)) < 1e-3);
    REQUIRE(trace_distance(rep.robinet_state, hermitize(expect.rho)) < 1e-9);
    REQUIRE(rep.trace_dist < 1e-3);
}

TEST_CASE("post-selection reports are deterministic in the seed") {
    const auto m = fig1_model();
    const auto a = postselect_verify(m, excited_qubit(), 1.0, {0.5}, 0.8, 2000, 23, 31, 200);
    const auto b = postselect_verify(m, excited_qubit(), 1.0, {0.5}, 0.8, 2000, 23, 31, 200);
    REQUIRE(a.n_kept == b.n_kept);
    REQUIRE(a.trace_dist == b.trace_dist);
    REQUIRE(a.bootstrap_radius95 == b.bootstrap_radius95);
}

TEST_CASE("impossible targets report the nearest miss") {
    const auto m = fig1_model();
    try {
        postselect_verify(m, excited_qubit(), 1.0, {40.0}, 0.05, 1000, 3, 21, 100);
        FAIL("expected numerical_error");
    } catch (const numerical_error& e) {
        REQUIRE(std::string(e.what()).find("nearest miss") != std::string::npos);
    }
}

TEST_CASE("post-selected mean approaches the robinet state as eps shrinks") {
    const auto m = fig1_model();
    const double dt = 1.0;
    // moderately likely single-bin target keeps decent statistics
    const std::vector<double> targets{1.0};
    double prev = 1e300;
    std::vector<double> dists;
    for (double eps : {1.2, 0.6, 0.3}) {
        const auto rep =
            postselect_verify(m, excited_qubit(), dt, targets, eps, 60000, 1999, 31, 500);
        REQUIRE(rep.n_kept > 500);
        dists.push_back(rep.trace_dist);
    }
    // systematic part shrinks with eps; allow the bootstrap-scale noise floor
    REQUIRE(dists[2] < dists[0] + 0.01);
    REQUIRE(dists[2] < 0.05);
}

TEST_CASE("joint density of independent noise factorizes") {
    MeasurementModel m;
    m.dim = 2;
    m.hamiltonian = Matrix::Zero(2, 2);
    Channel ch;
    ch.op = Matrix::Zero(2, 2);
    ch.eta = 1.0;
    m.monitored.push_back(ch);
    const double dt = 1.0;
    const auto [g1, g2] = joint_density_grid(m, QuantumState(fock_state(2, 0), true), dt, 50, 8.0);
    const auto rep = joint_density_compare(m, QuantumState(fock_state(2, 0), true), dt, g1, g2,
                                           20000, 77, 31, 300);
    REQUIRE(rep.exact_mass == Catch::Approx(1.0).margin(1e-3));
    REQUIRE(rep.tv_distance < 0.05);
    // exact cells factorize into the product of two Gaussians
    const double mid1 = 0.5 * (g1[25] + g1[26]);
    const double mid2 = 0.5 * (g2[25] + g2[26]);
    const double w1 = g1[26] - g1[25], w2 = g2[26] - g2[25];
    const double gauss = std::exp(-0.5 * (mid1 * mid1 + mid2 * mid2) / dt) /
                         (2 * 3.14159265358979323846 * dt);
    REQUIRE(rep.exact[25][25] == Catch::Approx(gauss * w1 * w2).epsilon(1e-3));
}

TEST_CASE("insufficient grids are rejected") {
    const auto m = fig1_model();
    const std::vector<double> tiny{-0.1, 0.0, 0.1};
    REQUIRE_THROWS_AS(
        joint_density_compare(m, excited_qubit(), 1.0, tiny, tiny, 1000, 5, 31, 100),
        validation_error);
}

TEST_CASE("joint density on the Fig. 1 model at reduced scale") {
    const auto m = fig1_model();
    const double dt = 1.0;
    const auto [g1, g2] = joint_density_grid(m, excited_qubit(), dt, 30, 8.0);
    const auto rep =
        joint_density_compare(m, excited_qubit(), dt, g1, g2, 20000, 2222, 121, 1000);
    REQUIRE(rep.exact_mass > 0.999);
    REQUIRE(rep.hist_mass > 0.999);
    REQUIRE(rep.tv_distance < 0.06);  // 2e4 trajectories; acceptance runs 1e5
}
