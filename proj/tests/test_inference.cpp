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

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("noise-only log-likelihood has the Gaussian closed form") {
    MeasurementModel m;
    m.dim = 2;
    m.hamiltonian = Matrix::Zero(2, 2);
    Channel ch;
    ch.op = Matrix::Zero(2, 2);
    ch.eta = 1.0;
    m.monitored.push_back(ch);
    const double dt = 0.6;
    DigitizedRecord rec;
    rec.dt = dt;
    rec.channels = {ChannelKind::Diffusive};
    rec.values = {{0.3}, {-1.2}, {0.8}};
    double expected = 0.0;
    for (const auto& row : rec.values)
        expected += -0.5 * std::log(2 * kPi * dt) - 0.5 * row[0] * row[0] / dt;
    const QuantumState rho0(fock_state(2, 0), true);
    for (auto method :
         {LikelihoodMethod::Robinet, LikelihoodMethod::Kraus1, LikelihoodMethod::Euler}) {
        const double ll = log_likelihood({rec}, m, rho0, method, 31);
        REQUIRE(ll == Catch::Approx(expected).epsilon(1e-9));
    }
}

TEST_CASE("run_filter and log_likelihood agree by definition") {
    const auto m = fig1_model();
    const auto cache = make_instrument_cache(m, 1.0, 31);
    DigitizedRecord rec;
    rec.dt = 1.0;
    rec.channels = {ChannelKind::Diffusive};
    rec.values = {{1.5}, {-0.4}, {0.2}};
    const auto out = run_filter(cache, rec, excited_qubit());
    double sum = 0.0;
    for (double d : out.densities) sum += std::log(d);
    REQUIRE(out.log_likelihood == Catch::Approx(sum).epsilon(1e-13));
    REQUIRE(log_likelihood({rec}, m, excited_qubit(), LikelihoodMethod::Robinet, 31) ==
            Catch::Approx(out.log_likelihood).epsilon(1e-12));
}

TEST_CASE("doubling the node count leaves the likelihood unchanged") {
    const auto m = fig1_model();
    SamplerConfig cfg;
    cfg.n_p = 64;
    const auto sample = sample_coarse(m, excited_qubit(), 8, 0.5, 99, cfg, 0);
    const double a =
        log_likelihood({sample.record}, m, excited_qubit(), LikelihoodMethod::Robinet, 31);
    const double b =
        log_likelihood({sample.record}, m, excited_qubit(), LikelihoodMethod::Robinet, 62);
    REQUIRE(std::abs(a - b) < 1e-8);
}

TEST_CASE("records must share their structure") {
    const auto m = fig1_model();
    DigitizedRecord a, b;
    a.dt = 1.0;
    a.channels = {ChannelKind::Diffusive};
    a.values = {{0.1}};
    b = a;
    b.dt = 0.5;
    REQUIRE_THROWS_AS(
        log_likelihood({a, b}, m, excited_qubit(), LikelihoodMethod::Robinet, 21),
        validation_error);
}

TEST_CASE("flat scans break ties toward the smallest grid value") {
    // parameter that the model ignores
    ParameterGrid grid;
    grid.name = "unused";
    grid.values = {0.1, 0.2, 0.3};
    grid.factory = [](double) { return fig1_model(); };
    SamplerConfig cfg;
    cfg.n_p = 48;
    const auto sample = sample_coarse(fig1_model(), excited_qubit(), 3, 0.5, 5, cfg, 0);
    const auto res = scan({sample.record}, grid, excited_qubit(), LikelihoodMethod::Robinet, 48,
                          0, 0);
    REQUIRE(res.argmax_index == 0);
    REQUIRE(res.peak == Catch::Approx(0.1));
    REQUIRE(res.peak_on_boundary);
    for (double s : res.shifted) REQUIRE(s == Catch::Approx(0.0).margin(1e-9));
}

TEST_CASE("scan recovers the detuning on a small sampled ensemble") {
    const auto grid = detuning_grid(0.0, 2.0, 21);
    const auto truth = grid.factory(1.0);
    const double dt = 0.5;
    const int n_rec = 60, n_bins = 4;
    std::vector<DigitizedRecord> records(n_rec);
    SamplerConfig cfg;
    cfg.n_p = 64;
    parallel_for(n_rec, 0, [&](std::size_t r) {
        records[r] = sample_coarse(truth, excited_qubit(), n_bins, dt, 606, cfg, r).record;
    });
    const auto res =
        scan(records, grid, excited_qubit(), LikelihoodMethod::Robinet, 48, 0, 100);
    REQUIRE_FALSE(res.peak_on_boundary);
    REQUIRE(res.peak_se > 0.0);
    REQUIRE(std::abs(res.peak - 1.0) < 4.0 * res.peak_se + 0.05);
    REQUIRE(res.curvature > 0.0);
    // vertical alignment: maximum of the shifted curve sits at zero
    double mx = -1e300;
    for (double s : res.shifted) mx = std::max(mx, s);
    REQUIRE(mx == Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("kraus1 likelihood stays finite on coarse-bin records") {
    // raw order-2 truncation densities go negative here; the CPTP
    // completion must not
    const auto m = fig1_model();
    const double dt = 1.0;
    const int n_rec = 40;
    std::vector<DigitizedRecord> records(n_rec);
    SamplerConfig cfg;
    cfg.n_p = 64;
    parallel_for(n_rec, 0, [&](std::size_t r) {
        records[r] = sample_coarse(m, excited_qubit(), 2, dt, 55, cfg, r).record;
    });
    const double ll =
        log_likelihood(records, m, excited_qubit(), LikelihoodMethod::Kraus1, 31);
    REQUIRE(std::isfinite(ll));
}
