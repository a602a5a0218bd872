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

#pragma once

#include <cmath>
#include <iostream>
#include <vector>

#include "robinet/core/record.hpp"
#include "robinet/core/rng.hpp"
#include "robinet/core/state.hpp"
#include "robinet/core/superop.hpp"

namespace robinet {

/// Fine-grained conditional trajectory with its measurement increments.
/// Diffusive channels record dY per step, jump channels the click count.
struct FineTrajectory {
    double dt_fine = 0.0;
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
    std::vector<ChannelKind> channels;
    std::vector<std::vector<double>> increments;  // [step][channel]
    std::vector<QuantumState> states;             // size steps + 1 when stored
};

enum class StateStorage { All, FinalOnly };

namespace detail {

/// Stepping core shared by every fine-simulation entry point.
/// Diffusive update: normalized order-2 Kraus scheme (Milstein-corrected,
/// positivity preserving) with undetected and unmonitored feed-through.
/// Jump channels: no-click conditional evolution plus thinning with the
/// per-step rate theta + eta Tr[L rho L^dag]; on a click the state maps to
/// (theta rho + eta L rho L^dag) / norm (dark counts are indistinguishable).
struct FineStepper {
    const MeasurementModel* model;
    double dt = 0.0;
    Matrix g;                               // -iH - (1/2) sum L^dag L
    std::vector<int> diffusive, jumps;      // channel indices by kind
    std::vector<Matrix> l2;                 // squared ops for diffusive channels

    FineStepper(const MeasurementModel& m, double dt_fine) : model(&m), dt(dt_fine) {
        m.validate();
        require(dt_fine > 0, "simulate_fine: dt_fine must be positive");
        Matrix ldl = Matrix::Zero(m.dim, m.dim);
        for (int c = 0; c < m.n_channels(); ++c) {
            ldl += m.monitored[c].op.adjoint() * m.monitored[c].op;
            if (m.monitored[c].kind == ChannelKind::Diffusive) {
                diffusive.push_back(c);
                l2.push_back(m.monitored[c].op * m.monitored[c].op);
            } else {
                jumps.push_back(c);
            }
        }
        for (const auto& l : m.unmonitored) ldl += l.adjoint() * l;
        g = Complex(0, -1) * m.hamiltonian - 0.5 * ldl;
    }

    /// Advances rho by one fine step; writes per-channel increments.
    void step(Matrix& rho, PhiloxStream& rng, std::vector<double>& increments) const {
        std::vector<double> noise(diffusive.size() + jumps.size());
        for (std::size_t i = 0; i < diffusive.size(); ++i)
            noise[i] = rng.normal(0.0, std::sqrt(dt));
        for (std::size_t i = 0; i < jumps.size(); ++i)
            noise[diffusive.size() + i] = rng.uniform();
        step_given(rho, noise, increments);
    }

    /// Same update with injected noise: one Wiener increment per diffusive
    /// channel followed by one uniform per jump channel.
    void step_given(Matrix& rho, const std::vector<double>& noise,
                    std::vector<double>& increments) const {
        const int d = model->dim;
        Matrix m = Matrix::Identity(d, d) + dt * g;
        std::vector<double> dys(diffusive.size());
        for (std::size_t i = 0; i < diffusive.size(); ++i) {
            const auto& ch = model->monitored[diffusive[i]];
            const double sq = std::sqrt(ch.eta);
            const double rate = sq * (ch.op * rho + rho * ch.op.adjoint()).trace().real();
            const double dy = rate * dt + noise[i];
            dys[i] = dy;
            increments[diffusive[i]] = dy;
            m += sq * dy * ch.op;
            m += 0.5 * ch.eta * (dy * dy - dt) * l2[i];
        }
        // cross Milstein terms between distinct diffusive channels
        for (std::size_t i = 0; i < diffusive.size(); ++i)
            for (std::size_t j = i + 1; j < diffusive.size(); ++j) {
                const auto& a = model->monitored[diffusive[i]];
                const auto& b = model->monitored[diffusive[j]];
                m += std::sqrt(a.eta * b.eta) * dys[i] * dys[j] * 0.5 *
                     (a.op * b.op + b.op * a.op);
            }

        Matrix next = m * rho * m.adjoint();
        for (int c : diffusive) {
            const auto& ch = model->monitored[c];
            if (ch.eta < 1.0) next += (1.0 - ch.eta) * dt * (ch.op * rho * ch.op.adjoint());
        }
        for (int c : jumps) {
            const auto& ch = model->monitored[c];
            if (ch.eta < 1.0) next += (1.0 - ch.eta) * dt * (ch.op * rho * ch.op.adjoint());
        }
        for (const auto& l : model->unmonitored) next += dt * (l * rho * l.adjoint());

        double tr = next.trace().real();
        if (!(tr > 0) || !next.allFinite())
            throw numerical_error("simulate_fine: state lost positivity/finiteness");
        rho = next / tr;

        // detector clicks, thinned at the current-state rate
        for (std::size_t ji = 0; ji < jumps.size(); ++ji) {
            const int c = jumps[ji];
            const auto& ch = model->monitored[c];
            const double rate =
                ch.dark_rate + ch.eta * (ch.op * rho * ch.op.adjoint()).trace().real();
            const double pclick = -std::expm1(-rate * dt);
            if (noise[diffusive.size() + ji] < pclick) {
                increments[c] = 1.0;
                Matrix clicked = ch.dark_rate * rho + ch.eta * (ch.op * rho * ch.op.adjoint());
                const double ctr = clicked.trace().real();
                if (!(ctr > 0)) throw numerical_error("simulate_fine: click with zero rate");
                rho = clicked / ctr;
            } else {
                increments[c] = 0.0;
            }
        }
        rho = hermitize(rho);
    }
};

}  // namespace detail

/// Upper bound on the Liouvillian norm, used only for the step-size warning.
inline double liouvillian_norm_bound(const MeasurementModel& m) {
    double nb = 2.0 * m.hamiltonian.norm();
    for (const auto& ch : m.monitored) nb += 2.0 * ch.op.norm() * ch.op.norm();
    for (const auto& l : m.unmonitored) nb += 2.0 * l.norm() * l.norm();
    return nb;
}

/// Joint (state, record) simulation of the stochastic master equation at a
/// fine step dt_fine. Reproducible from (model, rho0, seed, stream).
inline FineTrajectory simulate_fine(const MeasurementModel& model, const QuantumState& rho0,
                                    double total_time, double dt_fine, std::uint64_t seed,
                                    std::uint64_t stream = 0,
                                    StateStorage storage = StateStorage::All) {
    require(total_time > 0, "simulate_fine: total_time must be positive");
    const long n_steps = std::lround(total_time / dt_fine);
    require(n_steps > 0 && std::abs(n_steps * dt_fine - total_time) < 1e-9 * total_time,
            "simulate_fine: total_time must be a multiple of dt_fine");
    if (dt_fine * liouvillian_norm_bound(model) > 0.1)
        std::cerr << "[robinet] warning: dt_fine * |L| > 0.1; fine step too coarse\n";

    detail::FineStepper stepper(model, dt_fine);
    PhiloxStream rng(seed, stream);

    FineTrajectory traj;
    traj.dt_fine = dt_fine;
    traj.seed = seed;
    traj.stream = stream;
    for (const auto& ch : model.monitored) traj.channels.push_back(ch.kind);
    traj.increments.assign(n_steps, std::vector<double>(model.n_channels(), 0.0));

    Matrix rho = rho0.rho;
    if (storage == StateStorage::All) traj.states.push_back(QuantumState(rho, true));
    for (long s = 0; s < n_steps; ++s) {
        stepper.step(rho, rng, traj.increments[s]);
        if (storage == StateStorage::All) traj.states.push_back(QuantumState(rho, true));
    }
    if (storage == StateStorage::FinalOnly) traj.states.push_back(QuantumState(rho, true));
    return traj;
}

/// Rebins fine increments into the digitized record: I_k per diffusive
/// channel is the sum of dY over the bin, jump channels sum their counts.
inline DigitizedRecord digitize(const FineTrajectory& traj, double dt) {
    require(dt > 0, "digitize: dt must be positive");
    const double ratio = dt / traj.dt_fine;
    const long m = std::lround(ratio);
    require(m >= 1 && std::abs(ratio - double(m)) < 1e-9,
            "digitize: dt must be an integer multiple of dt_fine");
    const long n_steps = long(traj.increments.size());
    require(n_steps % m == 0, "digitize: trajectory length not a whole number of bins");

    DigitizedRecord rec;
    rec.dt = dt;
    rec.channels = traj.channels;
    rec.values.assign(n_steps / m, std::vector<double>(traj.channels.size(), 0.0));
    for (long s = 0; s < n_steps; ++s)
        for (std::size_t c = 0; c < traj.channels.size(); ++c)
            rec.values[s / m][c] += traj.increments[s][c];
    return rec;
}

}  // namespace robinet
