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

#include <optional>
#include <string>
#include <vector>

#include "robinet/core/metrics.hpp"
#include "robinet/core/parallel.hpp"
#include "robinet/instrument/exact_map.hpp"
#include "robinet/trajectory/simulate.hpp"

namespace robinet {

namespace detail {

inline const Channel& single_diffusive_channel(const MeasurementModel& model) {
    require(model.n_channels() == 1 && model.monitored[0].kind == ChannelKind::Diffusive,
            "reconstruction baselines: single diffusive channel required");
    return model.monitored[0];
}

}  // namespace detail

/// Euler discretization of the diffusive SME driven by the digitized value
/// in place of the innovation: dW = I_k - Tr[C rho] dt. Trace-normalized
/// only; positivity deliberately NOT enforced (that is the point of the
/// baseline).
struct EulerReconstruction {
    std::vector<QuantumState> states;  // one per bin
    std::vector<bool> unphysical;      // negative eigenvalue beyond tol.psd
    std::optional<int> diverged_from;  // first bin with numerical overflow
};

inline EulerReconstruction euler_reconstruct(const MeasurementModel& model,
                                             const DigitizedRecord& record,
                                             const QuantumState& rho0,
                                             const Tolerances& tol = default_tolerances()) {
    const Channel& ch = detail::single_diffusive_channel(model);
    require(record.compatible_with(model), "euler_reconstruct: record does not match model");
    const Superoperator liou = build_liouvillian(model);
    const double sq = std::sqrt(ch.eta);
    const double dt = record.dt;

    EulerReconstruction out;
    Matrix rho = rho0.rho;
    for (int k = 0; k < record.n_bins(); ++k) {
        if (!out.diverged_from) {
            const double i_k = record.values[k][0];
            const double drift = sq * (ch.op * rho + rho * ch.op.adjoint()).trace().real();
            const double dw = i_k - drift * dt;
            Matrix next = rho + dt * liou.apply(rho) +
                          dw * (sq * (ch.op * rho + rho * ch.op.adjoint()) - drift * rho);
            const double tr = next.trace().real();
            if (!next.allFinite() || !(std::abs(tr) > 1e-300)) {
                out.diverged_from = k;
            } else {
                rho = next / tr;
            }
        }
        Eigen::SelfAdjointEigenSolver<Matrix> es(hermitize(rho), Eigen::EigenvaluesOnly);
        out.unphysical.push_back(es.eigenvalues().minCoeff() < -tol.psd);
        out.states.push_back(QuantumState(rho, true));
    }
    return out;
}

/// Order-2 discrete instrument used as the CPTP-1 stand-in (`kraus1` in all
/// outputs). Kraus-factored Milstein step
///   M_I = (1 + G dt + sqrt(eta) I L + eta (I^2 - dt) L^2 / 2) Omega^{-1/2}
/// with undetected feed-through (1-eta) dt L . L^dag and the normalizer
/// Omega = 1 + dt^2 (G^dag G + eta^2 L^dag2 L^2 / 2) that makes the
/// instrument exactly trace-preserving: the associated signal density
/// N(I; 0, dt) Tr[.] is positive and integrates to one.
struct Kraus1Scheme {
    double dt = 0.0;
    double eta = 1.0;
    Matrix ident_gdt;   // 1 + G dt
    Matrix l, l2;
    Matrix oinv_half;   // Omega^{-1/2}
    Matrix l_feed;      // L Omega^{-1/2}
    double log_gauss_norm = 0.0;

    static Kraus1Scheme make(const MeasurementModel& model, double dt) {
        const Channel& ch = detail::single_diffusive_channel(model);
        require(model.unmonitored.empty(),
                "kraus1: extra unmonitored dissipators not supported by the order-2 scheme");
        Kraus1Scheme s;
        s.dt = dt;
        s.eta = ch.eta;
        const int d = model.dim;
        const Matrix g =
            Complex(0, -1) * model.hamiltonian - 0.5 * (ch.op.adjoint() * ch.op);
        s.ident_gdt = Matrix::Identity(d, d) + dt * g;
        s.l = ch.op;
        s.l2 = ch.op * ch.op;
        const Matrix omega = Matrix::Identity(d, d) +
                             dt * dt * (g.adjoint() * g +
                                        0.5 * ch.eta * ch.eta * s.l2.adjoint() * s.l2);
        Eigen::SelfAdjointEigenSolver<Matrix> es(hermitize(omega));
        RealVector ev = es.eigenvalues();
        for (int i = 0; i < ev.size(); ++i) ev(i) = 1.0 / std::sqrt(ev(i));
        s.oinv_half = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
        s.l_feed = s.l * s.oinv_half;
        s.log_gauss_norm = -0.5 * std::log(2.0 * 3.14159265358979323846 * dt);
        return s;
    }

    /// Unnormalized update and its trace (the density is gauss * trace).
    std::pair<Matrix, double> step(const Matrix& rho, double i_k) const {
        const double sq = std::sqrt(eta);
        Matrix m = (ident_gdt + sq * i_k * l + 0.5 * eta * (i_k * i_k - dt) * l2) * oinv_half;
        Matrix next = m * rho * m.adjoint();
        if (eta < 1.0) next += (1.0 - eta) * dt * (l_feed * rho * l_feed.adjoint());
        return {next, next.trace().real()};
    }

    double log_density(double i_k, double step_trace) const {
        return log_gauss_norm - 0.5 * i_k * i_k / dt + std::log(step_trace);
    }
};

/// Per-bin application of the kraus1 scheme; states are hermitized, clipped
/// and normalized.
inline std::vector<QuantumState> kraus1_reconstruct(const MeasurementModel& model,
                                                    const DigitizedRecord& record,
                                                    const QuantumState& rho0,
                                                    const Tolerances& tol = default_tolerances()) {
    require(record.compatible_with(model), "kraus1_reconstruct: record does not match model");
    const Kraus1Scheme scheme = Kraus1Scheme::make(model, record.dt);
    std::vector<QuantumState> out;
    Matrix rho = rho0.rho;
    for (int k = 0; k < record.n_bins(); ++k) {
        auto [next, tr] = scheme.step(rho, record.values[k][0]);
        if (!(tr > 0)) throw numerical_error("kraus1_reconstruct: nonpositive trace at bin " +
                                             std::to_string(k));
        rho = repair_positivity(next, tol).first.rho;
        out.push_back(QuantumState(rho, true));
    }
    return out;
}

/// Unconditioned Lindblad snapshots e^{k dt L}(rho0), k = 1..n.
inline std::vector<QuantumState> lindblad_trajectory(const MeasurementModel& model,
                                                     const QuantumState& rho0, double dt,
                                                     int n_bins) {
    const Superoperator liou = build_liouvillian(model);
    const Matrix prop = expm_dense(liou.mat, dt);
    std::vector<QuantumState> out;
    CVector v = vectorize(rho0.rho);
    for (int k = 0; k < n_bins; ++k) {
        v = prop * v;
        out.push_back(QuantumState(hermitize(unvectorize(v, model.dim)), true));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Deflate benchmark (bosonic mode, H = 0, L = sqrt(kappa2) a^2, eta = 0.2)

struct DeflateConfig {
    double alpha = 2.0;            // initial coherent amplitude (desk scale)
    double kappa2_mhz = 2.0;       // kappa2 / (2 pi) in MHz
    double dt_ns = 4.0;            // digitization time
    double total_ns = 100.0;
    double eta = 0.2;
    int n_traj = 50;
    std::uint64_t seed = 1;
    int n_p = 31;
    int fine_substeps = 1000;      // dt_fine = dt / fine_substeps
    int threads = 0;
    double cutoff_tail = 1e-8;
    int guard_levels = 4;
    double leakage_abort = 1e-4;   // guard-level population that aborts
};

struct DeflateReport {
    std::vector<double> times_ns;                 // bin boundaries, 1..n
    std::vector<std::string> methods;             // robinet, kraus1, euler, lindblad
    // fidelity[method][traj * n_bins + bin], photon likewise
    std::vector<std::vector<double>> fidelity;
    std::vector<std::vector<double>> photon;
    std::vector<double> true_photon;              // [traj * n_bins + bin]
    std::vector<double> mean_final_fidelity;      // per method
    int euler_unphysical_bins = 0;
    int euler_diverged_trajectories = 0;
    int robinet_repairs = 0;
    int dim = 0;
    double dt_dimensionless = 0.0;
};

inline MeasurementModel deflate_model(const DeflateConfig& cfg, int dim) {
    MeasurementModel m;
    m.dim = dim;
    m.hamiltonian = Matrix::Zero(dim, dim);
    Channel ch;
    ch.op = annihilation(dim) * annihilation(dim);  // kappa2 = 1 time units
    ch.eta = cfg.eta;
    ch.kind = ChannelKind::Diffusive;
    m.monitored.push_back(ch);
    return m;
}

inline DeflateReport run_deflate_benchmark(const DeflateConfig& cfg) {
    // physical-to-dimensionless conversion: time unit 1/kappa2
    const double kappa2 = 2.0 * 3.14159265358979323846 * cfg.kappa2_mhz * 1e6;
    const double dt = kappa2 * cfg.dt_ns * 1e-9;
    const int n_bins = int(std::lround(cfg.total_ns / cfg.dt_ns));
    require(n_bins >= 1, "run_deflate_benchmark: total_ns must cover at least one bin");

    const int dim = coherent_cutoff(cfg.alpha, cfg.cutoff_tail, cfg.guard_levels);
    const MeasurementModel model = deflate_model(cfg, dim);
    const QuantumState rho0(coherent_state(dim, cfg.alpha), true);
    const InstrumentCache cache = make_instrument_cache(model, dt, cfg.n_p, cfg.threads);
    const auto lind = lindblad_trajectory(model, rho0, dt, n_bins);
    const Matrix nop = number_op(dim);
    const double dt_fine = dt / cfg.fine_substeps;

    DeflateReport rep;
    rep.dim = dim;
    rep.dt_dimensionless = dt;
    rep.methods = {"robinet", "kraus1", "euler", "lindblad"};
    for (int b = 1; b <= n_bins; ++b) rep.times_ns.push_back(b * cfg.dt_ns);
    const std::size_t cells = std::size_t(cfg.n_traj) * n_bins;
    rep.fidelity.assign(4, std::vector<double>(cells, 0.0));
    rep.photon.assign(4, std::vector<double>(cells, 0.0));
    rep.true_photon.assign(cells, 0.0);

    std::vector<int> euler_unphys(cfg.n_traj, 0), euler_div(cfg.n_traj, 0),
        rob_repairs(cfg.n_traj, 0);
    std::vector<std::string> failures(cfg.n_traj);

    parallel_for(std::size_t(cfg.n_traj), cfg.threads, [&](std::size_t t) {
        try {
            detail::FineStepper stepper(model, dt_fine);
            PhiloxStream rng(cfg.seed, t);
            Matrix truth = rho0.rho;
            std::vector<double> incr(1, 0.0);
            DigitizedRecord rec;
            rec.dt = dt;
            rec.channels = {ChannelKind::Diffusive};

            std::vector<Matrix> true_states;
            for (int b = 0; b < n_bins; ++b) {
                double acc = 0.0;
                for (int s = 0; s < cfg.fine_substeps; ++s) {
                    stepper.step(truth, rng, incr);
                    acc += incr[0];
                }
                rec.values.push_back({acc});
                true_states.push_back(truth);
                double guard_pop = 0.0;
                for (int lvl = dim - cfg.guard_levels; lvl < dim; ++lvl)
                    guard_pop += truth(lvl, lvl).real();
                if (guard_pop > cfg.leakage_abort)
                    throw numerical_error(
                        "run_deflate_benchmark: Fock cutoff leakage, guard population " +
                        std::to_string(guard_pop));
            }

            QuantumState rob = rho0;
            const auto euler = euler_reconstruct(model, rec, rho0);
            const auto kraus = kraus1_reconstruct(model, rec, rho0);
            for (int b = 0; b < n_bins; ++b) {
                auto step = filter_step(cache, rob, rec.values[b]);
                rob = step.state;
                rob_repairs[t] += step.repaired ? 1 : 0;

                const QuantumState truth_state(true_states[b], true);
                const std::size_t cell = t * n_bins + b;
                rep.true_photon[cell] = (nop * true_states[b]).trace().real();

                auto put = [&](int mi, const QuantumState& st) {
                    rep.fidelity[mi][cell] = uhlmann_fidelity(st, truth_state);
                    rep.photon[mi][cell] = (nop * st.rho).trace().real();
                };
                put(0, rob);
                put(1, kraus[b]);
                // Euler states may be indefinite; fidelity uses the PSD projection
                put(2, repair_positivity(euler.states[b].rho).first);
                put(3, lind[b]);
                euler_unphys[t] += euler.unphysical[b] ? 1 : 0;
            }
            euler_div[t] = euler.diverged_from.has_value() ? 1 : 0;
        } catch (const std::exception& e) {
            failures[t] = e.what();
        }
    });

    for (int t = 0; t < cfg.n_traj; ++t)
        if (!failures[t].empty()) throw numerical_error(failures[t]);

    for (int t = 0; t < cfg.n_traj; ++t) {
        rep.euler_unphysical_bins += euler_unphys[t];
        rep.euler_diverged_trajectories += euler_div[t];
        rep.robinet_repairs += rob_repairs[t];
    }
    rep.mean_final_fidelity.assign(4, 0.0);
    for (int mi = 0; mi < 4; ++mi) {
        double acc = 0.0;
        for (int t = 0; t < cfg.n_traj; ++t) acc += rep.fidelity[mi][t * n_bins + (n_bins - 1)];
        rep.mean_final_fidelity[mi] = acc / cfg.n_traj;
    }
    return rep;
}

}  // namespace robinet
