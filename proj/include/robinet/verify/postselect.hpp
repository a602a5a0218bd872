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

#include <algorithm>
#include <cmath>
#include <vector>

#include "robinet/core/metrics.hpp"
#include "robinet/core/parallel.hpp"
#include "robinet/instrument/exact_map.hpp"
#include "robinet/trajectory/simulate.hpp"

namespace robinet {

/// Outcome of the brute-force Monte-Carlo post-selection oracle.
struct PostSelectionReport {
    long n_total = 0;
    long n_kept = 0;
    double epsilon = 0.0;
    std::vector<double> targets;
    Matrix mc_mean_state;          // average of kept final-time states
    Matrix robinet_state;          // filter state on the target record
    double trace_dist = 0.0;       // between the two
    double fidelity = 0.0;
    double bootstrap_radius95 = 0.0;  // 95th pct of resampled-mean distances
    double nearest_miss = 0.0;        // max-norm distance of the closest rejected record
    double keep_rate() const { return n_total ? double(n_kept) / double(n_total) : 0.0; }
};

/// Simulates n_traj fine trajectories, digitizes at dt, keeps those whose
/// record matches every target within eps (max-norm over bins), averages
/// the kept final-time states and compares against the robinet state.
/// Single diffusive channel; K = targets.size() bins.
inline PostSelectionReport postselect_verify(const MeasurementModel& model,
                                             const QuantumState& rho0, double dt,
                                             const std::vector<double>& targets, double eps,
                                             long n_traj, std::uint64_t seed, int n_p = 31,
                                             int fine_substeps = 1000, int threads = 0,
                                             int bootstrap_resamples = 500) {
    require(eps > 0, "postselect_verify: eps must be positive");
    require(n_traj >= 1000, "postselect_verify: n_traj must be at least 1e3");
    require(!targets.empty(), "postselect_verify: no targets");
    require(model.n_channels() == 1 &&
                model.monitored[0].kind == ChannelKind::Diffusive,
            "postselect_verify: single diffusive channel required");

    const int n_bins = int(targets.size());
    const double dt_fine = dt / fine_substeps;

    struct Slot {
        bool kept = false;
        double miss = 0.0;
        Matrix state;
    };
    std::vector<Slot> slots(n_traj);
    detail::FineStepper stepper_proto(model, dt_fine);

    parallel_for(std::size_t(n_traj), threads, [&](std::size_t t) {
        detail::FineStepper stepper = stepper_proto;
        PhiloxStream rng(seed, t);
        Matrix rho = rho0.rho;
        std::vector<double> incr(1, 0.0);
        double miss = 0.0;
        for (int b = 0; b < n_bins; ++b) {
            double acc = 0.0;
            for (int s = 0; s < fine_substeps; ++s) {
                stepper.step(rho, rng, incr);
                acc += incr[0];
            }
            miss = std::max(miss, std::abs(acc - targets[b]));
        }
        slots[t].miss = miss;
        slots[t].kept = miss <= eps;
        if (slots[t].kept) slots[t].state = rho;
    });

    PostSelectionReport rep;
    rep.n_total = n_traj;
    rep.epsilon = eps;
    rep.targets = targets;

    std::vector<Matrix> kept;
    double nearest = 1e300;
    for (auto& s : slots) {
        if (s.kept)
            kept.push_back(std::move(s.state));
        else
            nearest = std::min(nearest, s.miss);
    }
    rep.n_kept = long(kept.size());
    rep.nearest_miss = kept.size() == slots.size() ? 0.0 : nearest;

    const InstrumentCache cache = make_instrument_cache(model, dt, n_p, threads);
    QuantumState rob = rho0;
    for (double target : targets) rob = filter_step(cache, rob, target).state;
    rep.robinet_state = rob.rho;

    if (rep.n_kept == 0) {
        throw numerical_error(
            "postselect_verify: no trajectory matched the targets within eps; nearest miss " +
            std::to_string(rep.nearest_miss) + " (retune eps)");
    }

    Matrix mean = Matrix::Zero(model.dim, model.dim);
    for (const auto& s : kept) mean += s;
    mean /= double(kept.size());
    rep.mc_mean_state = mean;
    rep.trace_dist = trace_distance(mean, rob.rho);
    rep.fidelity = uhlmann_fidelity(repair_positivity(mean).first, rob);

    if (bootstrap_resamples > 0 && kept.size() > 1) {
        PhiloxStream rng(seed ^ 0x626f6f74u, 0);
        std::vector<double> dists(bootstrap_resamples);
        for (int b = 0; b < bootstrap_resamples; ++b) {
            Matrix acc = Matrix::Zero(model.dim, model.dim);
            for (std::size_t i = 0; i < kept.size(); ++i) {
                const auto pick = std::size_t(rng.uniform() * double(kept.size())) % kept.size();
                acc += kept[pick];
            }
            acc /= double(kept.size());
            dists[b] = trace_distance(acc, mean);
        }
        std::sort(dists.begin(), dists.end());
        rep.bootstrap_radius95 = dists[std::size_t(0.95 * (dists.size() - 1))];
    }
    return rep;
}

/// Histogram-vs-exact comparison of the joint law of (I_1, I_2).
struct JointDensityReport {
    std::vector<double> grid1, grid2;            // cell edges, size n+1
    std::vector<std::vector<double>> histogram;  // [i][j], normalized counts
    std::vector<std::vector<double>> exact;      // [i][j], exact cell masses
    double tv_distance = 0.0;
    double hist_mass = 0.0;   // fraction of trajectories landing on the grid
    double exact_mass = 0.0;  // exact mass covered by the grid
    long n_traj = 0;
};

/// Auto-sized grid: mean +- span_sigmas standard deviations per bin
/// (moments from the tilted MGF).
inline std::pair<std::vector<double>, std::vector<double>> joint_density_grid(
    const MeasurementModel& model, const QuantumState& rho0, double dt, int cells = 50,
    double span_sigmas = 8.0) {
    const SignalMoments m1 = signal_moments(model, rho0, dt);
    const Superoperator liou = build_liouvillian(model);
    const QuantumState rho1 =
        repair_positivity(expm_apply(Superoperator{liou.mat, model.dim}, rho0, dt).rho).first;
    const SignalMoments m2 = signal_moments(model, rho1, dt);
    auto edges = [cells](const SignalMoments& m, double span) {
        std::vector<double> e(cells + 1);
        const double lo = m.mean - span * std::sqrt(m.var);
        const double hi = m.mean + span * std::sqrt(m.var);
        for (int i = 0; i <= cells; ++i) e[i] = lo + (hi - lo) * i / cells;
        return e;
    };
    return {edges(m1, span_sigmas), edges(m2, span_sigmas)};
}

inline JointDensityReport joint_density_compare(const MeasurementModel& model,
                                                const QuantumState& rho0, double dt,
                                                const std::vector<double>& grid1,
                                                const std::vector<double>& grid2, long n_traj,
                                                std::uint64_t seed, int n_p = 121,
                                                int fine_substeps = 1000, int threads = 0) {
    require(model.n_channels() == 1 &&
                model.monitored[0].kind == ChannelKind::Diffusive,
            "joint_density_compare: single diffusive channel required");
    require(grid1.size() >= 2 && grid2.size() >= 2, "joint_density_compare: degenerate grid");
    const int n1 = int(grid1.size()) - 1, n2 = int(grid2.size()) - 1;
    const double dt_fine = dt / fine_substeps;

    // exact cell masses: center density x area (cells are well below the
    // density's sqrt(dt) feature scale at the default spans)
    const InstrumentCache cache = make_instrument_cache(model, dt, n_p, threads);
    JointDensityReport rep;
    rep.grid1 = grid1;
    rep.grid2 = grid2;
    rep.n_traj = n_traj;
    rep.exact.assign(n1, std::vector<double>(n2, 0.0));
    rep.histogram.assign(n1, std::vector<double>(n2, 0.0));

    parallel_for(std::size_t(n1), threads, [&](std::size_t i) {
        const double c1 = 0.5 * (grid1[i] + grid1[i + 1]);
        const Matrix r1 = detail::apply_exact_map_raw(cache, rho0.rho, {c1},
                                                      default_tolerances().expm);
        for (int j = 0; j < n2; ++j) {
            const double c2 = 0.5 * (grid2[j] + grid2[j + 1]);
            const double dens =
                detail::apply_exact_map_raw(cache, r1, {c2}, default_tolerances().expm)
                    .trace()
                    .real();
            rep.exact[i][j] = std::max(dens, 0.0) * (grid1[i + 1] - grid1[i]) *
                              (grid2[j + 1] - grid2[j]);
        }
    }, 1);
    for (const auto& row : rep.exact)
        for (double m : row) rep.exact_mass += m;
    require(rep.exact_mass >= 0.999,
            "joint_density_compare: grid covers less than 99.9% of the exact mass");

    // per-trajectory cell index, then an order-independent count
    std::vector<int> cell_of(n_traj, -1);
    detail::FineStepper stepper_proto(model, dt_fine);
    parallel_for(std::size_t(n_traj), threads, [&](std::size_t t) {
        detail::FineStepper stepper = stepper_proto;
        PhiloxStream rng(seed, t);
        Matrix rho = rho0.rho;
        std::vector<double> incr(1, 0.0);
        double i1 = 0.0, i2 = 0.0;
        for (int s = 0; s < fine_substeps; ++s) {
            stepper.step(rho, rng, incr);
            i1 += incr[0];
        }
        for (int s = 0; s < fine_substeps; ++s) {
            stepper.step(rho, rng, incr);
            i2 += incr[0];
        }
        const auto locate = [](const std::vector<double>& edges, double x) -> int {
            if (x < edges.front() || x >= edges.back()) return -1;
            return int(std::upper_bound(edges.begin(), edges.end(), x) - edges.begin()) - 1;
        };
        const int a = locate(grid1, i1), b = locate(grid2, i2);
        if (a >= 0 && b >= 0) cell_of[t] = a * n2 + b;
    });
    long on_grid = 0;
    for (long t = 0; t < n_traj; ++t) {
        if (cell_of[t] < 0) continue;
        rep.histogram[cell_of[t] / n2][cell_of[t] % n2] += 1.0;
        ++on_grid;
    }
    for (auto& row : rep.histogram)
        for (auto& h : row) h /= double(n_traj);
    rep.hist_mass = double(on_grid) / double(n_traj);

    double tv = 0.0;
    for (int i = 0; i < n1; ++i)
        for (int j = 0; j < n2; ++j) tv += std::abs(rep.histogram[i][j] - rep.exact[i][j]);
    rep.tv_distance = 0.5 * tv;
    return rep;
}

}  // namespace robinet
