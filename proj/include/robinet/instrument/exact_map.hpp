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
#include <optional>
#include <sstream>
#include <vector>

#include "robinet/core/expm.hpp"
#include "robinet/core/metrics.hpp"
#include "robinet/core/parallel.hpp"
#include "robinet/core/record.hpp"
#include "robinet/instrument/quadrature.hpp"

namespace robinet {

/// Per-bin propagators of the exact instrument, precomputed once per
/// (model, dt, rule). Diffusive channels use the substitution
/// u = p sqrt(dt/2): the Gaussian kernel e^{-dt p^2/2} = e^{-u^2} stays in
/// the exponent (each cached superoperator is the full tilted propagator
/// e^{dt L - i p dt C - u^2}, which has O(1) norm), and the Gauss-Hermite
/// weights are the modified ones w e^{+u^2}. Keeping both factors O(1) is
/// what makes large node counts stable; the naive split w * e^{dt(L-ipC)}
/// pairs e^{-u^2} weights with e^{+u^2} propagator norms and amplifies
/// tail-weight roundoff without bound.
struct InstrumentCache {
    MeasurementModel model;
    double dt = 0.0;
    std::uint64_t model_fp = 0;
    int n_p = 0;
    bool dense = true;

    struct Node {
        double weight;                   // product of per-channel weight prefactors
        std::vector<double> phase;       // phase factor e^{i phase[c] I_c} per channel
        std::vector<Complex> tilt;       // tilt coefficient of C_c in the generator
        double gauss_shift = 0.0;        // sum of u^2 over diffusive channels
        Matrix prop;                     // dense path: e^{dt L_tilt - shift}, d^2 x d^2
    };
    std::vector<Node> nodes;
    std::vector<double> gh_node_max;     // per channel, diffusive only (else 0)

    void check(const MeasurementModel& m, double step) const {
        require(model_fingerprint(m) == model_fp && step == dt,
                "InstrumentCache: cache was built for a different model or dt");
    }

    /// Conservative half-width of the |I| window (diffusive channel c,
    /// around 0) inside which the quadrature is trustworthy; beyond it the
    /// finite Fourier sum aliases. The boundary scales as sqrt(2 dt n_p),
    /// shrunk by the tilt-induced broadening; a grid-sizing heuristic, not
    /// a hard guarantee (the true window also depends on the state).
    double validity_halfwidth(int c) const {
        if (model.monitored[c].kind != ChannelKind::Diffusive) return 1e300;
        const Eigen::JacobiSVD<Matrix> svd(model.monitored[c].op);
        const double cnorm =
            2.0 * std::sqrt(model.monitored[c].eta) * svd.singularValues()(0);
        const double base = std::sqrt(2.0 * dt * n_p);
        return std::max(base - 1.1 * dt * cnorm, base / 3.0);
    }
};

inline InstrumentCache make_instrument_cache(const MeasurementModel& model, double dt, int n_p,
                                             int threads = 0, bool force_action = false,
                                             int max_channels = 2) {
    model.validate();
    require(dt > 0.0, "make_instrument_cache: dt must be positive");
    require(n_p > 0, "make_instrument_cache: n_p must be positive");
    const int m = model.n_channels();
    require(m >= 1, "make_instrument_cache: model has no monitored channel");
    require(m <= max_channels,
            "make_instrument_cache: tensor-product cost grows as n_p^m; raise max_channels "
            "explicitly to allow more than 2 monitored channels");

    InstrumentCache cache;
    cache.model = model;
    cache.dt = dt;
    cache.model_fp = model_fingerprint(model);
    cache.n_p = n_p;
    cache.dense = !force_action && model.dim * model.dim <= kDenseSuperopLimit;

    struct ChannelNodes {
        std::vector<double> weight, phase, gauss;
        std::vector<Complex> tilt;
        double node_max = 0.0;
    };
    std::vector<ChannelNodes> per_channel(m);
    for (int c = 0; c < m; ++c) {
        auto& cn = per_channel[c];
        if (model.monitored[c].kind == ChannelKind::Diffusive) {
            const QuadratureRule rule = gauss_hermite_modified(n_p);
            const double jac = 1.0 / (3.14159265358979323846 * std::sqrt(2.0 * dt));
            for (int j = 0; j < n_p; ++j) {
                const double p = rule.nodes[j] * std::sqrt(2.0 / dt);
                cn.weight.push_back(rule.weights[j] * jac);
                cn.phase.push_back(p);
                cn.gauss.push_back(rule.nodes[j] * rule.nodes[j]);
                cn.tilt.push_back(Complex(0, -p));
            }
            cn.node_max = rule.nodes.back();
        } else {
            const QuadratureRule rule = gauss_legendre_pi(n_p);
            for (int j = 0; j < n_p; ++j) {
                cn.weight.push_back(rule.weights[j] / (2.0 * 3.14159265358979323846));
                cn.phase.push_back(rule.nodes[j]);
                cn.gauss.push_back(0.0);
                cn.tilt.push_back(std::exp(Complex(0, -rule.nodes[j])) - 1.0);
            }
        }
        cache.gh_node_max.push_back(cn.node_max);
    }

    std::size_t total = 1;
    for (int c = 0; c < m; ++c) total *= std::size_t(n_p);
    cache.nodes.resize(total);
    for (std::size_t idx = 0; idx < total; ++idx) {
        auto& node = cache.nodes[idx];
        node.weight = 1.0;
        node.phase.resize(m);
        node.tilt.resize(m);
        std::size_t rem = idx;
        for (int c = 0; c < m; ++c) {
            const int j = int(rem % n_p);
            rem /= n_p;
            node.weight *= per_channel[c].weight[j];
            node.phase[c] = per_channel[c].phase[j];
            node.gauss_shift += per_channel[c].gauss[j];
            node.tilt[c] = per_channel[c].tilt[j];
        }
    }

    if (cache.dense) {
        const Superoperator liou = build_liouvillian(model);
        std::vector<Superoperator> meas;
        for (const auto& ch : model.monitored) meas.push_back(build_measurement_superop(ch));
        parallel_for(total, threads, [&](std::size_t idx) {
            Matrix gen = liou.mat;
            for (int c = 0; c < m; ++c) gen += cache.nodes[idx].tilt[c] * meas[c].mat;
            gen -= (cache.nodes[idx].gauss_shift / dt) *
                   Matrix::Identity(gen.rows(), gen.cols());
            cache.nodes[idx].prop = expm_dense(gen, dt);
        });
    }
    return cache;
}

namespace detail {

/// Quadrature sum without positivity/density checks; hermitized output.
inline Matrix apply_exact_map_raw(const InstrumentCache& cache, const Matrix& rho,
                                  const std::vector<double>& I, double expm_tol) {
    const int m = int(I.size());
    require(m == cache.model.n_channels(), "apply_exact_map: signal arity mismatch");
    Matrix acc = Matrix::Zero(cache.model.dim, cache.model.dim);
    if (cache.dense) {
        const CVector v = vectorize(rho);
        CVector vacc = CVector::Zero(v.size());
        for (const auto& node : cache.nodes) {
            double arg = 0.0;
            for (int c = 0; c < m; ++c) arg += node.phase[c] * I[c];
            const Complex coef = node.weight * std::exp(Complex(0, arg));
            vacc.noalias() += coef * (node.prop * v);
        }
        acc = unvectorize(vacc, cache.model.dim);
    } else {
        for (const auto& node : cache.nodes) {
            double arg = 0.0;
            for (int c = 0; c < m; ++c) arg += node.phase[c] * I[c];
            const Complex coef = node.weight * std::exp(Complex(0, arg));
            auto action = GeneratorAction::make(cache.model, node.tilt);
            action.ident_coef = -node.gauss_shift / cache.dt;
            action.norm_bound += std::abs(action.ident_coef);
            acc += coef * expm_action(action, action.norm_bound, cache.dt, rho, expm_tol);
        }
    }
    return hermitize(acc);
}

}  // namespace detail

/// K_I(rho): the linear (unnormalized) map of the exact instrument. The
/// trace of the result is the probability density (diffusive channels) or
/// mass (jump channels) of the bin value I. Throws numerical_error when the
/// density is nonpositive, which signals quadrature underflow at extreme I.
inline QuantumState apply_exact_map(const InstrumentCache& cache, const QuantumState& state,
                                    const std::vector<double>& I,
                                    double expm_tol = default_tolerances().expm) {
    Matrix out = detail::apply_exact_map_raw(cache, state.rho, I, expm_tol);
    const double tr = out.trace().real();
    if (!(tr > 0.0)) {
        std::ostringstream os;
        os << "apply_exact_map: nonpositive density " << tr << " at I = (";
        for (std::size_t c = 0; c < I.size(); ++c) os << (c ? ", " : "") << I[c];
        os << "); the signal lies outside the quadrature validity window, increase n_p";
        throw numerical_error(os.str());
    }
    return QuantumState(out, false);
}

inline QuantumState apply_exact_map(const InstrumentCache& cache, const QuantumState& state,
                                    double I, double expm_tol = default_tolerances().expm) {
    return apply_exact_map(cache, state, std::vector<double>{I}, expm_tol);
}

struct FilterStepResult {
    QuantumState state;   // normalized robinet state
    double density = 0.0;
    bool repaired = false;
};

/// One recursion step: density, then renormalized / hermitized / clipped state.
inline FilterStepResult filter_step(const InstrumentCache& cache, const QuantumState& state,
                                    const std::vector<double>& I,
                                    const Tolerances& tol = default_tolerances()) {
    const QuantumState linear = apply_exact_map(cache, state, I, tol.expm);
    const double density = linear.trace();
    auto [repairedState, fired] = repair_positivity(linear.rho, tol);
    return {repairedState, density, fired};
}

inline FilterStepResult filter_step(const InstrumentCache& cache, const QuantumState& state,
                                    double I, const Tolerances& tol = default_tolerances()) {
    return filter_step(cache, state, std::vector<double>{I}, tol);
}

/// Robinet filter output over a full record.
struct FilterOutput {
    std::vector<QuantumState> states;   // rho_bar_1 ... rho_bar_n
    std::vector<double> densities;      // p_{I_k}
    double log_likelihood = 0.0;
    int repairs = 0;
    std::optional<int> failed_step;     // set when the filter aborted
};

inline FilterOutput run_filter(const InstrumentCache& cache, const DigitizedRecord& record,
                               const QuantumState& rho0,
                               const Tolerances& tol = default_tolerances()) {
    require(record.compatible_with(cache.model), "run_filter: record channels do not match model");
    require(record.dt == cache.dt, "run_filter: record dt does not match cache");
    FilterOutput out;
    QuantumState state = rho0;
    for (int k = 0; k < record.n_bins(); ++k) {
        try {
            auto step = filter_step(cache, state, record.values[k], tol);
            out.states.push_back(step.state);
            out.densities.push_back(step.density);
            out.log_likelihood += std::log(step.density);
            out.repairs += step.repaired ? 1 : 0;
            state = step.state;
        } catch (const numerical_error&) {
            out.failed_step = k;
            break;
        }
    }
    return out;
}

/// Tr[K_I(state)] on a grid of per-channel signal values. No error
/// signalling: far-tail points may come back tiny-negative (aliasing),
/// callers clamp as appropriate.
inline std::vector<double> signal_density_grid(const InstrumentCache& cache,
                                               const QuantumState& state,
                                               const std::vector<std::vector<double>>& grid,
                                               double expm_tol = default_tolerances().expm) {
    std::vector<double> out(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i)
        out[i] = detail::apply_exact_map_raw(cache, state.rho, grid[i], expm_tol).trace().real();
    return out;
}

inline std::vector<double> signal_density_grid(const InstrumentCache& cache,
                                               const QuantumState& state,
                                               const std::vector<double>& grid,
                                               double expm_tol = default_tolerances().expm) {
    std::vector<std::vector<double>> g;
    g.reserve(grid.size());
    for (double x : grid) g.push_back({x});
    return signal_density_grid(cache, state, g, expm_tol);
}

/// Masses of a single jump channel up to truncation: stops once the
/// cumulative mass exceeds 1 - tail_tol (and n is past the running mean).
inline std::vector<double> jump_mass_sum(const InstrumentCache& cache, const QuantumState& state,
                                         double tail_tol = 1e-12, int n_max_cap = 4096) {
    require(cache.model.n_channels() == 1 &&
                cache.model.monitored[0].kind == ChannelKind::Jump,
            "jump_mass_sum: single jump channel required");
    std::vector<double> masses;
    double cum = 0.0;
    for (int n = 0; n <= n_max_cap; ++n) {
        const double mass =
            detail::apply_exact_map_raw(cache, state.rho, {double(n)}, default_tolerances().expm)
                .trace()
                .real();
        masses.push_back(mass);
        cum += mass;
        if (1.0 - cum < tail_tol && n >= 2) break;
    }
    return masses;
}

/// Exact first two moments of the bin value of channel `c` via central
/// finite differences of the tilted moment-generating function
/// M(j) = Tr e^{dt (L + j C + j^2/2 Id)} rho  (diffusive)
/// M(j) = Tr e^{dt (L + (e^j - 1) C)} rho     (jump counts).
struct SignalMoments {
    double mean = 0.0;
    double var = 0.0;
};

inline SignalMoments signal_moments(const MeasurementModel& model, const QuantumState& state,
                                    double dt, int c = 0) {
    model.validate();
    require(c >= 0 && c < model.n_channels(), "signal_moments: channel index out of range");
    const Superoperator liou = build_liouvillian(model);
    const Superoperator meas = build_measurement_superop(model.monitored[c]);
    const bool diffusive = model.monitored[c].kind == ChannelKind::Diffusive;
    const double h = 0.02 / std::sqrt(dt + 1.0);

    auto mgf = [&](double j) {
        const double coef = diffusive ? j : std::expm1(j);
        Matrix gen = liou.mat + coef * meas.mat;
        QuantumState prop = expm_apply(Superoperator{gen, model.dim}, state, dt);
        double val = prop.trace();
        if (diffusive) val *= std::exp(0.5 * dt * j * j);
        return val;
    };
    const double mp = mgf(h), mm = mgf(-h);
    SignalMoments mom;
    mom.mean = (mp - mm) / (2.0 * h);
    const double m2 = (mp - 2.0 + mm) / (h * h);
    mom.var = std::max(m2 - mom.mean * mom.mean, diffusive ? 0.25 * dt : 0.0);
    return mom;
}

}  // namespace robinet
