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

#include <robinet/robinet.hpp>

namespace robinet::test {

/// Deterministic random Hermitian matrix with entries of the given scale.
inline Matrix random_hermitian(PhiloxStream& rng, int dim, double scale = 0.5) {
    Matrix a(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) a(i, j) = Complex(rng.normal(), rng.normal()) * scale;
    return hermitize(a);
}

inline Matrix random_operator(PhiloxStream& rng, int dim, double scale = 0.5) {
    Matrix a(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) a(i, j) = Complex(rng.normal(), rng.normal()) * scale;
    return a;
}

/// Random density matrix (mixture of a few random pure states).
inline Matrix random_density(PhiloxStream& rng, int dim) {
    Matrix rho = Matrix::Zero(dim, dim);
    for (int k = 0; k < dim; ++k) {
        CVector v(dim);
        for (int i = 0; i < dim; ++i) v(i) = Complex(rng.normal(), rng.normal());
        v.normalize();
        rho += rng.uniform() * v * v.adjoint();
    }
    rho = hermitize(rho);
    return rho / rho.trace().real();
}

inline Matrix random_pure(PhiloxStream& rng, int dim) {
    CVector v(dim);
    for (int i = 0; i < dim; ++i) v(i) = Complex(rng.normal(), rng.normal());
    v.normalize();
    return v * v.adjoint();
}

/// Single-diffusive-channel random model with controlled operator norms.
inline MeasurementModel random_diffusive_model(PhiloxStream& rng, int dim = 2,
                                               double scale = 0.5, double eta_min = 0.2) {
    MeasurementModel m;
    m.dim = dim;
    m.hamiltonian = random_hermitian(rng, dim, scale);
    Channel ch;
    ch.op = random_operator(rng, dim, scale);
    ch.eta = eta_min + (1.0 - eta_min) * rng.uniform();
    ch.kind = ChannelKind::Diffusive;
    m.monitored.push_back(ch);
    return m;
}

inline MeasurementModel random_jump_model(PhiloxStream& rng, int dim = 2, double scale = 0.5) {
    MeasurementModel m;
    m.dim = dim;
    m.hamiltonian = random_hermitian(rng, dim, scale);
    Channel ch;
    ch.op = random_operator(rng, dim, scale);
    ch.eta = 0.2 + 0.8 * rng.uniform();
    ch.kind = ChannelKind::Jump;
    ch.dark_rate = 0.3 * rng.uniform();
    m.monitored.push_back(ch);
    return m;
}

/// The Fig. 1 qubit: H = sigma_x + sigma_y/2, L = 2 sigma_-, eta = 0.8.
inline MeasurementModel fig1_model(double eta = 0.8) {
    MeasurementModel m;
    m.dim = 2;
    m.hamiltonian = sigma_x() + 0.5 * sigma_y();
    Channel ch;
    ch.op = 2.0 * sigma_minus();
    ch.eta = eta;
    ch.kind = ChannelKind::Diffusive;
    m.monitored.push_back(ch);
    return m;
}

inline QuantumState excited_qubit() { return QuantumState(fock_state(2, 0), true); }

/// Node count that keeps the quadrature validity window ahead of a grid
/// spanning mean +- span_sigmas standard deviations.
inline int recommended_nodes(const MeasurementModel& model, const QuantumState& rho0, double dt,
                             double span_sigmas = 8.5, int cap = 341) {
    const SignalMoments mom = signal_moments(model, rho0, dt);
    const Eigen::JacobiSVD<Matrix> svd(model.monitored[0].op);
    const double cnorm = 2.0 * std::sqrt(model.monitored[0].eta) * svd.singularValues()(0);
    const double reach = std::abs(mom.mean) + span_sigmas * std::sqrt(mom.var);
    const double base = reach + 1.1 * dt * cnorm;
    const int n = int(std::ceil(1.3 * base * base / (2.0 * dt))) + 16;
    return std::min(std::max(n, 41), cap);
}

/// Oracle: uniform-grid trapezoid marginalization of the exact map over I,
/// grid sized from the exact signal moments (resolves the sqrt(dt) feature
/// scale, spans mean +- 8 sigma clipped to the validity window).
inline Matrix marginalize_exact_map(const InstrumentCache& cache, const MeasurementModel& model,
                                    const QuantumState& rho0, double dt) {
    // grid sizing needs a unit-trace state; the integral itself is linear
    const QuantumState unit(rho0.rho / rho0.trace(), true);
    const SignalMoments mom = signal_moments(model, unit, dt);
    const double half =
        std::min(9.0 * std::sqrt(mom.var), 0.97 * cache.validity_halfwidth(0));
    const int npts =
        std::max(129, int(std::ceil(2.0 * half / (std::sqrt(dt) / 6.0))) | 1);
    std::vector<Matrix> vals(npts);
    std::vector<double> dens(npts);
    for (int i = 0; i < npts; ++i) {
        const double x = mom.mean - half + 2.0 * half * i / (npts - 1);
        vals[i] = robinet::detail::apply_exact_map_raw(cache, rho0.rho, {x},
                                                       default_tolerances().expm);
        dens[i] = vals[i].trace().real();
    }
    // discard aliasing junk: walk outward from the peak and cut each tail
    // at the first point that drops below 1e-13 of the peak density
    int ipeak = 0;
    for (int i = 1; i < npts; ++i)
        if (dens[i] > dens[ipeak]) ipeak = i;
    const double floor = 1e-13 * dens[ipeak];
    int lo = 0, hi = npts - 1;
    for (int i = ipeak; i >= 0; --i)
        if (dens[i] < floor) {
            lo = i;
            break;
        }
    for (int i = ipeak; i < npts; ++i)
        if (dens[i] < floor) {
            hi = i;
            break;
        }
    Matrix acc = Matrix::Zero(model.dim, model.dim);
    for (int i = lo; i <= hi; ++i) acc += vals[i];
    return acc * (2.0 * half / (npts - 1));
}

/// Oracle: brute-force enumeration of {{A^a B^b}} applied to rho.
inline Matrix permutation_sum_enumerated(const Superoperator& a, const Superoperator& b, int na,
                                         int nb, const Matrix& rho) {
    Matrix acc = Matrix::Zero(rho.rows(), rho.cols());
    std::vector<int> word(na + nb, 0);
    for (int i = 0; i < nb; ++i) word[i] = 1;  // 1 marks B
    std::sort(word.begin(), word.end());
    do {
        Matrix cur = rho;
        for (int i = int(word.size()) - 1; i >= 0; --i)
            cur = word[i] ? b.apply(cur) : a.apply(cur);
        acc += cur;
    } while (std::next_permutation(word.begin(), word.end()));
    return acc;
}

/// Least-squares slope of log(err) against log(x).
inline double fit_loglog_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
    const int n = int(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = 0; i < n; ++i) {
        const double lx = std::log(xs[i]), ly = std::log(ys[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

/// One-sample Kolmogorov-Smirnov p-value against a standard normal after
/// standardizing with (mu, sigma).
inline double ks_pvalue_normal(std::vector<double> xs, double mu, double sigma) {
    std::sort(xs.begin(), xs.end());
    const double n = double(xs.size());
    double d = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double z = (xs[i] - mu) / sigma;
        const double cdf = 0.5 * std::erfc(-z / std::sqrt(2.0));
        d = std::max(d, std::abs(cdf - double(i + 1) / n));
        d = std::max(d, std::abs(cdf - double(i) / n));
    }
    const double lambda = (std::sqrt(n) + 0.12 + 0.11 / std::sqrt(n)) * d;
    double p = 0.0;
    for (int k = 1; k <= 100; ++k) p += 2.0 * std::pow(-1.0, k - 1) * std::exp(-2.0 * k * k * lambda * lambda);
    return std::clamp(p, 0.0, 1.0);
}

/// Two-sample Kolmogorov-Smirnov p-value.
inline double ks_pvalue_two_sample(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    double d = 0.0;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] <= b[j])
            ++i;
        else
            ++j;
        d = std::max(d, std::abs(double(i) / a.size() - double(j) / b.size()));
    }
    const double ne = double(a.size()) * b.size() / double(a.size() + b.size());
    const double lambda = (std::sqrt(ne) + 0.12 + 0.11 / std::sqrt(ne)) * d;
    double p = 0.0;
    for (int k = 1; k <= 100; ++k) p += 2.0 * std::pow(-1.0, k - 1) * std::exp(-2.0 * k * k * lambda * lambda);
    return std::clamp(p, 0.0, 1.0);
}

}  // namespace robinet::test
