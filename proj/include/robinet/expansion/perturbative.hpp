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
#include <vector>

#include "robinet/core/superop.hpp"
#include "robinet/expansion/hermite.hpp"

namespace robinet {

inline constexpr int kDefaultMaxExpansionOrder = 12;

/// Signal value rescaled to order one: Ibar = I / sqrt(dt).
struct ReducedSignal {
    double ibar = 0.0;
    double dt = 0.0;
    double value() const { return ibar * std::sqrt(dt); }
};

/// {{A^a B^b}}(rho): sum over every interleaving of a copies of A and b
/// copies of B, evaluated by dynamic programming on word prefixes instead
/// of enumerating the binomial(a+b, a) words. R(i,j) = A R(i-1,j) + B R(i,j-1).
inline Matrix permutation_sum_apply(const Superoperator& a, const Superoperator& b, int na, int nb,
                                    const Matrix& rho) {
    require(na >= 0 && nb >= 0 && na + nb <= 16, "permutation_sum_apply: a + b must be <= 16");
    require(a.dim == b.dim && a.dim == rho.rows(), "permutation_sum_apply: dimension mismatch");
    std::vector<std::vector<Matrix>> r(na + 1, std::vector<Matrix>(nb + 1));
    r[0][0] = rho;
    for (int i = 0; i <= na; ++i)
        for (int j = 0; j <= nb; ++j) {
            if (i == 0 && j == 0) continue;
            Matrix acc = Matrix::Zero(a.dim, a.dim);
            if (i > 0) acc += a.apply(r[i - 1][j]);
            if (j > 0) acc += b.apply(r[i][j - 1]);
            r[i][j] = std::move(acc);
        }
    return r[na][nb];
}

namespace detail {

/// Single-diffusive-channel actions of the Liouvillian and measurement
/// superoperator, applied matrix-free.
struct ExpansionActions {
    Matrix heff;          // -iH - (1/2) sum L^dag L
    std::vector<Matrix> lindblad_ops;
    Matrix monitored;     // L of the single diffusive channel
    double sqrt_eta = 1.0;

    static ExpansionActions make(const MeasurementModel& model) {
        model.validate();
        require(model.n_channels() == 1 &&
                    model.monitored[0].kind == ChannelKind::Diffusive,
                "perturbative expansion: derived for a single diffusive channel");
        ExpansionActions a;
        const int d = model.dim;
        Matrix ldl = Matrix::Zero(d, d);
        for (const auto& ch : model.monitored) {
            a.lindblad_ops.push_back(ch.op);
            ldl += ch.op.adjoint() * ch.op;
        }
        for (const auto& l : model.unmonitored) {
            a.lindblad_ops.push_back(l);
            ldl += l.adjoint() * l;
        }
        a.heff = Complex(0, -1) * model.hamiltonian - 0.5 * ldl;
        a.monitored = model.monitored[0].op;
        a.sqrt_eta = std::sqrt(model.monitored[0].eta);
        return a;
    }

    Matrix liouville(const Matrix& rho) const {
        Matrix out = heff * rho + rho * heff.adjoint();
        for (const auto& l : lindblad_ops) out += l * rho * l.adjoint();
        return out;
    }
    Matrix measurement(const Matrix& rho) const {
        return sqrt_eta * (monitored * rho + rho * monitored.adjoint());
    }
};

/// Taylor table of e^{dt L - i x sqrt(dt) C}(rho): coefficients B_{n,k} of
/// x^k at Taylor order n, truncated to contributions of order
/// q = 2n - k <= q_max in sqrt(dt). Calls `emit(n, k, B_{n,k})` for every
/// retained table entry; the total work is O(q_max^2) superoperator
/// applications (the quadratic-cost scheme).
template <class Emit>
void taylor_table(const ExpansionActions& act, const Matrix& rho, double dt, int q_max,
                  Emit&& emit) {
    std::vector<Matrix> cur{rho};   // index k at current Taylor order n
    int base_k = 0;
    emit(0, 0, cur[0]);
    for (int n = 0; n < q_max; ++n) {
        const int lo = std::max(0, 2 * (n + 1) - q_max);
        const int hi = n + 1;
        std::vector<Matrix> next(hi - lo + 1);
        for (int k = lo; k <= hi; ++k) {
            Matrix t = Matrix::Zero(rho.rows(), rho.cols());
            const int ik = k - base_k;          // index of B_{n,k} in cur
            if (ik >= 0 && ik < int(cur.size())) t += dt * act.liouville(cur[ik]);
            const int ikm = k - 1 - base_k;     // index of B_{n,k-1}
            if (ikm >= 0 && ikm < int(cur.size()))
                t += Complex(0, -std::sqrt(dt)) * act.measurement(cur[ikm]);
            next[k - lo] = t / double(n + 1);
            emit(n + 1, k, next[k - lo]);
        }
        cur = std::move(next);
        base_k = lo;
    }
}

}  // namespace detail

/// K_I(rho) truncated at order q in sqrt(dt): the Gaussian prefactor
/// e^{-Ibar^2/2} / sqrt(2 pi dt) times
///   sum_{q' <= q} sqrt(dt)^{q'} sum_n H_{2n-q'}(Ibar)/n! {{L^{q'-n} C^{2n-q'}}},
/// evaluated by the recursive Taylor table (track powers of x, integrate
/// against the Gaussian kernel exactly via the Hermite identity).
inline QuantumState apply_perturbative_map(const MeasurementModel& model, double ibar, double dt,
                                           int q, const QuantumState& state,
                                           int q_max = kDefaultMaxExpansionOrder) {
    require(q >= 0, "apply_perturbative_map: order must be >= 0");
    require(q <= q_max, "apply_perturbative_map: order exceeds q_max");
    const auto act = detail::ExpansionActions::make(model);
    const auto hv = hermite_all(q, ibar);
    Matrix acc = Matrix::Zero(model.dim, model.dim);
    static const Complex ipow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    detail::taylor_table(act, state.rho, dt, q, [&](int /*n*/, int k, const Matrix& b) {
        // integral of x^k against e^{-x^2/2 + i Ibar x} contributes i^k H_k(Ibar)
        acc += ipow[k % 4] * hv[k] * b;
    });
    const double gauss = std::exp(-0.5 * ibar * ibar) / std::sqrt(2.0 * 3.14159265358979323846 * dt);
    return QuantumState(gauss * hermitize(acc), false);
}

/// Coefficients alpha_j of the signal density polynomial
///   p(I) = e^{-Ibar^2/2}/sqrt(2 pi dt) * sum_j alpha_j Ibar^j
/// obtained by tracing the Taylor table and expanding the Hermite factors.
inline std::vector<double> density_polynomial(const MeasurementModel& model,
                                              const QuantumState& state, double dt, int q,
                                              int q_max = kDefaultMaxExpansionOrder) {
    require(q >= 0 && q <= q_max, "density_polynomial: order out of range");
    const auto act = detail::ExpansionActions::make(model);
    const auto hc = hermite_coefficients(q);
    std::vector<double> alpha(q + 1, 0.0);
    static const Complex ipow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    detail::taylor_table(act, state.rho, dt, q, [&](int /*n*/, int k, const Matrix& b) {
        const Complex tr = ipow[k % 4] * b.trace();
        for (std::size_t j = 0; j < hc[k].size(); ++j) alpha[j] += (tr * hc[k][j]).real();
    });
    return alpha;
}

/// Single Kraus operator of the eta = 1 expansion, valid through order
/// sqrt(dt)^5 with G = -iH - L^dag L / 2 (Gaussian factor not included):
/// K_I(rho) ~ gauss * M_I rho M_I^dag + O(sqrt(dt)^6).
inline Matrix kraus_operator_eta1(const MeasurementModel& model, double ibar, double dt) {
    model.validate();
    require(model.n_channels() == 1 && model.monitored[0].kind == ChannelKind::Diffusive &&
                model.monitored[0].eta == 1.0 && model.unmonitored.empty(),
            "kraus_operator_eta1: single diffusive channel with eta = 1 required");
    const int d = model.dim;
    const Matrix& l = model.monitored[0].op;
    const Matrix g = Complex(0, -1) * model.hamiltonian - 0.5 * (l.adjoint() * l);
    const double s = std::sqrt(dt);
    const auto h = hermite_all(5, ibar);

    const Matrix l2 = l * l, l3 = l2 * l, l4 = l3 * l, l5 = l4 * l;
    const Matrix gl = g * l + l * g;
    const Matrix gl2 = g * l2 + l * g * l + l2 * g;
    const Matrix g2l = g * g * l + g * l * g + l * g * g;
    const Matrix gl3 = g * l3 + l * g * l2 + l2 * g * l + l3 * g;

    Matrix m = Matrix::Identity(d, d);
    m += s * h[1] * l;
    m += s * s * (g + h[2] / 2.0 * l2);
    m += s * s * s * (h[1] / 2.0 * gl + h[3] / 6.0 * l3);
    m += s * s * s * s * (0.5 * g * g + h[2] / 6.0 * gl2 + h[4] / 24.0 * l4);
    m += s * s * s * s * s * (h[1] / 6.0 * g2l + h[3] / 24.0 * gl3 + h[5] / 120.0 * l5);
    return m;
}

}  // namespace robinet
