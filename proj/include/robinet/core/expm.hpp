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
#include <functional>

#include <unsupported/Eigen/MatrixFunctions>

#include "robinet/core/superop.hpp"

namespace robinet {

/// Dimension threshold: superoperators up to 1024 x 1024 (d <= 32) use the
/// dense scaling-and-squaring exponential; larger systems evaluate the
/// action only.
inline constexpr int kDenseSuperopLimit = 1024;

inline Matrix expm_dense(const Matrix& gen, double t) {
    return (t * gen).exp();
}

/// w = e^{t A} v via scaled Taylor summation. `apply` evaluates A on a
/// matrix; `norm_bound` is any upper bound on the operator norm of A.
/// Throws numerical_error (with achieved residual) on non-convergence.
inline Matrix expm_action(const std::function<Matrix(const Matrix&)>& apply,
                          double norm_bound, double t, const Matrix& v,
                          double tol = default_tolerances().expm) {
    if (t == 0.0) return v;
    const double theta = 1.0;  // target norm per Taylor segment
    const int segments = std::max(1, int(std::ceil(std::abs(t) * norm_bound / theta)));
    const double tau = t / segments;
    const int max_terms = 64;

    Matrix w = v;
    for (int s = 0; s < segments; ++s) {
        Matrix term = w;
        Matrix acc = w;
        double resid = 1.0;
        int k = 1;
        for (; k <= max_terms; ++k) {
            term = (tau / double(k)) * apply(term);
            acc += term;
            resid = term.norm() / std::max(acc.norm(), 1e-300);
            if (resid < tol * 0.1) break;
        }
        if (k > max_terms)
            throw numerical_error("expm_action: Taylor series did not converge, residual " +
                                  std::to_string(resid));
        w = acc;
    }
    return w;
}

/// Matrix-free action of a (tilted) Lindblad-type generator:
///   rho -> Heff rho + rho Heff^dag + sum_l L rho L^dag + sum_c coef_c C_c(rho)
/// with Heff = -iH - (1/2) sum L^dag L over all jump operators.
struct GeneratorAction {
    Matrix heff;
    std::vector<Matrix> lindblad_ops;   // full-strength jump operators
    std::vector<Matrix> channel_ops;    // monitored ops for tilt terms
    std::vector<double> channel_eta;
    std::vector<ChannelKind> channel_kind;
    std::vector<double> channel_theta;
    std::vector<Complex> tilt;          // coefficient of C_c in the generator
    double ident_coef = 0.0;            // multiple of the identity superoperator
    double norm_bound = 0.0;

    static GeneratorAction make(const MeasurementModel& model, std::vector<Complex> tilt_coefs) {
        require(int(tilt_coefs.size()) == model.n_channels(),
                "GeneratorAction: one tilt coefficient per channel");
        GeneratorAction g;
        const int d = model.dim;
        Matrix ldl_sum = Matrix::Zero(d, d);
        for (const auto& ch : model.monitored) {
            g.lindblad_ops.push_back(ch.op);
            ldl_sum += ch.op.adjoint() * ch.op;
            g.channel_ops.push_back(ch.op);
            g.channel_eta.push_back(ch.eta);
            g.channel_kind.push_back(ch.kind);
            g.channel_theta.push_back(ch.dark_rate);
        }
        for (const auto& l : model.unmonitored) {
            g.lindblad_ops.push_back(l);
            ldl_sum += l.adjoint() * l;
        }
        g.heff = Complex(0, -1) * model.hamiltonian - 0.5 * ldl_sum;
        g.tilt = std::move(tilt_coefs);

        double nb = 2.0 * g.heff.cwiseAbs().colwise().sum().maxCoeff();
        for (const auto& l : g.lindblad_ops) {
            const double n1 = l.cwiseAbs().colwise().sum().maxCoeff();
            const double ninf = l.cwiseAbs().rowwise().sum().maxCoeff();
            nb += n1 * ninf;
        }
        for (std::size_t c = 0; c < g.tilt.size(); ++c) {
            const Matrix& l = g.channel_ops[c];
            const double n1 = l.cwiseAbs().colwise().sum().maxCoeff();
            const double ninf = l.cwiseAbs().rowwise().sum().maxCoeff();
            if (g.channel_kind[c] == ChannelKind::Diffusive)
                nb += std::abs(g.tilt[c]) * 2.0 * std::sqrt(g.channel_eta[c]) * std::max(n1, ninf);
            else
                nb += std::abs(g.tilt[c]) * (g.channel_theta[c] + g.channel_eta[c] * n1 * ninf);
        }
        g.norm_bound = nb;
        return g;
    }

    Matrix operator()(const Matrix& rho) const {
        Matrix out = heff * rho + rho * heff.adjoint();
        if (ident_coef != 0.0) out += ident_coef * rho;
        for (const auto& l : lindblad_ops) out += l * rho * l.adjoint();
        for (std::size_t c = 0; c < tilt.size(); ++c) {
            if (tilt[c] == Complex(0, 0)) continue;
            if (channel_kind[c] == ChannelKind::Diffusive) {
                const double s = std::sqrt(channel_eta[c]);
                out += tilt[c] * (s * (channel_ops[c] * rho + rho * channel_ops[c].adjoint()));
            } else {
                out += tilt[c] * (channel_theta[c] * rho +
                                  channel_eta[c] * (channel_ops[c] * rho * channel_ops[c].adjoint()));
            }
        }
        return out;
    }
};

/// e^{t gen}(rho). Dense matrix exponential below kDenseSuperopLimit,
/// action-only Taylor evaluation above (or on request).
inline QuantumState expm_apply(const Superoperator& gen, const QuantumState& state, double t,
                               double tol = default_tolerances().expm,
                               bool force_action = false) {
    require(t >= 0.0, "expm_apply: t must be >= 0");
    require(gen.dim == state.dim(), "expm_apply: dimension mismatch");
    if (t == 0.0) return state;
    const bool dense = !force_action && gen.mat.rows() <= kDenseSuperopLimit;
    if (dense) {
        Matrix p = expm_dense(gen.mat, t);
        return QuantumState(unvectorize(p * vectorize(state.rho), gen.dim), false);
    }
    const double nb = gen.mat.cwiseAbs().colwise().sum().maxCoeff();
    const int d = gen.dim;
    auto apply = [&gen, d](const Matrix& rho) { return unvectorize(gen.mat * vectorize(rho), d); };
    return QuantumState(expm_action(apply, nb, t, state.rho, tol), false);
}

}  // namespace robinet
