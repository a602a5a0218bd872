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

#include "robinet/core/types.hpp"

namespace robinet {

enum class QuadratureKind { GaussHermite, GaussLegendre };

/// Nodes and weights of a Gaussian quadrature rule. Gauss-Hermite carries
/// the weight e^{-u^2} on the real line; Gauss-Legendre is rescaled to
/// [-pi, pi] for the jump-channel Fourier integral.
struct QuadratureRule {
    QuadratureKind kind;
    int n_p = 0;
    std::vector<double> nodes;
    std::vector<double> weights;

    void validate() const {
        require(n_p > 0 && int(nodes.size()) == n_p && int(weights.size()) == n_p,
                "QuadratureRule: inconsistent sizes");
        for (int i = 0; i < n_p; ++i) {
            require(weights[i] > 0.0, "QuadratureRule: weights must be positive");
            if (i > 0) require(nodes[i] > nodes[i - 1], "QuadratureRule: nodes must increase");
        }
    }
};

namespace detail {

/// Golub-Welsch: nodes are eigenvalues of the Jacobi matrix, weights are
/// mu0 * (first eigenvector component)^2.
inline QuadratureRule golub_welsch(QuadratureKind kind, int n,
                                   const std::vector<double>& offdiag, double mu0) {
    Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(n, n);
    for (int k = 0; k + 1 < n; ++k) {
        jac(k, k + 1) = offdiag[k];
        jac(k + 1, k) = offdiag[k];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jac);
    QuadratureRule rule{kind, n, {}, {}};
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        rule.nodes[i] = es.eigenvalues()(i);
        const double v0 = es.eigenvectors()(0, i);
        rule.weights[i] = mu0 * v0 * v0;
    }
    return rule;
}

}  // namespace detail

/// Rule for integrals of the form int e^{-u^2} f(u) du.
inline QuadratureRule gauss_hermite(int n) {
    require(n > 0, "gauss_hermite: n must be positive");
    std::vector<double> off(n - 1);
    for (int k = 1; k < n; ++k) off[k - 1] = std::sqrt(0.5 * k);
    auto rule = detail::golub_welsch(QuadratureKind::GaussHermite, n, off,
                                     std::sqrt(3.14159265358979323846));
    rule.validate();
    return rule;
}

/// Gauss-Hermite rule with the kernel folded into the weights:
/// int f(u) du ~= sum_j w~_j f(u_j) for f with Gaussian decay, where
/// w~_j = w_j e^{u_j^2}. The eigenvector route to w_j loses all relative
/// accuracy in the far tail (w_j ~ e^{-u^2} with absolute eps error), so
/// the modified weights are computed from the Christoffel sum of
/// orthonormal Hermite functions, w~_j = 1 / sum_{k<n} h_k(u_j)^2, with an
/// exponent-tracked recurrence.
inline QuadratureRule gauss_hermite_modified(int n) {
    require(n <= 640,
            "gauss_hermite_modified: rule sizes above 640 are not supported (exponent "
            "tracking validated up to 601 nodes)");
    auto rule = gauss_hermite(n);
    for (int j = 0; j < n; ++j) {
        const double u = rule.nodes[j];
        // h_0 = pi^{-1/4} e^{-u^2/2}, h_{k+1} = u sqrt(2/(k+1)) h_k
        //                                       - sqrt(k/(k+1)) h_{k-1}
        // tracked as mantissa * 2^exponent to survive u^2/2 beyond 700
        double m_prev = 0.0, m_cur;
        long e_prev = 0, e_cur;
        {
            const double log2h0 = -0.5 * u * u / 0.6931471805599453;
            e_cur = long(std::floor(log2h0));
            m_cur = std::pow(3.14159265358979323846, -0.25) * std::exp2(log2h0 - e_cur);
        }
        auto renorm = [](double& m, long& e) {
            if (m == 0.0) return;
            while (std::abs(m) < 1e-150) {
                m *= 0x1p+500;
                e -= 500;
            }
            while (std::abs(m) > 1e+150) {
                m *= 0x1p-500;
                e += 500;
            }
        };
        auto contribution = [](double m, long e) {
            if (e < -1070 || e > 1020) return 0.0;  // |h_k| <= 1 always
            const double h = std::ldexp(m, int(e));
            return h * h;
        };
        double sum = contribution(m_cur, e_cur);
        for (int k = 0; k + 1 < n; ++k) {
            const long de = e_prev - e_cur;
            const double cross =
                std::abs(de) > 900 ? 0.0 : m_prev * std::exp2(double(de));
            double m_next = u * std::sqrt(2.0 / (k + 1)) * m_cur -
                            std::sqrt(double(k) / (k + 1)) * cross;
            long e_next = e_cur;
            renorm(m_next, e_next);
            m_prev = m_cur;
            e_prev = e_cur;
            m_cur = m_next;
            e_cur = e_next;
            sum += contribution(m_cur, e_cur);
        }
        rule.weights[j] = 1.0 / sum;
    }
    rule.validate();
    return rule;
}

/// Rule for integrals over [-pi, pi] (jump channels).
inline QuadratureRule gauss_legendre_pi(int n) {
    require(n > 0, "gauss_legendre_pi: n must be positive");
    std::vector<double> off(n - 1);
    for (int k = 1; k < n; ++k) off[k - 1] = k / std::sqrt(4.0 * k * k - 1.0);
    auto rule = detail::golub_welsch(QuadratureKind::GaussLegendre, n, off, 2.0);
    for (auto& x : rule.nodes) x *= 3.14159265358979323846;
    for (auto& w : rule.weights) w *= 3.14159265358979323846;
    rule.validate();
    return rule;
}

}  // namespace robinet
