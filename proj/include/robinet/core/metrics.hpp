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

#include "robinet/core/state.hpp"

namespace robinet {

/// Trace norm (sum of singular values); for Hermitian input this is the
/// sum of absolute eigenvalues.
inline double trace_norm(const Matrix& m) {
    if ((m - m.adjoint()).norm() <= 1e-12 * std::max(m.norm(), 1e-300)) {
        Eigen::SelfAdjointEigenSolver<Matrix> es(hermitize(m), Eigen::EigenvaluesOnly);
        return es.eigenvalues().cwiseAbs().sum();
    }
    Eigen::JacobiSVD<Matrix> svd(m);
    return svd.singularValues().sum();
}

inline double trace_distance(const Matrix& rho, const Matrix& sigma) {
    return 0.5 * trace_norm(rho - sigma);
}
inline double trace_distance(const QuantumState& a, const QuantumState& b) {
    return trace_distance(a.rho, b.rho);
}

/// PSD square root via eigendecomposition; small negative eigenvalues
/// (tolerance-level) are clipped.
inline Matrix sqrtm_psd(const Matrix& m) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(hermitize(m));
    RealVector ev = es.eigenvalues();
    for (int i = 0; i < ev.size(); ++i) ev(i) = std::sqrt(std::max(ev(i), 0.0));
    return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
}

/// Uhlmann fidelity F(rho, sigma) = (Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2.
inline double uhlmann_fidelity(const QuantumState& rho, const QuantumState& sigma,
                               const Tolerances& tol = default_tolerances()) {
    require(rho.dim() == sigma.dim(), "uhlmann_fidelity: dimension mismatch");
    for (const auto* s : {&rho, &sigma}) {
        Eigen::SelfAdjointEigenSolver<Matrix> es(hermitize(s->rho), Eigen::EigenvaluesOnly);
        if (es.eigenvalues().minCoeff() < -tol.psd * std::abs(s->trace()) * 10)
            throw validation_error("uhlmann_fidelity: input not PSD within tolerance");
    }
    const Matrix sr = sqrtm_psd(rho.rho);
    Eigen::SelfAdjointEigenSolver<Matrix> es(hermitize(sr * sigma.rho * sr), Eigen::EigenvaluesOnly);
    double acc = 0.0;
    for (int i = 0; i < es.eigenvalues().size(); ++i)
        acc += std::sqrt(std::max(es.eigenvalues()(i), 0.0));
    return std::min(acc * acc, 1.0 + 1e-9);
}

inline double purity(const Matrix& rho) { return (rho * rho).trace().real(); }

}  // namespace robinet
