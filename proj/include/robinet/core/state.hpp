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

#include <utility>

#include "robinet/core/operators.hpp"
#include "robinet/core/types.hpp"

namespace robinet {

/// Density matrix with its invariants. `normalized == false` marks a linear
/// (unnormalized) state whose trace carries a probability density.
struct QuantumState {
    Matrix rho;
    bool normalized = true;

    QuantumState() = default;
    explicit QuantumState(Matrix m, bool norm = true) : rho(std::move(m)), normalized(norm) {}

    int dim() const { return int(rho.rows()); }
    double trace() const { return rho.trace().real(); }

    /// Throws validation_error on any invariant violation.
    void validate(const Tolerances& tol = default_tolerances()) const {
        require(rho.rows() == rho.cols(), "QuantumState: matrix not square");
        require(rho.allFinite(), "QuantumState: non-finite entries");
        const double scale = std::max(rho.norm(), 1e-300);
        require((rho - rho.adjoint()).norm() <= tol.herm * scale * 10 + tol.herm,
                "QuantumState: not Hermitian within tolerance");
        const double tr = trace();
        if (normalized) {
            require(std::abs(tr - 1.0) <= tol.trace, "QuantumState: trace != 1");
            Eigen::SelfAdjointEigenSolver<Matrix> es(hermitize(rho), Eigen::EigenvaluesOnly);
            require(es.eigenvalues().minCoeff() >= -tol.psd * std::abs(tr),
                    "QuantumState: negative eigenvalue beyond tolerance");
        } else {
            require(tr > 0.0, "QuantumState: unnormalized state must have positive trace");
        }
    }

    bool is_valid(const Tolerances& tol = default_tolerances()) const {
        try {
            validate(tol);
            return true;
        } catch (const validation_error&) {
            return false;
        }
    }
};

/// Hermitize, clip eigenvalues below -tol.psd*trace to zero, renormalize.
/// Returns the repaired state and whether clipping actually fired.
inline std::pair<QuantumState, bool> repair_positivity(
    const Matrix& rho, const Tolerances& tol = default_tolerances()) {
    Matrix h = hermitize(rho);
    const double tr = h.trace().real();
    Eigen::SelfAdjointEigenSolver<Matrix> es(h);
    RealVector ev = es.eigenvalues();
    bool repaired = false;
    if (ev.minCoeff() < -tol.psd * std::abs(tr)) {
        for (int i = 0; i < ev.size(); ++i) ev(i) = std::max(ev(i), 0.0);
        h = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
        repaired = true;
    }
    const double tr2 = h.trace().real();
    require(tr2 > 0, "repair_positivity: nonpositive trace after clipping");
    return {QuantumState(h / tr2, true), repaired};
}

}  // namespace robinet
