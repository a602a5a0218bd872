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

#include "robinet/core/types.hpp"

namespace robinet {

// Basis convention: index 0 is the sigma_z = +1 (excited) level of a qubit;
// sigma_minus maps index 0 to index 1. Bosonic modes use number states
// |0>,...,|d-1> with a|n> = sqrt(n)|n-1>.

inline Matrix sigma_x() { Matrix m(2, 2); m << 0, 1, 1, 0; return m; }
inline Matrix sigma_y() { Matrix m(2, 2); m << 0, Complex(0, -1), Complex(0, 1), 0; return m; }
inline Matrix sigma_z() { Matrix m(2, 2); m << 1, 0, 0, -1; return m; }
inline Matrix sigma_minus() { Matrix m(2, 2); m << 0, 0, 1, 0; return m; }
inline Matrix sigma_plus() { Matrix m(2, 2); m << 0, 1, 0, 0; return m; }

inline Matrix annihilation(int dim) {
    Matrix a = Matrix::Zero(dim, dim);
    for (int n = 1; n < dim; ++n) a(n - 1, n) = std::sqrt(double(n));
    return a;
}
inline Matrix creation(int dim) { return annihilation(dim).adjoint(); }
inline Matrix number_op(int dim) {
    Matrix n = Matrix::Zero(dim, dim);
    for (int k = 0; k < dim; ++k) n(k, k) = double(k);
    return n;
}

inline Matrix hermitize(const Matrix& m) { return 0.5 * (m + m.adjoint()); }

/// vec(rho) with column stacking: vec(A rho B) = (B^T kron A) vec(rho).
/// Fixed convention; superoperator matrices are exchanged across modules.
inline CVector vectorize(const Matrix& rho) {
    return Eigen::Map<const CVector>(rho.data(), rho.size());
}
inline Matrix unvectorize(const CVector& v, int dim) {
    return Eigen::Map<const Matrix>(v.data(), dim, dim);
}

/// |n><n| in a dim-level system.
inline Matrix fock_state(int dim, int n) {
    require(n >= 0 && n < dim, "fock_state: level out of range");
    Matrix rho = Matrix::Zero(dim, dim);
    rho(n, n) = 1.0;
    return rho;
}

/// Truncated coherent state |alpha><alpha|, renormalized on the cutoff.
inline Matrix coherent_state(int dim, Complex alpha) {
    CVector c(dim);
    c(0) = 1.0;
    for (int n = 1; n < dim; ++n) c(n) = c(n - 1) * alpha / std::sqrt(double(n));
    c /= c.norm();
    return c * c.adjoint();
}

/// Smallest Fock cutoff N with coherent tail mass below `tail`, plus guard levels.
inline int coherent_cutoff(double alpha_abs, double tail = 1e-8, int guard = 4) {
    const double lam = alpha_abs * alpha_abs;
    double term = std::exp(-lam);
    double cum = term;
    int n = 0;
    while (1.0 - cum >= tail && n < 4096) {
        ++n;
        term *= lam / n;
        cum += term;
    }
    return n + guard + 1;  // dimension = highest level + 1
}

inline double qubit_excited_population(const Matrix& rho) { return rho(0, 0).real(); }

}  // namespace robinet
