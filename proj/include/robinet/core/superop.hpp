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

#include <unsupported/Eigen/KroneckerProduct>

#include "robinet/core/model.hpp"
#include "robinet/core/operators.hpp"
#include "robinet/core/state.hpp"

namespace robinet {

/// d^2 x d^2 matrix acting on column-stacked vectorized states.
struct Superoperator {
    Matrix mat;  // d^2 x d^2
    int dim = 0;

    Superoperator() = default;
    Superoperator(Matrix m, int d) : mat(std::move(m)), dim(d) {
        require(mat.rows() == Eigen::Index(d) * d && mat.cols() == mat.rows(),
                "Superoperator: matrix must be d^2 x d^2");
    }

    static Superoperator zero(int d) { return {Matrix::Zero(d * d, d * d), d}; }
    static Superoperator identity(int d) { return {Matrix::Identity(d * d, d * d), d}; }

    Matrix apply(const Matrix& rho) const {
        require(rho.rows() == dim && rho.cols() == dim, "Superoperator: state dimension mismatch");
        return unvectorize(mat * vectorize(rho), dim);
    }

    Superoperator& operator+=(const Superoperator& o) { mat += o.mat; return *this; }
    Superoperator& operator-=(const Superoperator& o) { mat -= o.mat; return *this; }
    Superoperator& operator*=(Complex c) { mat *= c; return *this; }
    friend Superoperator operator+(Superoperator a, const Superoperator& b) { a += b; return a; }
    friend Superoperator operator-(Superoperator a, const Superoperator& b) { a -= b; return a; }
    friend Superoperator operator*(Complex c, Superoperator s) { s *= c; return s; }
    /// Composition: (a*b)(rho) = a(b(rho)).
    friend Superoperator operator*(const Superoperator& a, const Superoperator& b) {
        require(a.dim == b.dim, "Superoperator: dimension mismatch");
        return {a.mat * b.mat, a.dim};
    }
};

/// rho -> A rho
inline Matrix left_mult(const Matrix& a) {
    const int d = int(a.rows());
    return Eigen::kroneckerProduct(Matrix::Identity(d, d), a);
}
/// rho -> rho B
inline Matrix right_mult(const Matrix& b) {
    const int d = int(b.rows());
    return Eigen::kroneckerProduct(b.transpose(), Matrix::Identity(d, d));
}
/// rho -> A rho B
inline Matrix sandwich(const Matrix& a, const Matrix& b) {
    return Eigen::kroneckerProduct(b.transpose(), a);
}

/// Dissipator D[L](rho) = L rho L^dag - {L^dag L, rho}/2 as a matrix.
inline Matrix dissipator_matrix(const Matrix& l) {
    const Matrix ldl = l.adjoint() * l;
    return sandwich(l, l.adjoint()) - 0.5 * left_mult(ldl) - 0.5 * right_mult(ldl);
}

/// Lindblad generator: -i[H, rho] + sum of dissipators over every jump
/// operator, monitored or not. Trace-annihilating by construction.
inline Superoperator build_liouvillian(const MeasurementModel& model) {
    model.validate();
    const int d = model.dim;
    Matrix m = Complex(0, -1) * (left_mult(model.hamiltonian) - right_mult(model.hamiltonian));
    for (const auto& ch : model.monitored) m += dissipator_matrix(ch.op);
    for (const auto& l : model.unmonitored) m += dissipator_matrix(l);
    return {std::move(m), d};
}

/// Measurement superoperator of one channel:
///   diffusive: C(rho) = sqrt(eta) (L rho + rho L^dag)
///   jump:      C(rho) = theta rho + eta L rho L^dag
inline Superoperator build_measurement_superop(const Channel& ch) {
    ch.validate();
    const int d = int(ch.op.rows());
    if (ch.kind == ChannelKind::Diffusive) {
        const double s = std::sqrt(ch.eta);
        return {s * (left_mult(ch.op) + right_mult(ch.op.adjoint())), d};
    }
    Matrix m = ch.dark_rate * Matrix::Identity(d * d, d * d);
    m += ch.eta * sandwich(ch.op, ch.op.adjoint());
    return {std::move(m), d};
}

/// Generalized tilted generator at Fourier variables p (one per monitored
/// channel):
///   L  -  sum_diffusive (i p C + p^2/2 Id)  +  sum_jump (e^{-ip} - 1) C.
inline Superoperator tilted_generator(const MeasurementModel& model,
                                      const std::vector<double>& p) {
    require(int(p.size()) == model.n_channels(),
            "tilted_generator: one tilt per monitored channel required");
    Superoperator gen = build_liouvillian(model);
    const int dd = model.dim * model.dim;
    for (std::size_t c = 0; c < p.size(); ++c) {
        const Superoperator meas = build_measurement_superop(model.monitored[c]);
        if (model.monitored[c].kind == ChannelKind::Diffusive) {
            gen.mat -= Complex(0, p[c]) * meas.mat;
            gen.mat -= 0.5 * p[c] * p[c] * Matrix::Identity(dd, dd);
        } else {
            gen.mat += (std::exp(Complex(0, -p[c])) - 1.0) * meas.mat;
        }
    }
    return gen;
}

}  // namespace robinet
