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

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace robinet {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;      // dense complex operator, d x d
using CVector = Eigen::VectorXcd;     // vectorized state, d^2
using RealVector = Eigen::VectorXd;

/// Numerical tolerances shared across the library. All configurable;
/// defaults sized for double precision over thousands of filter steps.
struct Tolerances {
    double herm = 1e-10;   // Hermiticity violation, relative to norm
    double trace = 1e-9;   // unit-trace violation for normalized states
    double psd = 1e-8;     // admissible negative eigenvalue, relative to trace
    double expm = 1e-10;   // relative accuracy of exponential propagation
};

inline const Tolerances& default_tolerances() {
    static const Tolerances tol{};
    return tol;
}

/// Invalid input: bad dimensions, broken invariants, malformed config.
struct validation_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Numerical failure at runtime: nonpositive density, non-convergence,
/// divergence. Carries enough context to locate the failing step.
struct numerical_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw validation_error(msg);
}

}  // namespace robinet
