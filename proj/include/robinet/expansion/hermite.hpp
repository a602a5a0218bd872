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

#include <vector>

#include "robinet/core/types.hpp"

namespace robinet {

/// Probabilist Hermite polynomial H_k(x) by the stable three-term
/// recurrence H_{k+1} = x H_k - k H_{k-1}.
inline double hermite(int k, double x) {
    require(k >= 0 && k <= 64, "hermite: order must be in [0, 64]");
    double hm = 1.0;          // H_0
    if (k == 0) return hm;
    double h = x;             // H_1
    for (int n = 1; n < k; ++n) {
        const double hp = x * h - n * hm;
        hm = h;
        h = hp;
    }
    return h;
}

/// H_0(x) ... H_kmax(x) in one sweep.
inline std::vector<double> hermite_all(int kmax, double x) {
    require(kmax >= 0 && kmax <= 64, "hermite_all: order must be in [0, 64]");
    std::vector<double> h(kmax + 1);
    h[0] = 1.0;
    if (kmax >= 1) h[1] = x;
    for (int n = 1; n < kmax; ++n) h[n + 1] = x * h[n] - n * h[n - 1];
    return h;
}

/// Monomial coefficients of H_0..H_kmax: row k holds c with
/// H_k(x) = sum_j c[j] x^j. Exact in double up to the supported orders.
inline std::vector<std::vector<double>> hermite_coefficients(int kmax) {
    require(kmax >= 0 && kmax <= 64, "hermite_coefficients: order must be in [0, 64]");
    std::vector<std::vector<double>> c(kmax + 1);
    c[0] = {1.0};
    if (kmax >= 1) c[1] = {0.0, 1.0};
    for (int n = 1; n < kmax; ++n) {
        std::vector<double> next(n + 2, 0.0);
        for (int j = 0; j <= n; ++j) next[j + 1] += c[n][j];          // x H_n
        for (int j = 0; j < n; ++j) next[j] -= double(n) * c[n - 1][j];  // -n H_{n-1}
        c[n + 1] = std::move(next);
    }
    return c;
}

}  // namespace robinet
