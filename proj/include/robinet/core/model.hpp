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

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <string>
#include <vector>

#include "robinet/core/operators.hpp"
#include "robinet/core/types.hpp"

namespace robinet {

enum class ChannelKind { Diffusive, Jump };

inline const char* to_string(ChannelKind k) {
    return k == ChannelKind::Diffusive ? "diffusive" : "jump";
}

/// One monitored channel: jump operator, efficiency, detection type,
/// dark-count rate (jump detectors only).
struct Channel {
    Matrix op;                 // L
    double eta = 1.0;          // efficiency in [0,1]
    ChannelKind kind = ChannelKind::Diffusive;
    double dark_rate = 0.0;    // theta >= 0, Jump only

    void validate() const {
        require(op.rows() == op.cols(), "Channel: operator not square");
        require(op.allFinite(), "Channel: non-finite operator entries");
        require(eta >= 0.0 && eta <= 1.0, "Channel: eta must be in [0,1]");
        require(dark_rate >= 0.0, "Channel: dark_rate must be >= 0");
        require(kind == ChannelKind::Jump || dark_rate == 0.0,
                "Channel: dark_rate only meaningful for jump channels");
    }
};

/// Hamiltonian (angular-frequency units), monitored channels, and extra
/// unmonitored dissipators. Time is dimensionless in the core; the CLI
/// layer converts physical units through a declared time scale.
struct MeasurementModel {
    int dim = 0;
    Matrix hamiltonian;
    std::vector<Channel> monitored;
    std::vector<Matrix> unmonitored;

    void validate(const Tolerances& tol = default_tolerances()) const {
        require(dim > 0, "MeasurementModel: dim must be positive");
        require(hamiltonian.rows() == dim && hamiltonian.cols() == dim,
                "MeasurementModel: Hamiltonian dimension mismatch");
        const double scale = std::max(hamiltonian.norm(), 1.0);
        require((hamiltonian - hamiltonian.adjoint()).norm() <= tol.herm * scale * 10,
                "MeasurementModel: Hamiltonian not Hermitian within tolerance");
        for (const auto& ch : monitored) {
            ch.validate();
            require(ch.op.rows() == dim, "MeasurementModel: channel dimension mismatch");
        }
        for (const auto& l : unmonitored)
            require(l.rows() == dim && l.cols() == dim,
                    "MeasurementModel: unmonitored operator dimension mismatch");
    }

    int n_channels() const { return int(monitored.size()); }
    int n_diffusive() const {
        int n = 0;
        for (const auto& c : monitored) n += (c.kind == ChannelKind::Diffusive);
        return n;
    }
};

namespace detail {

inline void fnv_mix(std::uint64_t& h, const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ull;
    }
}
inline void fnv_double(std::uint64_t& h, double x) {
    std::uint64_t bits;
    std::memcpy(&bits, &x, sizeof bits);
    fnv_mix(h, &bits, sizeof bits);
}
inline void fnv_matrix(std::uint64_t& h, const Matrix& m) {
    std::int64_t r = m.rows(), c = m.cols();
    fnv_mix(h, &r, sizeof r);
    fnv_mix(h, &c, sizeof c);
    for (Eigen::Index j = 0; j < m.cols(); ++j)
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            fnv_double(h, m(i, j).real());
            fnv_double(h, m(i, j).imag());
        }
}

}  // namespace detail

/// FNV-1a fingerprint of the full model; keys instrument caches and
/// record-file provenance.
inline std::uint64_t model_fingerprint(const MeasurementModel& m) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    std::int64_t d = m.dim;
    detail::fnv_mix(h, &d, sizeof d);
    detail::fnv_matrix(h, m.hamiltonian);
    for (const auto& ch : m.monitored) {
        int kind = int(ch.kind);
        detail::fnv_mix(h, &kind, sizeof kind);
        detail::fnv_double(h, ch.eta);
        detail::fnv_double(h, ch.dark_rate);
        detail::fnv_matrix(h, ch.op);
    }
    for (const auto& l : m.unmonitored) detail::fnv_matrix(h, l);
    return h;
}

inline std::string fingerprint_hex(std::uint64_t fp) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fp));
    return std::string(buf);
}

}  // namespace robinet
