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
#include <cstdint>

namespace robinet {

/// Philox-4x32-10 counter-based generator. Streams are addressed by
/// (seed, stream) and advance a 64-bit draw counter, so trajectory
/// ensembles are reproducible independently of thread scheduling.
class PhiloxStream {
  public:
    PhiloxStream(std::uint64_t seed, std::uint64_t stream)
        : key0_(std::uint32_t(seed)), key1_(std::uint32_t(seed >> 32)),
          stream_lo_(std::uint32_t(stream)), stream_hi_(std::uint32_t(stream >> 32)) {}

    /// Uniform double in (0, 1).
    double uniform() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        std::uint32_t c[4] = {std::uint32_t(counter_), std::uint32_t(counter_ >> 32),
                              stream_lo_, stream_hi_};
        ++counter_;
        block(c);
        const double u0 = to_unit(std::uint64_t(c[0]) | (std::uint64_t(c[1]) << 32));
        spare_ = to_unit(std::uint64_t(c[2]) | (std::uint64_t(c[3]) << 32));
        have_spare_ = true;
        return u0;
    }

    /// Standard normal via Box-Muller; consumes uniforms pairwise.
    double normal() {
        if (have_normal_) {
            have_normal_ = false;
            return spare_normal_;
        }
        const double u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        spare_normal_ = r * std::sin(a);
        have_normal_ = true;
        return r * std::cos(a);
    }

    double normal(double mean, double stddev) { return mean + stddev * normal(); }

    std::uint64_t draws() const { return counter_; }

  private:
    static std::uint32_t mulhi(std::uint32_t a, std::uint32_t b, std::uint32_t& lo) {
        const std::uint64_t p = std::uint64_t(a) * b;
        lo = std::uint32_t(p);
        return std::uint32_t(p >> 32);
    }

    void block(std::uint32_t c[4]) const {
        std::uint32_t k0 = key0_, k1 = key1_;
        for (int round = 0; round < 10; ++round) {
            std::uint32_t lo0, lo1;
            const std::uint32_t hi0 = mulhi(0xD2511F53u, c[0], lo0);
            const std::uint32_t hi1 = mulhi(0xCD9E8D57u, c[2], lo1);
            const std::uint32_t n0 = hi1 ^ c[1] ^ k0;
            const std::uint32_t n1 = lo1;
            const std::uint32_t n2 = hi0 ^ c[3] ^ k1;
            const std::uint32_t n3 = lo0;
            c[0] = n0; c[1] = n1; c[2] = n2; c[3] = n3;
            k0 += 0x9E3779B9u;
            k1 += 0xBB67AE85u;
        }
    }

    static double to_unit(std::uint64_t bits) {
        // 53-bit mantissa, strictly inside (0,1) for Box-Muller's log
        return (double(bits >> 11) + 0.5) * (1.0 / 9007199254740992.0);
    }

    std::uint32_t key0_, key1_, stream_lo_, stream_hi_;
    std::uint64_t counter_ = 0;
    bool have_spare_ = false;
    double spare_ = 0.0;
    bool have_normal_ = false;
    double spare_normal_ = 0.0;
};

}  // namespace robinet
