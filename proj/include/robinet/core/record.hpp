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

#include "robinet/core/model.hpp"
#include "robinet/core/types.hpp"

namespace robinet {

/// Digitized measurement record: per-bin, per-channel time-averaged values.
/// Diffusive channels carry reals, jump channels nonnegative integer counts
/// (stored as doubles, validated on demand).
struct DigitizedRecord {
    double dt = 0.0;
    std::vector<ChannelKind> channels;
    std::vector<std::vector<double>> values;  // [bin][channel]

    int n_bins() const { return int(values.size()); }
    int n_channels() const { return int(channels.size()); }

    double operator()(int bin, int channel) const { return values[bin][channel]; }

    void validate() const {
        require(dt > 0.0, "DigitizedRecord: dt must be positive");
        for (const auto& row : values) {
            require(int(row.size()) == n_channels(), "DigitizedRecord: ragged row");
            for (std::size_t c = 0; c < row.size(); ++c) {
                require(std::isfinite(row[c]), "DigitizedRecord: non-finite value");
                if (channels[c] == ChannelKind::Jump)
                    require(row[c] >= 0.0 && row[c] == std::floor(row[c]),
                            "DigitizedRecord: jump counts must be nonnegative integers");
            }
        }
    }

    bool compatible_with(const MeasurementModel& model) const {
        if (int(channels.size()) != model.n_channels()) return false;
        for (int c = 0; c < n_channels(); ++c)
            if (channels[c] != model.monitored[c].kind) return false;
        return true;
    }
};

}  // namespace robinet
