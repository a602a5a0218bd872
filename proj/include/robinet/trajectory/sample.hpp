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
#include <vector>

#include "robinet/expansion/perturbative.hpp"
#include "robinet/instrument/exact_map.hpp"
#include "robinet/trajectory/simulate.hpp"

namespace robinet {

enum class SamplerMethod { QuadratureCDF, PerturbativePolynomial };

struct SamplerConfig {
    double k_sigma = 6.0;        // grid half-width multiplier, >= 4
    int n_grid = 512;            // >= 128
    SamplerMethod method = SamplerMethod::QuadratureCDF;
    int expansion_order = 8;     // PerturbativePolynomial only
    int n_p = 31;                // instrument nodes used for state updates

    void validate() const {
        require(k_sigma >= 4.0, "SamplerConfig: k_sigma must be >= 4");
        require(n_grid >= 128, "SamplerConfig: n_grid must be >= 128");
    }
};

struct CoarseSampleResult {
    DigitizedRecord record;
    FilterOutput filter;
    int envelope_violations = 0;  // PerturbativePolynomial only
};

namespace detail {

/// Inverse-CDF draw from tabulated nonnegative densities on a uniform grid
/// (piecewise-linear CDF).
inline double draw_inverse_cdf(const std::vector<double>& grid, std::vector<double> dens,
                               double u) {
    double total = 0.0;
    for (auto& d : dens) {
        d = std::max(d, 0.0);
        total += d;
    }
    require(total > 0, "sample_coarse: density vanished on the whole grid");
    double target = u * total;
    for (std::size_t i = 0; i < dens.size(); ++i) {
        if (target <= dens[i] || i + 1 == dens.size()) {
            const double frac = dens[i] > 0 ? target / dens[i] : 0.5;
            const double cell = grid.size() > 1 ? grid[1] - grid[0] : 0.0;
            return grid[i] - 0.5 * cell + frac * cell;
        }
        target -= dens[i];
    }
    return grid.back();
}

}  // namespace detail

/// Draws a coarse record bin by bin from p(I) = Tr[K_I(rho_bar)] and
/// advances the robinet state with filter_step. Single diffusive channel.
///
/// QuadratureCDF tabulates the exact density on a grid spanning
/// mean +- k_sigma sqrt(dt) (1 + |Tr C(rho)| sqrt(dt)), clipped to the
/// quadrature validity window, and inverts the piecewise-linear CDF.
/// PerturbativePolynomial rejection-samples the polynomial-times-Gaussian
/// density with a widened Gaussian envelope, auto-widening on violation.
inline CoarseSampleResult sample_coarse(const MeasurementModel& model, const QuantumState& rho0,
                                        int n_bins, double dt, std::uint64_t seed,
                                        const SamplerConfig& cfg, std::uint64_t stream = 0) {
    cfg.validate();
    model.validate();
    require(n_bins >= 0, "sample_coarse: n_bins must be >= 0");
    require(model.n_channels() == 1 && model.monitored[0].kind == ChannelKind::Diffusive,
            "sample_coarse: single diffusive channel required");

    const Superoperator meas = build_measurement_superop(model.monitored[0]);
    const InstrumentCache cache = make_instrument_cache(model, dt, cfg.n_p);
    PhiloxStream rng(seed, stream);

    CoarseSampleResult out;
    out.record.dt = dt;
    out.record.channels = {ChannelKind::Diffusive};

    QuantumState state = rho0;
    for (int k = 0; k < n_bins; ++k) {
        double value = 0.0;
        if (cfg.method == SamplerMethod::QuadratureCDF) {
            const double drift = meas.apply(state.rho).trace().real();
            const SignalMoments mom = signal_moments(model, state, dt);
            double half = cfg.k_sigma * std::sqrt(dt) * (1.0 + std::abs(drift) * std::sqrt(dt));
            half = std::min(half, cache.validity_halfwidth(0));
            half = std::max(half, 4.0 * std::sqrt(mom.var));
            std::vector<double> grid(cfg.n_grid);
            for (int i = 0; i < cfg.n_grid; ++i)
                grid[i] = mom.mean - half + 2.0 * half * i / (cfg.n_grid - 1);
            const auto dens = signal_density_grid(cache, state, grid);
            value = detail::draw_inverse_cdf(grid, dens, rng.uniform());
        } else {
            const auto alpha = density_polynomial(model, state, dt, cfg.expansion_order);
            // moments of the polynomial-times-Gaussian in Ibar units
            double mean = 0.0, second = 0.0;
            {
                // E[Z^k] of the standard normal: 0 odd, (k-1)!! even
                std::vector<double> mom(alpha.size() + 2, 0.0);
                mom[0] = 1.0;
                for (std::size_t j = 2; j < mom.size(); j += 2) mom[j] = mom[j - 2] * double(j - 1);
                for (std::size_t j = 0; j < alpha.size(); ++j) {
                    mean += alpha[j] * mom[j + 1];
                    second += alpha[j] * mom[j + 2];
                }
            }
            const double sigma_env = 1.5 * std::sqrt(std::max(second - mean * mean, 0.25));
            double widen = 1.0;
            auto poly_density = [&](double x) {
                double p = 0.0, xn = 1.0;
                for (double a : alpha) {
                    p += a * xn;
                    xn *= x;
                }
                return std::max(p, 0.0) * std::exp(-0.5 * x * x);
            };
            for (;;) {
                // envelope bound from a coarse scan of the ratio
                double c = 0.0;
                const double w = sigma_env * widen;
                for (int i = 0; i <= 64; ++i) {
                    const double x = mean - 6 * w + 12.0 * w * i / 64;
                    const double env =
                        std::exp(-0.5 * (x - mean) * (x - mean) / (w * w));
                    c = std::max(c, poly_density(x) / std::max(env, 1e-300));
                }
                c *= 1.1;
                bool accepted = false;
                for (int attempt = 0; attempt < 10000 && !accepted; ++attempt) {
                    const double x = rng.normal(mean, w);
                    const double env = std::exp(-0.5 * (x - mean) * (x - mean) / (w * w));
                    const double f = poly_density(x);
                    if (f > c * env) {  // envelope violated between scan points
                        ++out.envelope_violations;
                        break;
                    }
                    if (rng.uniform() * c * env <= f) {
                        value = x * std::sqrt(dt);
                        accepted = true;
                    }
                }
                if (accepted) break;
                widen *= 1.5;  // widen and retry, logged through the violation counter
            }
        }

        auto step = filter_step(cache, state, value);
        out.record.values.push_back({value});
        out.filter.states.push_back(step.state);
        out.filter.densities.push_back(step.density);
        out.filter.log_likelihood += std::log(step.density);
        out.filter.repairs += step.repaired ? 1 : 0;
        state = step.state;
    }
    return out;
}

}  // namespace robinet
