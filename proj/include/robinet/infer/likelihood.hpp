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
#include <functional>
#include <numeric>
#include <string>
#include <vector>

#include "robinet/bench/reconstruction.hpp"
#include "robinet/core/rng.hpp"
#include "robinet/instrument/exact_map.hpp"

namespace robinet {

enum class LikelihoodMethod { Robinet, Kraus1, Euler };

inline const char* to_string(LikelihoodMethod m) {
    switch (m) {
        case LikelihoodMethod::Robinet: return "robinet";
        case LikelihoodMethod::Kraus1: return "kraus1";
        default: return "euler";
    }
}

/// Log-likelihood of one record. Robinet uses the exact per-step densities;
/// kraus1 the CPTP order-2 instrument's density; Euler the Gaussian
/// innovation density N(I; Tr[C rho] dt, dt) of the Euler-Maruyama
/// discretization. Throws numerical_error (record position included) on a
/// nonpositive density.
inline double log_likelihood_single(const DigitizedRecord& record, const MeasurementModel& model,
                                    const QuantumState& rho0, LikelihoodMethod method,
                                    const InstrumentCache* cache = nullptr) {
    require(record.compatible_with(model), "log_likelihood: record does not match model");
    if (method == LikelihoodMethod::Robinet) {
        require(cache != nullptr, "log_likelihood: Robinet needs an instrument cache");
        const FilterOutput out = run_filter(*cache, record, rho0);
        if (out.failed_step)
            throw numerical_error("log_likelihood: nonpositive density at step " +
                                  std::to_string(*out.failed_step));
        return out.log_likelihood;
    }
    if (method == LikelihoodMethod::Kraus1) {
        const Kraus1Scheme scheme = Kraus1Scheme::make(model, record.dt);
        Matrix rho = rho0.rho;
        double ll = 0.0;
        for (int k = 0; k < record.n_bins(); ++k) {
            auto [next, tr] = scheme.step(rho, record.values[k][0]);
            if (!(tr > 0))
                throw numerical_error("log_likelihood: nonpositive kraus1 density at step " +
                                      std::to_string(k));
            ll += scheme.log_density(record.values[k][0], tr);
            rho = repair_positivity(next).first.rho;
        }
        return ll;
    }
    // Euler innovation density
    const Channel& ch = detail::single_diffusive_channel(model);
    const Superoperator liou = build_liouvillian(model);
    const double sq = std::sqrt(ch.eta);
    const double dt = record.dt;
    const double lg = -0.5 * std::log(2.0 * 3.14159265358979323846 * dt);
    Matrix rho = rho0.rho;
    double ll = 0.0;
    for (int k = 0; k < record.n_bins(); ++k) {
        const double i_k = record.values[k][0];
        const double drift = sq * (ch.op * rho + rho * ch.op.adjoint()).trace().real();
        ll += lg - 0.5 * (i_k - drift * dt) * (i_k - drift * dt) / dt;
        const double dw = i_k - drift * dt;
        Matrix next = rho + dt * liou.apply(rho) +
                      dw * (sq * (ch.op * rho + rho * ch.op.adjoint()) - drift * rho);
        const double tr = next.trace().real();
        if (!next.allFinite() || !(std::abs(tr) > 1e-300))
            throw numerical_error("log_likelihood: Euler state diverged at step " +
                                  std::to_string(k));
        rho = next / tr;
    }
    return ll;
}

/// Sum over records; per-record values accumulated pairwise for a fixed
/// reduction order.
inline double log_likelihood(const std::vector<DigitizedRecord>& records,
                             const MeasurementModel& model, const QuantumState& rho0,
                             LikelihoodMethod method, int n_p = 31, int threads = 0) {
    if (records.empty()) return 0.0;
    for (std::size_t r = 1; r < records.size(); ++r)
        require(records[r].dt == records[0].dt &&
                    records[r].channels == records[0].channels,
                "log_likelihood: records must share dt and channel structure");
    InstrumentCache cache;
    if (method == LikelihoodMethod::Robinet)
        cache = make_instrument_cache(model, records[0].dt, n_p, threads);
    std::vector<double> per(records.size());
    std::vector<std::string> failures(records.size());
    parallel_for(records.size(), threads, [&](std::size_t r) {
        try {
            per[r] = log_likelihood_single(records[r], model, rho0, method,
                                           method == LikelihoodMethod::Robinet ? &cache : nullptr);
        } catch (const std::exception& e) {
            failures[r] = "record " + std::to_string(r) + ": " + e.what();
        }
    });
    for (const auto& f : failures)
        if (!f.empty()) throw numerical_error(f);
    // pairwise summation
    std::function<double(std::size_t, std::size_t)> reduce = [&](std::size_t lo,
                                                                 std::size_t hi) -> double {
        if (hi - lo <= 8) {
            double acc = 0.0;
            for (std::size_t i = lo; i < hi; ++i) acc += per[i];
            return acc;
        }
        const std::size_t mid = lo + (hi - lo) / 2;
        return reduce(lo, mid) + reduce(mid, hi);
    };
    return reduce(0, per.size());
}

/// Parameter axis for likelihood scans: named values plus the model factory.
struct ParameterGrid {
    std::string name;
    std::vector<double> values;
    std::function<MeasurementModel(double)> factory;

    void validate() const {
        require(!values.empty(), "ParameterGrid: empty grid");
        for (std::size_t i = 0; i < values.size(); ++i) {
            require(std::isfinite(values[i]), "ParameterGrid: non-finite value");
            if (i > 0) require(values[i] > values[i - 1], "ParameterGrid: values must be sorted");
        }
        require(bool(factory), "ParameterGrid: missing model factory");
    }
};

struct ScanResult {
    std::vector<double> values;          // grid points
    std::vector<double> log_likelihood;  // total, per grid point
    std::vector<double> shifted;         // vertically aligned (max at 0)
    std::vector<std::vector<double>> per_record;  // [grid][record]
    int argmax_index = 0;
    double peak = 0.0;                   // quadratic-fit refinement
    double peak_se = 0.0;                // bootstrap standard error
    double curvature = 0.0;              // -d2/dw2 of total log-likelihood at peak
    double offset = 0.0;                 // vertical alignment shift
    bool peak_on_boundary = false;
};

namespace detail {

/// Quadratic refinement through the argmax and its neighbors; ties broken
/// toward the smallest grid value.
inline void refine_peak(const std::vector<double>& xs, const std::vector<double>& ys,
                        double& peak, double& curvature, int& argmax, bool& boundary) {
    argmax = 0;
    for (std::size_t i = 1; i < ys.size(); ++i)
        if (ys[i] > ys[argmax]) argmax = int(i);
    boundary = (argmax == 0 || argmax + 1 == int(ys.size()));
    const int i = std::clamp(argmax, 1, int(ys.size()) - 2);
    if (ys.size() < 3) {
        peak = xs[argmax];
        curvature = 0.0;
        return;
    }
    const double h = xs[i + 1] - xs[i];
    const double a = (ys[i - 1] - 2.0 * ys[i] + ys[i + 1]) / (2.0 * h * h);
    const double b = (ys[i + 1] - ys[i - 1]) / (2.0 * h);
    if (a < 0 && !boundary)
        peak = xs[i] - b / (2.0 * a);
    else
        peak = xs[argmax];
    curvature = -2.0 * a;
}

}  // namespace detail

/// Likelihood scan over a parameter grid with quadratic peak refinement and
/// a nonparametric bootstrap (over records) for the peak standard error.
inline ScanResult scan(const std::vector<DigitizedRecord>& records, const ParameterGrid& grid,
                       const QuantumState& rho0, LikelihoodMethod method, int n_p = 31,
                       int threads = 0, int bootstrap_resamples = 200,
                       std::uint64_t bootstrap_seed = 0x626f6f74) {
    grid.validate();
    require(!records.empty(), "scan: no records");

    ScanResult res;
    res.values = grid.values;
    res.per_record.assign(grid.values.size(), std::vector<double>(records.size(), 0.0));
    res.log_likelihood.assign(grid.values.size(), 0.0);

    std::vector<std::string> failures(grid.values.size());
    parallel_for(grid.values.size(), threads, [&](std::size_t gi) {
        try {
            const MeasurementModel model = grid.factory(grid.values[gi]);
            InstrumentCache cache;
            if (method == LikelihoodMethod::Robinet)
                cache = make_instrument_cache(model, records[0].dt, n_p, 1);
            for (std::size_t r = 0; r < records.size(); ++r)
                res.per_record[gi][r] =
                    log_likelihood_single(records[r], model, rho0, method,
                                          method == LikelihoodMethod::Robinet ? &cache : nullptr);
        } catch (const std::exception& e) {
            failures[gi] = std::string("grid point ") + std::to_string(grid.values[gi]) + ": " +
                           e.what();
        }
    }, 1);
    for (const auto& f : failures)
        if (!f.empty()) throw numerical_error(f);

    for (std::size_t gi = 0; gi < grid.values.size(); ++gi)
        res.log_likelihood[gi] =
            std::accumulate(res.per_record[gi].begin(), res.per_record[gi].end(), 0.0);

    detail::refine_peak(res.values, res.log_likelihood, res.peak, res.curvature, res.argmax_index,
                        res.peak_on_boundary);
    res.offset = res.log_likelihood[res.argmax_index];
    res.shifted.resize(res.log_likelihood.size());
    for (std::size_t gi = 0; gi < res.log_likelihood.size(); ++gi)
        res.shifted[gi] = res.log_likelihood[gi] - res.offset;

    // bootstrap over records on the cached per-record curves
    if (bootstrap_resamples > 0 && records.size() > 1) {
        PhiloxStream rng(bootstrap_seed, 0);
        std::vector<double> peaks(bootstrap_resamples);
        std::vector<double> ys(grid.values.size());
        for (int b = 0; b < bootstrap_resamples; ++b) {
            std::fill(ys.begin(), ys.end(), 0.0);
            for (std::size_t r = 0; r < records.size(); ++r) {
                const auto pick =
                    std::size_t(rng.uniform() * double(records.size())) % records.size();
                for (std::size_t gi = 0; gi < ys.size(); ++gi) ys[gi] += res.per_record[gi][pick];
            }
            double pk, curv;
            int am;
            bool bd;
            detail::refine_peak(res.values, ys, pk, curv, am, bd);
            peaks[b] = pk;
        }
        const double mean = std::accumulate(peaks.begin(), peaks.end(), 0.0) / peaks.size();
        double var = 0.0;
        for (double p : peaks) var += (p - mean) * (p - mean);
        res.peak_se = std::sqrt(var / std::max<std::size_t>(peaks.size() - 1, 1));
    }
    return res;
}

/// Fig. 3-style model family: the Fig. 1 qubit plus a detuning term w sigma_z.
inline ParameterGrid detuning_grid(double lo, double hi, int n, double eta = 0.8) {
    ParameterGrid g;
    g.name = "omega";
    for (int i = 0; i < n; ++i)
        g.values.push_back(n == 1 ? lo : lo + (hi - lo) * i / double(n - 1));
    g.factory = [eta](double omega) {
        MeasurementModel m;
        m.dim = 2;
        m.hamiltonian = sigma_x() + 0.5 * sigma_y() + omega * sigma_z();
        Channel ch;
        ch.op = 2.0 * sigma_minus();
        ch.eta = eta;
        ch.kind = ChannelKind::Diffusive;
        m.monitored.push_back(ch);
        return m;
    };
    return g;
}

}  // namespace robinet
