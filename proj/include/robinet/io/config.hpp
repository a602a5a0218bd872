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

#include <fstream>
#include <string>

#include <json.hpp>

#include "robinet/core/model.hpp"
#include "robinet/core/state.hpp"

namespace robinet::io {

using nlohmann::json;

/// Schema errors carry the JSON field path of the offending entry.
inline void schema_require(bool cond, const std::string& path, const std::string& what) {
    if (!cond) throw validation_error(path + ": " + what);
}

inline Complex parse_complex(const json& v, const std::string& path) {
    if (v.is_number()) return Complex(v.get<double>(), 0.0);
    schema_require(v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number(), path,
                   "expected a number or an [re, im] pair");
    return Complex(v[0].get<double>(), v[1].get<double>());
}

/// Dense matrix literal: row-major array of rows of [re, im] pairs.
inline Matrix parse_matrix(const json& v, int dim, const std::string& path) {
    schema_require(v.is_array() && int(v.size()) == dim, path,
                   "expected " + std::to_string(dim) + " rows");
    Matrix m(dim, dim);
    for (int i = 0; i < dim; ++i) {
        schema_require(v[i].is_array() && int(v[i].size()) == dim,
                       path + "[" + std::to_string(i) + "]",
                       "expected " + std::to_string(dim) + " entries");
        for (int j = 0; j < dim; ++j)
            m(i, j) = parse_complex(v[i][j],
                                    path + "[" + std::to_string(i) + "][" + std::to_string(j) + "]");
    }
    return m;
}

inline Matrix named_operator(const std::string& name, int dim, const std::string& path) {
    if (name == "sigma_x" || name == "sigma_y" || name == "sigma_z" || name == "sigma_minus" ||
        name == "sigma_plus")
        schema_require(dim == 2, path, "Pauli presets require dim = 2");
    if (name == "sigma_x") return sigma_x();
    if (name == "sigma_y") return sigma_y();
    if (name == "sigma_z") return sigma_z();
    if (name == "sigma_minus") return sigma_minus();
    if (name == "sigma_plus") return sigma_plus();
    if (name == "identity") return Matrix::Identity(dim, dim);
    if (name == "annihilation") return annihilation(dim);
    if (name == "creation") return creation(dim);
    if (name == "number") return number_op(dim);
    if (name == "annihilation_sq") return annihilation(dim) * annihilation(dim);
    throw validation_error(path + ": unknown operator preset '" + name + "'");
}

/// Operator spec: {"matrix": ...} literal or {"terms": [{"op": name,
/// "coeff": c}, ...]} linear combination of presets.
inline Matrix parse_operator(const json& v, int dim, const std::string& path) {
    schema_require(v.is_object(), path, "expected an object");
    if (v.contains("matrix")) return parse_matrix(v["matrix"], dim, path + ".matrix");
    schema_require(v.contains("terms") && v["terms"].is_array() && !v["terms"].empty(), path,
                   "expected 'matrix' or a nonempty 'terms' array");
    Matrix m = Matrix::Zero(dim, dim);
    for (std::size_t t = 0; t < v["terms"].size(); ++t) {
        const auto& term = v["terms"][t];
        const std::string tpath = path + ".terms[" + std::to_string(t) + "]";
        schema_require(term.is_object() && term.contains("op"), tpath, "expected {op, coeff}");
        const Complex coeff =
            term.contains("coeff") ? parse_complex(term["coeff"], tpath + ".coeff") : Complex(1, 0);
        m += coeff * named_operator(term["op"].get<std::string>(), dim, tpath + ".op");
    }
    return m;
}

inline Matrix parse_initial_state(const json& v, int dim, const std::string& path) {
    schema_require(v.is_object(), path, "expected an object");
    if (v.contains("preset")) {
        const std::string p = v["preset"].get<std::string>();
        if (p == "excited") {
            schema_require(dim == 2, path + ".preset", "'excited' requires dim = 2");
            return fock_state(2, 0);
        }
        if (p == "ground") return fock_state(dim, dim == 2 ? 1 : 0);
        throw validation_error(path + ".preset: unknown preset '" + p + "'");
    }
    if (v.contains("fock")) {
        const int n = v["fock"].get<int>();
        schema_require(n >= 0 && n < dim, path + ".fock", "level out of range");
        return fock_state(dim, n);
    }
    if (v.contains("coherent"))
        return coherent_state(dim, parse_complex(v["coherent"], path + ".coherent"));
    if (v.contains("matrix")) {
        Matrix m = parse_matrix(v["matrix"], dim, path + ".matrix");
        QuantumState st(m, true);
        st.validate();
        return m;
    }
    throw validation_error(path + ": expected preset/fock/coherent/matrix");
}

/// Full experiment description as read by every CLI subcommand.
struct ExperimentConfig {
    MeasurementModel model;
    QuantumState initial_state;
    double dt = 1.0;
    int n_bins = 1;
    std::uint64_t seed = 1;
    int n_p = 31;
    int expansion_order = 4;
    double time_unit = 1.0;   // dt is multiplied by this scale before use
    int threads = 0;
    json raw;                 // full document, for subcommand-specific sections
    std::uint64_t fingerprint = 0;

    double dt_dimensionless() const { return dt * time_unit; }
};

inline ExperimentConfig parse_config(const json& doc) {
    schema_require(doc.is_object(), "$", "config must be a JSON object");
    schema_require(doc.contains("model") && doc["model"].is_object(), "model",
                   "missing model section");
    const json& jm = doc["model"];
    schema_require(jm.contains("dim") && jm["dim"].is_number_integer() && jm["dim"].get<int>() > 0,
                   "model.dim", "must be a positive integer");

    ExperimentConfig cfg;
    cfg.raw = doc;
    const int dim = jm["dim"].get<int>();
    cfg.model.dim = dim;
    schema_require(jm.contains("hamiltonian"), "model.hamiltonian", "missing");
    cfg.model.hamiltonian = parse_operator(jm["hamiltonian"], dim, "model.hamiltonian");
    {
        const double hn = std::max(cfg.model.hamiltonian.norm(), 1.0);
        schema_require((cfg.model.hamiltonian - cfg.model.hamiltonian.adjoint()).norm() <=
                           default_tolerances().herm * hn * 10,
                       "model.hamiltonian", "must be Hermitian within tolerance");
    }

    schema_require(jm.contains("channels") && jm["channels"].is_array() && !jm["channels"].empty(),
                   "model.channels", "expected a nonempty array");
    for (std::size_t c = 0; c < jm["channels"].size(); ++c) {
        const auto& jc = jm["channels"][c];
        const std::string cpath = "model.channels[" + std::to_string(c) + "]";
        schema_require(jc.is_object() && jc.contains("op"), cpath, "expected {op, eta, kind}");
        Channel ch;
        ch.op = parse_operator(jc["op"], dim, cpath + ".op");
        ch.eta = jc.value("eta", 1.0);
        schema_require(ch.eta >= 0.0 && ch.eta <= 1.0, cpath + ".eta", "must be in [0, 1]");
        const std::string kind = jc.value("kind", "diffusive");
        schema_require(kind == "diffusive" || kind == "jump", cpath + ".kind",
                       "must be 'diffusive' or 'jump'");
        ch.kind = kind == "diffusive" ? ChannelKind::Diffusive : ChannelKind::Jump;
        ch.dark_rate = jc.value("dark_rate", 0.0);
        schema_require(ch.dark_rate >= 0.0, cpath + ".dark_rate", "must be >= 0");
        schema_require(ch.kind == ChannelKind::Jump || ch.dark_rate == 0.0, cpath + ".dark_rate",
                       "only meaningful for jump channels");
        cfg.model.monitored.push_back(std::move(ch));
    }
    if (jm.contains("unmonitored")) {
        schema_require(jm["unmonitored"].is_array(), "model.unmonitored", "expected an array");
        for (std::size_t u = 0; u < jm["unmonitored"].size(); ++u)
            cfg.model.unmonitored.push_back(parse_operator(
                jm["unmonitored"][u], dim, "model.unmonitored[" + std::to_string(u) + "]"));
    }

    schema_require(doc.contains("initial_state"), "initial_state", "missing");
    cfg.initial_state =
        QuantumState(parse_initial_state(doc["initial_state"], dim, "initial_state"), true);

    cfg.dt = doc.value("dt", 1.0);
    schema_require(cfg.dt > 0.0, "dt", "must be positive");
    cfg.n_bins = doc.value("n_bins", 1);
    schema_require(cfg.n_bins >= 0, "n_bins", "must be >= 0");
    cfg.seed = doc.value("seed", std::uint64_t(1));
    cfg.n_p = doc.value("n_p", 31);
    schema_require(cfg.n_p > 0, "n_p", "must be positive");
    cfg.expansion_order = doc.value("expansion_order", 4);
    schema_require(cfg.expansion_order >= 0, "expansion_order", "must be >= 0");
    cfg.time_unit = doc.value("time_unit", 1.0);
    schema_require(cfg.time_unit > 0.0, "time_unit", "must be positive");
    cfg.threads = doc.value("threads", 0);

    cfg.model.validate();

    std::uint64_t h = 0xcbf29ce484222325ull;
    const std::string canon = doc.dump();
    detail::fnv_mix(h, canon.data(), canon.size());
    cfg.fingerprint = h;
    return cfg;
}

inline ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    require(in.good(), "load_config: cannot open " + path);
    json doc = json::parse(in, nullptr, false);
    require(!doc.is_discarded(), "load_config: malformed JSON in " + path);
    return parse_config(doc);
}

}  // namespace robinet::io
