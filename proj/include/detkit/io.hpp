// Copyright 2026 the detkit authors
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

/**
 * @file
 * JSON serialization of tables, certificates, and round logs.
 *
 * Conventions shared by every format: settings and ideal outcomes are
 * 1-based, the no-click outcome is 0, tables are flat row-major arrays
 * in the documented index order, complex numbers are [re, im] pairs.
 */

#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "detkit/attack.hpp"
#include "detkit/boundrand.hpp"
#include "detkit/lossy.hpp"
#include "detkit/polytope.hpp"
#include "detkit/quantum.hpp"
#include "detkit/scenario.hpp"

namespace detkit {

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// Behavior tables: {"m_a", "m_b", "d", "table"} with the table flat
// row-major over (x, y, a, b). A lossy table is recognized by its
// length m_a * m_b * (d+1)^2 and carries "lossy": true when written.
// ---------------------------------------------------------------------------

inline json to_json(const Behavior &q) {
    return json{{"m_a", q.scenario().m_a},
                {"m_b", q.scenario().m_b},
                {"d", q.scenario().d},
                {"table", q.table()}};
}

inline json to_json(const LossyBehavior &p) {
    return json{{"m_a", p.scenario().m_a},
                {"m_b", p.scenario().m_b},
                {"d", p.scenario().d},
                {"lossy", true},
                {"table", p.table()}};
}

namespace detail {

inline Scenario scenario_from_json(const json &j) {
    if (!j.contains("m_a") || !j.contains("m_b") || !j.contains("d"))
        throw ParseError("behavior JSON: missing m_a/m_b/d");
    Scenario s{j.at("m_a").get<int>(), j.at("m_b").get<int>(), j.at("d").get<int>()};
    s.validate();
    return s;
}

} // namespace detail

inline Behavior behavior_from_json(const json &j) {
    const Scenario s = detail::scenario_from_json(j);
    std::vector<double> table = j.at("table").get<std::vector<double>>();
    if (table.size() != s.setting_pairs() * s.joint_outcomes())
        throw ParseError("behavior JSON: table length does not match scenario");
    Behavior q(s, std::move(table));
    try {
        q.validate();
    } catch (const ArgumentError &e) {
        throw ParseError(std::string("behavior JSON: ") + e.what());
    }
    return q;
}

inline LossyBehavior lossy_from_json(const json &j) {
    const Scenario s = detail::scenario_from_json(j);
    std::vector<double> table = j.at("table").get<std::vector<double>>();
    const std::size_t ext = static_cast<std::size_t>(s.d) + 1;
    if (table.size() != s.setting_pairs() * ext * ext)
        throw ParseError("lossy behavior JSON: table length does not match scenario");
    LossyBehavior p(s, std::move(table));
    try {
        p.validate();
    } catch (const ArgumentError &e) {
        throw ParseError(std::string("lossy behavior JSON: ") + e.what());
    }
    return p;
}

// ---------------------------------------------------------------------------
// Quantum models: complex matrices as row-major arrays of [re, im].
// ---------------------------------------------------------------------------

inline json to_json(const Cmatrix &m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            row.push_back(json::array({m(i, j).real(), m(i, j).imag()}));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline Cmatrix cmatrix_from_json(const json &j) {
    if (!j.is_array() || j.empty()) throw ParseError("matrix JSON: expected array of rows");
    const std::size_t rows = j.size();
    const std::size_t cols = j.at(0).size();
    Cmatrix m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
        if (j.at(i).size() != cols) throw ParseError("matrix JSON: ragged rows");
        for (std::size_t k = 0; k < cols; ++k) {
            const json &cell = j.at(i).at(k);
            if (!cell.is_array() || cell.size() != 2)
                throw ParseError("matrix JSON: entries must be [re, im]");
            m(i, k) = {cell.at(0).get<double>(), cell.at(1).get<double>()};
        }
    }
    return m;
}

inline json to_json(const QuantumModel &m) {
    json povms_a = json::array(), povms_b = json::array();
    for (const auto &setting : m.povms_a) {
        json ops = json::array();
        for (const auto &op : setting) ops.push_back(to_json(op));
        povms_a.push_back(std::move(ops));
    }
    for (const auto &setting : m.povms_b) {
        json ops = json::array();
        for (const auto &op : setting) ops.push_back(to_json(op));
        povms_b.push_back(std::move(ops));
    }
    return json{{"kind", "quantum_model"}, {"dim_a", m.dim_a},   {"dim_b", m.dim_b},
                {"state", to_json(m.state)}, {"povms_a", povms_a}, {"povms_b", povms_b}};
}

inline QuantumModel quantum_model_from_json(const json &j) {
    QuantumModel m;
    m.dim_a = j.at("dim_a").get<int>();
    m.dim_b = j.at("dim_b").get<int>();
    m.state = cmatrix_from_json(j.at("state"));
    for (const json &setting : j.at("povms_a")) {
        std::vector<Cmatrix> ops;
        for (const json &op : setting) ops.push_back(cmatrix_from_json(op));
        m.povms_a.push_back(std::move(ops));
    }
    for (const json &setting : j.at("povms_b")) {
        std::vector<Cmatrix> ops;
        for (const json &op : setting) ops.push_back(cmatrix_from_json(op));
        m.povms_b.push_back(std::move(ops));
    }
    try {
        m.validate();
    } catch (const ArgumentError &e) {
        throw ParseError(std::string("quantum model JSON: ") + e.what());
    }
    return m;
}

// ---------------------------------------------------------------------------
// Tripartite boxes: flat row-major over (z, x, y, e_a, e_b, a, b),
// z = (xbar - 1) * m_b + (ybar - 1) in file terms.
// ---------------------------------------------------------------------------

inline json to_json(const TripartiteBox &box) {
    return json{{"m_a", box.scenario().m_a},
                {"m_b", box.scenario().m_b},
                {"d", box.scenario().d},
                {"index_order", "z,x,y,e_a,e_b,a,b"},
                {"table", box.table()}};
}

// ---------------------------------------------------------------------------
// Locality certificates.
// ---------------------------------------------------------------------------

inline json to_json(const LocalityCertificate &cert) {
    json j{{"verdict", cert.local ? "local" : "nonlocal"},
           {"tol", cert.tol},
           {"lp_objective", cert.lp_objective},
           {"lp_iterations", cert.lp_iterations}};
    if (cert.local) {
        json weights = json::array();
        for (const StrategyWeight &w : cert.weights)
            weights.push_back(json::array({w.pair_index, w.weight}));
        j["weights"] = std::move(weights);
        j["weight_sum"] = cert.weight_sum;
        j["reconstruction_error"] = cert.reconstruction_error;
    } else {
        j["functional"] = cert.functional.coeffs;
        j["local_bound"] = cert.local_bound;
        j["value"] = cert.value;
        j["violation"] = cert.value - cert.local_bound;
    }
    return j;
}

inline json to_json(const NoSignallingReport &rep) {
    return json{{"ab_vs_z", rep.ab_vs_z},   {"ae_vs_y", rep.ae_vs_y},
                {"be_vs_x", rep.be_vs_x},   {"a_vs_yz", rep.a_vs_yz},
                {"b_vs_xz", rep.b_vs_xz},   {"e_vs_xy", rep.e_vs_xy},
                {"max_residual", rep.max_residual}, {"pass", rep.pass}};
}

// ---------------------------------------------------------------------------
// Round logs: JSON lines, one record per round.
// ---------------------------------------------------------------------------

inline json to_json(const RoundRecord &r) {
    return json{{"round", r.round},           {"x", r.x},
                {"y", r.y},                   {"a", r.a},
                {"b", r.b},                   {"eve_branch", r.eve_branch},
                {"eve_guess_a", r.eve_guess_a}, {"eve_guess_b", r.eve_guess_b}};
}

inline void write_round_log(std::ostream &os, const std::vector<RoundRecord> &log) {
    for (const RoundRecord &r : log) os << to_json(r).dump() << '\n';
}

// ---------------------------------------------------------------------------
// Files.
// ---------------------------------------------------------------------------

inline json load_json_file(const std::string &path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception &e) {
        throw ParseError("invalid JSON in " + path + ": " + e.what());
    }
    return j;
}

inline void write_text_file(const std::string &path, const std::string &content) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot open file for writing: " + path);
    out << content;
}

/// FNV-1a digest of a string, used to fingerprint inputs in reports.
inline std::string fnv1a_hex(const std::string &data) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    std::ostringstream os;
    os << std::hex << h;
    return os.str();
}

} // namespace detkit
