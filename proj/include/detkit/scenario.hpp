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
 * Bipartite measurement scenarios and ideal (lossless) behaviors
 * Q(ab|xy). Settings and outcomes are 0-based internally; external
 * formats use 1-based settings/outcomes with 0 reserved for no-click.
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "detkit/errors.hpp"

namespace detkit {

/// Default tolerance for exact algebraic identities on tables.
inline constexpr double kTableTol = 1e-12;

/// Measurement/outcome counts of a bipartite scenario. Single-party
/// scenarios are represented with m_a = 1 (one trivial Alice setting).
struct Scenario {
    int m_a = 1; ///< Alice settings, >= 1
    int m_b = 1; ///< Bob settings, >= 1
    int d = 2;   ///< ideal outcomes per measurement, >= 2

    void validate() const {
        if (m_a < 1 || m_b < 1 || d < 2)
            throw ArgumentError("Scenario: require m_a >= 1, m_b >= 1, d >= 2");
    }

    bool operator==(const Scenario &) const = default;

    std::size_t joint_outcomes() const { return static_cast<std::size_t>(d) * d; }
    std::size_t setting_pairs() const { return static_cast<std::size_t>(m_a) * m_b; }
};

/// Ideal conditional probability table Q(ab|xy), stored flat row-major
/// over (x, y, a, b).
class Behavior {
  public:
    Behavior() = default;

    Behavior(Scenario s, std::vector<double> table)
        : scenario_(s), table_(std::move(table)) {
        s.validate();
        if (table_.size() != s.setting_pairs() * s.joint_outcomes())
            throw ArgumentError("Behavior: table size does not match scenario");
    }

    /// Zero-filled table for incremental construction.
    static Behavior zeros(Scenario s) {
        s.validate();
        return Behavior(s, std::vector<double>(s.setting_pairs() * s.joint_outcomes(), 0.0));
    }

    const Scenario &scenario() const { return scenario_; }
    const std::vector<double> &table() const { return table_; }

    std::size_t index(int x, int y, int a, int b) const {
        return ((static_cast<std::size_t>(x) * scenario_.m_b + y) * scenario_.d + a) *
                   scenario_.d + b;
    }

    double at(int x, int y, int a, int b) const { return table_[index(x, y, a, b)]; }
    double &at(int x, int y, int a, int b) { return table_[index(x, y, a, b)]; }

    /// Q(a|x), evaluated at Bob setting y (independent of y when the
    /// behavior is no-signalling).
    double alice_marginal(int x, int a, int y = 0) const {
        double s = 0.0;
        for (int b = 0; b < scenario_.d; ++b) s += at(x, y, a, b);
        return s;
    }

    /// Q(b|y), evaluated at Alice setting x.
    double bob_marginal(int y, int b, int x = 0) const {
        double s = 0.0;
        for (int a = 0; a < scenario_.d; ++a) s += at(x, y, a, b);
        return s;
    }

    double normalization_residual() const {
        double worst = 0.0;
        for (int x = 0; x < scenario_.m_a; ++x)
            for (int y = 0; y < scenario_.m_b; ++y) {
                double s = 0.0;
                for (int a = 0; a < scenario_.d; ++a)
                    for (int b = 0; b < scenario_.d; ++b) s += at(x, y, a, b);
                worst = std::max(worst, std::abs(s - 1.0));
            }
        return worst;
    }

    double min_entry() const {
        double m = 0.0;
        for (double v : table_) m = std::min(m, v);
        return m;
    }

    /// Largest spread of any single-party marginal across the other
    /// party's settings. Zero for an exactly no-signalling table.
    double no_signalling_residual() const {
        double worst = 0.0;
        for (int x = 0; x < scenario_.m_a; ++x)
            for (int a = 0; a < scenario_.d; ++a) {
                double lo = 1.0, hi = 0.0;
                for (int y = 0; y < scenario_.m_b; ++y) {
                    const double v = alice_marginal(x, a, y);
                    lo = std::min(lo, v);
                    hi = std::max(hi, v);
                }
                worst = std::max(worst, hi - lo);
            }
        for (int y = 0; y < scenario_.m_b; ++y)
            for (int b = 0; b < scenario_.d; ++b) {
                double lo = 1.0, hi = 0.0;
                for (int x = 0; x < scenario_.m_a; ++x) {
                    const double v = bob_marginal(y, b, x);
                    lo = std::min(lo, v);
                    hi = std::max(hi, v);
                }
                worst = std::max(worst, hi - lo);
            }
        return worst;
    }

    /// Enforces the Behavior invariants: nonnegativity, per-setting
    /// normalization, and no-signalling of the ideal table.
    void validate(double tol = kTableTol) const {
        if (min_entry() < -tol)
            throw ArgumentError("Behavior: negative entry " + std::to_string(min_entry()));
        if (normalization_residual() > tol)
            throw ArgumentError("Behavior: normalization residual " +
                                std::to_string(normalization_residual()));
        if (no_signalling_residual() > tol)
            throw ArgumentError("Behavior: no-signalling residual " +
                                std::to_string(no_signalling_residual()));
    }

  private:
    Scenario scenario_;
    std::vector<double> table_;
};

/// Bob's conditional behavior Q(b|y, a x) for a fixed Alice event.
struct BobConditional {
    int m_b = 0;
    int d = 0;
    std::vector<double> table; ///< flat (y, b)

    double at(int y, int b) const { return table[static_cast<std::size_t>(y) * d + b]; }
};

/// Q(b|y, ax) = Q(ab|xy) / Q(a|x). Well-defined across y because the
/// ideal behavior is no-signalling.
inline BobConditional conditional_bob(const Behavior &q, int x, int a) {
    const Scenario &s = q.scenario();
    if (x < 0 || x >= s.m_a || a < 0 || a >= s.d)
        throw ArgumentError("conditional_bob: setting or outcome out of range");
    BobConditional out;
    out.m_b = s.m_b;
    out.d = s.d;
    out.table.resize(static_cast<std::size_t>(s.m_b) * s.d);
    for (int y = 0; y < s.m_b; ++y) {
        const double denom = q.alice_marginal(x, a, y);
        if (denom <= 0.0)
            throw ArgumentError("conditional_bob: conditioning on zero-probability outcome Q(a|x)=0");
        for (int b = 0; b < s.d; ++b)
            out.table[static_cast<std::size_t>(y) * s.d + b] = q.at(x, y, a, b) / denom;
    }
    return out;
}

/// Entrywise convex mixture of two behaviors over the same scenario.
inline Behavior mix(const Behavior &p, const Behavior &q, double lambda) {
    if (!(p.scenario() == q.scenario()))
        throw ArgumentError("mix: scenario mismatch");
    std::vector<double> t(p.table().size());
    for (std::size_t i = 0; i < t.size(); ++i)
        t[i] = lambda * p.table()[i] + (1.0 - lambda) * q.table()[i];
    return Behavior(p.scenario(), std::move(t));
}

/// Two-outcome correlator E(x,y) = sum_ab s(a)s(b) Q(ab|xy) with
/// s(0) = +1, s(1) = -1. Requires d = 2.
inline double correlator(const Behavior &q, int x, int y) {
    if (q.scenario().d != 2) throw ArgumentError("correlator: requires d = 2");
    double e = 0.0;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            e += (a == b ? 1.0 : -1.0) * q.at(x, y, a, b);
    return e;
}

/// CHSH functional E(0,0) + E(0,1) + E(1,0) - E(1,1) on a 2x2x2 behavior.
inline double chsh_value(const Behavior &q) {
    if (q.scenario().m_a != 2 || q.scenario().m_b != 2)
        throw ArgumentError("chsh_value: requires a 2x2 scenario");
    return correlator(q, 0, 0) + correlator(q, 0, 1) + correlator(q, 1, 0) -
           correlator(q, 1, 1);
}

} // namespace detkit
