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
 * Lossy detector model. A detector with efficiency eta produces its
 * ideal outcome with probability eta and the extra no-click outcome
 * otherwise. No-click is a first-class outcome (index 0) everywhere;
 * nothing in the toolkit ever post-selects it away.
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "detkit/scenario.hpp"

namespace detkit {

/// Per-setting detection efficiencies eta_y in [0, 1] for one party.
struct EfficiencyProfile {
    std::vector<double> etas;

    static EfficiencyProfile uniform(double eta, int settings) {
        return EfficiencyProfile{std::vector<double>(settings, eta)};
    }

    void validate(int settings) const {
        if (static_cast<int>(etas.size()) != settings)
            throw ArgumentError("EfficiencyProfile: expected " + std::to_string(settings) +
                                " efficiencies, got " + std::to_string(etas.size()));
        for (double e : etas)
            if (!(e >= 0.0 && e <= 1.0))
                throw ArgumentError("EfficiencyProfile: efficiency outside [0, 1]");
    }
};

/// Probability table over extended outcomes a, b in {0, 1..d} per
/// setting pair, where 0 denotes no-click. Flat row-major (x, y, a, b).
class LossyBehavior {
  public:
    LossyBehavior() = default;

    LossyBehavior(Scenario s, std::vector<double> table)
        : scenario_(s), table_(std::move(table)) {
        s.validate();
        if (table_.size() != s.setting_pairs() * ext() * ext())
            throw ArgumentError("LossyBehavior: table size does not match scenario");
    }

    static LossyBehavior zeros(Scenario s) {
        s.validate();
        const std::size_t ext = static_cast<std::size_t>(s.d) + 1;
        return LossyBehavior(s, std::vector<double>(s.setting_pairs() * ext * ext, 0.0));
    }

    const Scenario &scenario() const { return scenario_; }
    const std::vector<double> &table() const { return table_; }

    /// Extended alphabet size d + 1.
    std::size_t ext() const { return static_cast<std::size_t>(scenario_.d) + 1; }

    std::size_t index(int x, int y, int a, int b) const {
        return ((static_cast<std::size_t>(x) * scenario_.m_b + y) * ext() + a) * ext() + b;
    }

    double at(int x, int y, int a, int b) const { return table_[index(x, y, a, b)]; }
    double &at(int x, int y, int a, int b) { return table_[index(x, y, a, b)]; }

    double alice_marginal(int x, int a, int y = 0) const {
        double s = 0.0;
        for (std::size_t b = 0; b < ext(); ++b) s += at(x, y, a, static_cast<int>(b));
        return s;
    }

    double bob_marginal(int y, int b, int x = 0) const {
        double s = 0.0;
        for (std::size_t a = 0; a < ext(); ++a) s += at(x, y, static_cast<int>(a), b);
        return s;
    }

    double normalization_residual() const {
        double worst = 0.0;
        for (int x = 0; x < scenario_.m_a; ++x)
            for (int y = 0; y < scenario_.m_b; ++y) {
                double s = 0.0;
                for (std::size_t a = 0; a < ext(); ++a)
                    for (std::size_t b = 0; b < ext(); ++b)
                        s += at(x, y, static_cast<int>(a), static_cast<int>(b));
                worst = std::max(worst, std::abs(s - 1.0));
            }
        return worst;
    }

    double min_entry() const {
        double m = 0.0;
        for (double v : table_) m = std::min(m, v);
        return m;
    }

    double no_signalling_residual() const {
        double worst = 0.0;
        for (int x = 0; x < scenario_.m_a; ++x)
            for (std::size_t a = 0; a < ext(); ++a) {
                double lo = 1.0, hi = 0.0;
                for (int y = 0; y < scenario_.m_b; ++y) {
                    const double v = alice_marginal(x, static_cast<int>(a), y);
                    lo = std::min(lo, v);
                    hi = std::max(hi, v);
                }
                worst = std::max(worst, hi - lo);
            }
        for (int y = 0; y < scenario_.m_b; ++y)
            for (std::size_t b = 0; b < ext(); ++b) {
                double lo = 1.0, hi = 0.0;
                for (int x = 0; x < scenario_.m_a; ++x) {
                    const double v = bob_marginal(y, static_cast<int>(b), x);
                    lo = std::min(lo, v);
                    hi = std::max(hi, v);
                }
                worst = std::max(worst, hi - lo);
            }
        return worst;
    }

    void validate(double tol = kTableTol) const {
        if (min_entry() < -tol)
            throw ArgumentError("LossyBehavior: negative entry");
        if (normalization_residual() > tol)
            throw ArgumentError("LossyBehavior: normalization residual " +
                                std::to_string(normalization_residual()));
        if (no_signalling_residual() > tol)
            throw ArgumentError("LossyBehavior: no-signalling residual " +
                                std::to_string(no_signalling_residual()));
    }

  private:
    Scenario scenario_;
    std::vector<double> table_;
};

/// Lossy device on Bob's side only: P(ab|xy) = eta_y Q(ab|xy),
/// P(a0|xy) = (1 - eta_y) Q(a|x). Alice's detector is ideal, so her
/// no-click rows stay identically zero and her marginal is unchanged.
inline LossyBehavior apply_loss_bob(const Behavior &q, const EfficiencyProfile &profile) {
    const Scenario &s = q.scenario();
    profile.validate(s.m_b);
    LossyBehavior p = LossyBehavior::zeros(s);
    for (int x = 0; x < s.m_a; ++x)
        for (int y = 0; y < s.m_b; ++y) {
            const double eta = profile.etas[y];
            for (int a = 0; a < s.d; ++a) {
                for (int b = 0; b < s.d; ++b)
                    p.at(x, y, a + 1, b + 1) = eta * q.at(x, y, a, b);
                p.at(x, y, a + 1, 0) = (1.0 - eta) * q.alice_marginal(x, a, y);
            }
        }
    return p;
}

/// Lossy devices on both sides with one equal efficiency, click events
/// independent Bernoulli(eta) per side:
///   P(ab|xy)  = eta^2 Q(ab|xy)        P(a0|xy) = eta(1-eta) Q(a|x)
///   P(0b|xy)  = eta(1-eta) Q(b|y)     P(00|xy) = (1-eta)^2
inline LossyBehavior apply_loss_both(const Behavior &q, double eta) {
    if (!(eta >= 0.0 && eta <= 1.0))
        throw ArgumentError("apply_loss_both: eta outside [0, 1]");
    const Scenario &s = q.scenario();
    LossyBehavior p = LossyBehavior::zeros(s);
    for (int x = 0; x < s.m_a; ++x)
        for (int y = 0; y < s.m_b; ++y) {
            for (int a = 0; a < s.d; ++a)
                for (int b = 0; b < s.d; ++b)
                    p.at(x, y, a + 1, b + 1) = eta * eta * q.at(x, y, a, b);
            for (int a = 0; a < s.d; ++a)
                p.at(x, y, a + 1, 0) = eta * (1.0 - eta) * q.alice_marginal(x, a, y);
            for (int b = 0; b < s.d; ++b)
                p.at(x, y, 0, b + 1) = eta * (1.0 - eta) * q.bob_marginal(y, b, x);
            p.at(x, y, 0, 0) = (1.0 - eta) * (1.0 - eta);
        }
    return p;
}

/// Independent per-side blanking: each click survives with probability
/// `survival`, otherwise becomes no-click; no-clicks stay no-clicks.
/// Composition law: blank(apply_loss_both(q, eta), s) equals
/// apply_loss_both(q, s * eta).
inline LossyBehavior blank_with_survival(const LossyBehavior &p, double survival) {
    if (!(survival >= 0.0 && survival <= 1.0))
        throw ArgumentError("blank_with_survival: survival outside [0, 1]");
    const Scenario &s = p.scenario();
    const int ext = s.d + 1;
    LossyBehavior out = LossyBehavior::zeros(s);
    for (int x = 0; x < s.m_a; ++x)
        for (int y = 0; y < s.m_b; ++y)
            for (int a = 0; a < ext; ++a)
                for (int b = 0; b < ext; ++b) {
                    const double v = p.at(x, y, a, b);
                    if (v == 0.0) continue;
                    const double sa = (a == 0) ? 1.0 : survival;
                    const double sb = (b == 0) ? 1.0 : survival;
                    out.at(x, y, a, b) += sa * sb * v;
                    if (a != 0) out.at(x, y, 0, b) += (1.0 - sa) * sb * v;
                    if (b != 0) out.at(x, y, a, 0) += sa * (1.0 - sb) * v;
                    if (a != 0 && b != 0)
                        out.at(x, y, 0, 0) += (1.0 - sa) * (1.0 - sb) * v;
                }
    return out;
}

/// Single-party view of Bob's lossy statistics, P(b|y) over b in {0..d}.
inline std::vector<double> bob_lossy_marginal(const LossyBehavior &p, int y) {
    std::vector<double> out(p.ext(), 0.0);
    for (std::size_t b = 0; b < p.ext(); ++b) out[b] = p.bob_marginal(y, static_cast<int>(b));
    return out;
}

} // namespace detkit
