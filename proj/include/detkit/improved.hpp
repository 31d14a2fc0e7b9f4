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
 * The two-sided improved attack. Eve exploits Alice's detector
 * inefficiency to raise the critical efficiency on Bob: with
 * probability q she runs the primary attack on Bob, with probability
 * 1-q she fixes one of Alice's outcomes and derives every Bob outcome
 * from the conditional state, and with probability 1-r she blanks both
 * detectors. Tuned correctly this reproduces the equal-efficiency
 * two-sided lossy statistics at
 *
 *     eta_crit = (|G|' + M_A - 2) / (|G|' M_A - 1),
 *
 * where |G|' = |G|+1 if |G| < M_B and |G|' = |G| otherwise. Below the
 * critical point the construction is composed with independent
 * per-side blanking (survival s = eta / eta_crit), which maps the
 * equal-efficiency family onto itself.
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "detkit/attack.hpp"
#include "detkit/lossy.hpp"
#include "detkit/rng.hpp"
#include "detkit/scenario.hpp"

namespace detkit {

/// |G|' as used by the improved attack formulas.
inline int g_prime_for(int g_size, int m_b) {
    if (g_size < 1 || g_size > m_b)
        throw ArgumentError("g_prime_for: require 1 <= |G| <= M_B");
    return g_size < m_b ? g_size + 1 : g_size;
}

/// Critical equal efficiency of the improved attack. Always larger
/// than 1/|G|' for finite M_A and decreasing towards it as M_A grows.
inline double critical_eta_improved(std::int64_t m_a, std::int64_t g_prime) {
    if (m_a < 2 || g_prime < 2)
        throw ArgumentError("critical_eta_improved: require M_A >= 2 and |G|' >= 2");
    const double ma = static_cast<double>(m_a);
    const double gp = static_cast<double>(g_prime);
    return (gp + ma - 2.0) / (gp * ma - 1.0);
}

struct ImprovedTuning {
    double eta = 0.0; ///< critical efficiency being reproduced
    double q = 0.0;   ///< probability of the Bob-direction attack
    double r = 0.0;   ///< probability of running the protocol at all
    double residual = 0.0; ///< disagreement of the two q equations
};

/// Solves the block-matching conditions
///   r q (1 - 1/|G|') = eta (1 - eta) = r (1 - q)(1 - 1/M_A),
/// with r = 1 - (1-eta)^2 and eta at the critical point. The two
/// routes to q must agree; their residual is returned for inspection.
inline ImprovedTuning tune_parameters(std::int64_t m_a, std::int64_t g_prime) {
    ImprovedTuning t;
    t.eta = critical_eta_improved(m_a, g_prime);
    t.r = 1.0 - (1.0 - t.eta) * (1.0 - t.eta);
    const double off = t.eta * (1.0 - t.eta);
    const double q_forward = off / (t.r * (1.0 - 1.0 / static_cast<double>(g_prime)));
    const double q_reverse = 1.0 - off / (t.r * (1.0 - 1.0 / static_cast<double>(m_a)));
    t.residual = std::abs(q_forward - q_reverse);
    if (t.residual > 1e-12)
        throw NumericalError("tune_parameters: inconsistent q equations", t.residual);
    t.q = q_forward;
    return t;
}

/// Tuned improved-attack strategy for a concrete scenario.
struct ImprovedPlan {
    int m_a = 0;
    int m_b = 0;
    TargetSet target;
    int g_prime = 0;
    double eta_crit = 0.0;
    double eta = 0.0;      ///< efficiency being reproduced, <= eta_crit
    double survival = 1.0; ///< blanking survival s = eta / eta_crit
    double q_mix = 0.0;
    double r_click = 0.0;
};

inline ImprovedPlan make_improved_plan(int m_a, int m_b, const TargetSet &target, double eta) {
    target.validate(m_b);
    ImprovedPlan plan;
    plan.m_a = m_a;
    plan.m_b = m_b;
    plan.target = target;
    plan.g_prime = g_prime_for(static_cast<int>(target.settings.size()), m_b);
    const ImprovedTuning t = tune_parameters(m_a, plan.g_prime);
    plan.eta_crit = t.eta;
    plan.q_mix = t.q;
    plan.r_click = t.r;
    if (!(eta >= 0.0) || eta > plan.eta_crit + 1e-12)
        throw InfeasibleError("make_improved_plan: eta exceeds the improved critical point",
                              plan.eta_crit - eta);
    plan.eta = std::min(eta, plan.eta_crit);
    plan.survival = plan.eta / plan.eta_crit;
    return plan;
}

/// Exact joint statistics of the improved attack, assembled branch by
/// branch and composed with the sub-critical blanking. Equals
/// apply_loss_both(q_behavior, plan.eta) when the plan is tuned.
inline LossyBehavior induced_joint(const ImprovedPlan &plan, const Behavior &q) {
    const Scenario &s = q.scenario();
    if (s.m_a != plan.m_a || s.m_b != plan.m_b)
        throw ArgumentError("induced_joint: plan and behavior disagree on scenario");
    LossyBehavior p = LossyBehavior::zeros(s);
    const double r = plan.r_click;
    const double qmix = plan.q_mix;

    // Blank branch: both detectors silent.
    for (int x = 0; x < s.m_a; ++x)
        for (int y = 0; y < s.m_b; ++y) p.at(x, y, 0, 0) += 1.0 - r;

    // Forward branch: primary attack on Bob at its own critical point,
    // equal internal efficiency 1/|G|' and all taus = 1. Alice clicks.
    {
        const double w = r * qmix;
        const double eta_f = 1.0 / plan.g_prime;
        const double residual = 1.0 - static_cast<double>(plan.target.settings.size()) * eta_f;
        for (int ybar : plan.target.settings)
            for (int x = 0; x < s.m_a; ++x)
                for (int y = 0; y < s.m_b; ++y) {
                    if (y == ybar) {
                        for (int a = 0; a < s.d; ++a)
                            for (int b = 0; b < s.d; ++b)
                                p.at(x, y, a + 1, b + 1) += w * eta_f * q.at(x, ybar, a, b);
                    } else {
                        for (int a = 0; a < s.d; ++a)
                            p.at(x, y, a + 1, 0) += w * eta_f * q.alice_marginal(x, a, ybar);
                    }
                }
        if (residual > 0.0) {
            for (int x = 0; x < s.m_a; ++x)
                for (int y = 0; y < s.m_b; ++y) {
                    if (plan.target.contains(y)) {
                        for (int a = 0; a < s.d; ++a)
                            p.at(x, y, a + 1, 0) += w * residual * q.alice_marginal(x, a, y);
                    } else {
                        for (int a = 0; a < s.d; ++a)
                            for (int b = 0; b < s.d; ++b)
                                p.at(x, y, a + 1, b + 1) += w * residual * q.at(x, y, a, b);
                    }
                }
        }
    }

    // Reverse branch: Eve fixes Alice's outcome for a uniformly chosen
    // xbar and answers every Bob measurement from the conditional
    // Q(b|y, abar xbar). Bob always clicks.
    {
        const double w = r * (1.0 - qmix) / s.m_a;
        for (int xbar = 0; xbar < s.m_a; ++xbar)
            for (int y = 0; y < s.m_b; ++y)
                for (int abar = 0; abar < s.d; ++abar)
                    for (int b = 0; b < s.d; ++b) {
                        const double v = w * q.at(xbar, y, abar, b);
                        if (v == 0.0) continue;
                        for (int x = 0; x < s.m_a; ++x) {
                            if (x == xbar)
                                p.at(x, y, abar + 1, b + 1) += v;
                            else
                                p.at(x, y, 0, b + 1) += v;
                        }
                    }
    }

    return plan.survival < 1.0 ? blank_with_survival(p, plan.survival) : p;
}

/// Eve's record matches Bob's outcome with certainty on the target set:
/// forward rounds are the primary attack, reverse rounds she computed
/// Bob's result herself, blanked rounds are her own doing. Off the
/// target set only forward branch-(ii) clicks go unread.
inline double guessing_probability_improved(const ImprovedPlan &plan, const Behavior &q, int y) {
    const Scenario &s = q.scenario();
    if (y < 0 || y >= s.m_b)
        throw ArgumentError("guessing_probability_improved: setting out of range");
    if (plan.target.contains(y)) return 1.0;
    double best = 0.0;
    for (int b = 0; b < s.d; ++b) best = std::max(best, q.bob_marginal(y, b));
    const double unread =
        plan.r_click * plan.q_mix * (1.0 / plan.g_prime) * plan.survival;
    return 1.0 - unread * (1.0 - best);
}

/// Branch codes in improved-attack round logs.
inline constexpr int kBranchBlank = 0;
inline constexpr int kBranchForward = 1;
inline constexpr int kBranchReverse = 2;

/// Monte-Carlo realization of the improved attack; same log schema as
/// the primary attack, with eve_guess_a filled in the branches where
/// Eve knows Alice's outcome.
inline std::vector<RoundRecord> simulate_rounds_improved(const ImprovedPlan &plan,
                                                         const Behavior &q,
                                                         std::int64_t rounds,
                                                         std::uint64_t seed) {
    if (rounds < 1) throw ArgumentError("simulate_rounds_improved: need at least one round");
    const Scenario &s = q.scenario();
    if (s.m_a != plan.m_a || s.m_b != plan.m_b)
        throw ArgumentError("simulate_rounds_improved: scenario mismatch");

    std::vector<RoundRecord> log(static_cast<std::size_t>(rounds));
    std::vector<double> joint(static_cast<std::size_t>(s.d) * s.d);
    std::vector<double> marg(s.d);
    const double eta_f = 1.0 / plan.g_prime;

    for (std::int64_t rr = 0; rr < rounds; ++rr) {
        SplitMix64 rng(derive_stream_seed(seed, static_cast<std::uint64_t>(rr)));
        RoundRecord rec;
        rec.round = rr;
        const int x = static_cast<int>(rng.next_below(s.m_a));
        const int y = static_cast<int>(rng.next_below(s.m_b));
        rec.x = x + 1;
        rec.y = y + 1;

        if (rng.next_double() >= plan.r_click) {
            rec.eve_branch = kBranchBlank;
            rec.a = kNoClick;
            rec.b = kNoClick;
            rec.eve_guess_a = kNoClick;
            rec.eve_guess_b = kNoClick;
            log[static_cast<std::size_t>(rr)] = rec;
            continue;
        }

        if (rng.next_double() < plan.q_mix) {
            rec.eve_branch = kBranchForward;
            // Primary attack on Bob at equal efficiency 1/|G|'.
            const double u = rng.next_double();
            const std::size_t g = plan.target.settings.size();
            const int pick = static_cast<int>(u / eta_f); // branch (i) if < |G|
            if (pick < static_cast<int>(g)) {
                const int ybar = plan.target.settings[static_cast<std::size_t>(pick)];
                for (int b = 0; b < s.d; ++b) marg[b] = q.bob_marginal(ybar, b);
                const int ebar = static_cast<int>(sample_discrete(marg, rng));
                for (int a = 0; a < s.d; ++a) marg[a] = q.at(x, ybar, a, ebar);
                rec.a = static_cast<int>(sample_discrete(marg, rng)) + 1;
                rec.b = (y == ybar) ? ebar + 1 : kNoClick;
                rec.eve_guess_b = rec.b;
            } else if (plan.target.contains(y)) {
                for (int a = 0; a < s.d; ++a) marg[a] = q.alice_marginal(x, a, y);
                rec.a = static_cast<int>(sample_discrete(marg, rng)) + 1;
                rec.b = kNoClick;
                rec.eve_guess_b = kNoClick;
            } else {
                // tau = 1: always clicks, unread by Eve.
                for (int a = 0; a < s.d; ++a)
                    for (int b = 0; b < s.d; ++b)
                        joint[static_cast<std::size_t>(a) * s.d + b] = q.at(x, y, a, b);
                const auto ab = sample_discrete(joint, rng);
                rec.a = static_cast<int>(ab) / s.d + 1;
                rec.b = static_cast<int>(ab) % s.d + 1;
                rec.eve_guess_b = detail::argmax_bob(q, y) + 1;
            }
        } else {
            rec.eve_branch = kBranchReverse;
            const int xbar = static_cast<int>(rng.next_below(s.m_a));
            for (int a = 0; a < s.d; ++a) marg[a] = q.alice_marginal(xbar, a);
            const int abar = static_cast<int>(sample_discrete(marg, rng));
            for (int b = 0; b < s.d; ++b) marg[b] = q.at(xbar, y, abar, b);
            const int b = static_cast<int>(sample_discrete(marg, rng));
            rec.a = (x == xbar) ? abar + 1 : kNoClick;
            rec.b = b + 1;
            rec.eve_guess_a = rec.a; // Eve decided Alice's outcome
            rec.eve_guess_b = rec.b; // ... and derived Bob's
        }

        // Sub-critical blanking, Eve's own coins: any outcome she had
        // on record becomes a known no-click when blanked.
        if (plan.survival < 1.0) {
            if (rec.a != kNoClick && rng.next_double() >= plan.survival) {
                rec.a = kNoClick;
                if (rec.eve_guess_a != kNotApplicable) rec.eve_guess_a = kNoClick;
            }
            if (rec.b != kNoClick && rng.next_double() >= plan.survival) {
                rec.b = kNoClick;
                if (rec.eve_guess_b != kNotApplicable) rec.eve_guess_b = kNoClick;
            }
        }
        log[static_cast<std::size_t>(rr)] = rec;
    }
    return log;
}

} // namespace detkit
