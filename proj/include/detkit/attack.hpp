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
 * The primary detection-efficiency attack. Eve tunes Bob's per-setting
 * detection efficiencies so that she learns the outcome of every
 * measurement in a target set G while the device statistics remain
 * exactly those of an honest lossy detector.
 *
 * Strategy, per round:
 *  - branch (i), probability eta_ybar for each ybar in G: Eve measures
 *    ybar herself, reads the outcome, and forces Bob's detector to
 *    click (same outcome) if y = ybar, or to no-click otherwise;
 *  - branch (ii), residual probability: Eve forwards the state
 *    untouched, forces no-click for y in G, and lets the detector
 *    click with probability tau_y for y not in G.
 *
 * With tau_y = eta_y / (1 - sum_{G} eta), the visible statistics are
 * exactly P(b|y) = eta_y Q(b|y), P(no-click|y) = 1 - eta_y. The taus
 * are well-defined iff sum_{y in G} eta_y <= 1 - max_{y not in G} eta_y.
 */

#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "detkit/lossy.hpp"
#include "detkit/rng.hpp"
#include "detkit/scenario.hpp"

namespace detkit {

/// No-click / not-applicable codes used in round logs.
inline constexpr int kNoClick = 0;
inline constexpr int kNotApplicable = -1;

/// Nonempty subset of Bob's settings whose outcomes Eve commits to
/// learning. Settings are 0-based and stored sorted.
struct TargetSet {
    std::vector<int> settings;

    void validate(int m_b) const {
        if (settings.empty()) throw ArgumentError("TargetSet: empty target set");
        for (int y : settings)
            if (y < 0 || y >= m_b)
                throw ArgumentError("TargetSet: setting out of range");
        std::vector<int> s = settings;
        std::sort(s.begin(), s.end());
        if (std::adjacent_find(s.begin(), s.end()) != s.end())
            throw ArgumentError("TargetSet: duplicate setting");
    }

    bool contains(int y) const {
        return std::find(settings.begin(), settings.end(), y) != settings.end();
    }
};

struct FeasibilityVerdict {
    bool feasible = false;
    double margin = 0.0;     ///< (1 - eta') - sum_{y in G} eta_y
    double eta_prime = 0.0;  ///< max efficiency outside G (0 if G is everything)
    double target_sum = 0.0; ///< sum of efficiencies over G
};

/// Feasibility of the primary attack for a profile and target set.
/// The boundary margin = 0 counts as feasible (non-strict inequality).
inline FeasibilityVerdict feasible(const EfficiencyProfile &profile, const TargetSet &target) {
    const int m_b = static_cast<int>(profile.etas.size());
    profile.validate(m_b);
    target.validate(m_b);
    FeasibilityVerdict v;
    for (int y = 0; y < m_b; ++y) {
        if (target.contains(y))
            v.target_sum += profile.etas[y];
        else
            v.eta_prime = std::max(v.eta_prime, profile.etas[y]);
    }
    v.margin = (1.0 - v.eta_prime) - v.target_sum;
    v.feasible = v.margin >= 0.0;
    return v;
}

/// Critical equal efficiency below which the attack works:
/// 1/(|G|+1) for |G| < M_B, and 1/M_B when G covers every setting.
inline double critical_efficiency(int g_size, int m_b) {
    if (g_size < 1 || g_size > m_b)
        throw ArgumentError("critical_efficiency: require 1 <= |G| <= M_B");
    return g_size < m_b ? 1.0 / (g_size + 1) : 1.0 / m_b;
}

/// Eve's full strategy: branch probabilities over G plus the tau_y
/// click probabilities for the settings she does not guess.
struct AttackPlan {
    int m_b = 0;
    TargetSet target;
    EfficiencyProfile profile;
    std::vector<double> branch_probs; ///< aligned with target.settings
    double residual_prob = 0.0;       ///< branch (ii) probability
    std::vector<double> taus;         ///< per setting; 1.0 placeholder on G
};

inline AttackPlan build_plan(const EfficiencyProfile &profile, const TargetSet &target) {
    const FeasibilityVerdict v = feasible(profile, target);
    if (!v.feasible)
        throw InfeasibleError("build_plan: sum_{y in G} eta_y exceeds 1 - eta' (margin " +
                                  std::to_string(v.margin) + ")",
                              v.margin);
    AttackPlan plan;
    plan.m_b = static_cast<int>(profile.etas.size());
    plan.target = target;
    plan.profile = profile;
    plan.residual_prob = 1.0 - v.target_sum;
    for (int y : target.settings) plan.branch_probs.push_back(profile.etas[y]);
    plan.taus.assign(plan.m_b, 1.0);
    for (int y = 0; y < plan.m_b; ++y) {
        if (target.contains(y)) continue;
        // residual_prob = 0 forces eta_y = 0 here (margin >= 0), and
        // branch (ii) never runs; any tau would do.
        plan.taus[y] = plan.residual_prob > 0.0 ? profile.etas[y] / plan.residual_prob : 0.0;
        if (plan.taus[y] > 1.0 + 1e-12)
            throw InfeasibleError("build_plan: tau out of range", v.margin);
        plan.taus[y] = std::min(plan.taus[y], 1.0);
    }
    return plan;
}

/// Exact statistics of the attacked device with an honest Alice,
/// assembled branch by branch. Statistical invisibility means this is
/// entrywise equal to apply_loss_bob(q, plan.profile).
inline LossyBehavior induced_behavior(const AttackPlan &plan, const Behavior &q) {
    const Scenario &s = q.scenario();
    if (plan.m_b != s.m_b)
        throw ArgumentError("induced_behavior: plan and behavior disagree on M_B");
    LossyBehavior p = LossyBehavior::zeros(s);

    // Branch (i): Eve measured ybar and obtained ebar; the pair
    // (Alice outcome, ebar) is distributed as Q(a ebar | x ybar).
    for (std::size_t i = 0; i < plan.target.settings.size(); ++i) {
        const int ybar = plan.target.settings[i];
        const double w = plan.branch_probs[i];
        if (w == 0.0) continue;
        for (int x = 0; x < s.m_a; ++x)
            for (int y = 0; y < s.m_b; ++y) {
                if (y == ybar) {
                    for (int a = 0; a < s.d; ++a)
                        for (int b = 0; b < s.d; ++b)
                            p.at(x, y, a + 1, b + 1) += w * q.at(x, ybar, a, b);
                } else {
                    for (int a = 0; a < s.d; ++a)
                        p.at(x, y, a + 1, 0) += w * q.alice_marginal(x, a, ybar);
                }
            }
    }

    // Branch (ii): state untouched; G settings blanked, the rest click
    // with probability tau_y.
    const double w0 = plan.residual_prob;
    if (w0 > 0.0) {
        for (int x = 0; x < s.m_a; ++x)
            for (int y = 0; y < s.m_b; ++y) {
                if (plan.target.contains(y)) {
                    for (int a = 0; a < s.d; ++a)
                        p.at(x, y, a + 1, 0) += w0 * q.alice_marginal(x, a, y);
                } else {
                    const double tau = plan.taus[y];
                    for (int a = 0; a < s.d; ++a) {
                        for (int b = 0; b < s.d; ++b)
                            p.at(x, y, a + 1, b + 1) += w0 * tau * q.at(x, y, a, b);
                        p.at(x, y, a + 1, 0) += w0 * (1.0 - tau) * q.alice_marginal(x, a, y);
                    }
                }
            }
    }
    return p;
}

/// Probability that Eve's record matches Bob's outcome (no-click
/// included) for setting y. Certainty for y in G is structural: every
/// branch either fixes Bob's outcome or tells Eve it is a no-click.
/// Off the target set her best record is the no-click knowledge plus a
/// maximum-likelihood guess on unread clicks.
inline double guessing_probability(const AttackPlan &plan, const Behavior &q, int y) {
    const Scenario &s = q.scenario();
    if (y < 0 || y >= s.m_b) throw ArgumentError("guessing_probability: setting out of range");
    if (plan.target.contains(y)) return 1.0;
    double best = 0.0;
    for (int b = 0; b < s.d; ++b) best = std::max(best, q.bob_marginal(y, b));
    // Unread clicks happen in branch (ii) with probability
    // residual * tau_y = eta_y; all other events are known to Eve.
    return 1.0 - plan.profile.etas[y] * (1.0 - best);
}

/// One simulated round. Settings are 1-based; outcomes use 0 for
/// no-click (Alice's detector is ideal here, so a >= 1). eve_branch is
/// the 1-based targeted setting in branch (i) and 0 in branch (ii).
struct RoundRecord {
    std::int64_t round = 0;
    int x = 0;
    int y = 0;
    int a = 0;
    int b = 0;
    int eve_branch = 0;
    int eve_guess_a = kNotApplicable;
    int eve_guess_b = kNotApplicable;
};

namespace detail {

inline int argmax_bob(const Behavior &q, int y) {
    int best = 0;
    double val = -1.0;
    for (int b = 0; b < q.scenario().d; ++b) {
        const double v = q.bob_marginal(y, b);
        if (v > val) {
            val = v;
            best = b;
        }
    }
    return best;
}

} // namespace detail

/// Monte-Carlo realization of the attack. Rounds are driven by
/// independent per-round substreams of `seed`, so the log is
/// reproducible and order-independent. Settings drawn uniformly.
inline std::vector<RoundRecord> simulate_rounds(const AttackPlan &plan, const Behavior &q,
                                                std::int64_t rounds, std::uint64_t seed) {
    if (rounds < 1) throw ArgumentError("simulate_rounds: need at least one round");
    const Scenario &s = q.scenario();
    if (plan.m_b != s.m_b)
        throw ArgumentError("simulate_rounds: plan and behavior disagree on M_B");

    std::vector<RoundRecord> log(static_cast<std::size_t>(rounds));
    std::vector<double> joint(static_cast<std::size_t>(s.d) * s.d);
    std::vector<double> marg(s.d);

    for (std::int64_t r = 0; r < rounds; ++r) {
        SplitMix64 rng(derive_stream_seed(seed, static_cast<std::uint64_t>(r)));
        RoundRecord rec;
        rec.round = r;
        const int x = static_cast<int>(rng.next_below(s.m_a));
        const int y = static_cast<int>(rng.next_below(s.m_b));
        rec.x = x + 1;
        rec.y = y + 1;

        // Branch selection: target settings carry probability eta_ybar.
        const double u = rng.next_double();
        double acc = 0.0;
        int branch = -1; // index into target.settings, -1 = branch (ii)
        for (std::size_t i = 0; i < plan.branch_probs.size(); ++i) {
            acc += plan.branch_probs[i];
            if (u < acc) {
                branch = static_cast<int>(i);
                break;
            }
        }

        if (branch >= 0) {
            const int ybar = plan.target.settings[static_cast<std::size_t>(branch)];
            rec.eve_branch = ybar + 1;
            // Eve measures ybar: outcome ebar ~ Q(b|ybar), then Alice's
            // outcome follows the conditional Q(a|x, ebar ybar).
            for (int b = 0; b < s.d; ++b) marg[b] = q.bob_marginal(ybar, b);
            const int ebar = static_cast<int>(sample_discrete(marg, rng));
            for (int a = 0; a < s.d; ++a) marg[a] = q.at(x, ybar, a, ebar);
            const int a = static_cast<int>(sample_discrete(marg, rng));
            rec.a = a + 1;
            if (y == ybar) {
                rec.b = ebar + 1;
                rec.eve_guess_b = ebar + 1;
            } else {
                rec.b = kNoClick;
                rec.eve_guess_b = kNoClick;
            }
        } else {
            rec.eve_branch = 0;
            if (plan.target.contains(y)) {
                for (int a = 0; a < s.d; ++a) marg[a] = q.alice_marginal(x, a, y);
                rec.a = static_cast<int>(sample_discrete(marg, rng)) + 1;
                rec.b = kNoClick;
                rec.eve_guess_b = kNoClick;
            } else if (rng.next_double() < plan.taus[y]) {
                for (int a = 0; a < s.d; ++a)
                    for (int b = 0; b < s.d; ++b)
                        joint[static_cast<std::size_t>(a) * s.d + b] = q.at(x, y, a, b);
                const auto ab = sample_discrete(joint, rng);
                rec.a = static_cast<int>(ab) / s.d + 1;
                rec.b = static_cast<int>(ab) % s.d + 1;
                // Click passed through unread; best effort is the MAP
                // outcome of Q(b|y).
                rec.eve_guess_b = detail::argmax_bob(q, y) + 1;
            } else {
                for (int a = 0; a < s.d; ++a) marg[a] = q.alice_marginal(x, a, y);
                rec.a = static_cast<int>(sample_discrete(marg, rng)) + 1;
                rec.b = kNoClick;
                rec.eve_guess_b = kNoClick;
            }
        }
        log[static_cast<std::size_t>(r)] = rec;
    }
    return log;
}

} // namespace detkit
