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

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <map>

#include "detkit/attack.hpp"
#include "detkit/builtins.hpp"
#include "test_helpers.hpp"

using namespace detkit;
using namespace detkit::testing;

TEST_CASE("feasibility margins") {
    CHECK(feasible({{0.6, 0.3}}, {{0}}).feasible);
    CHECK(feasible({{0.6, 0.3}}, {{0}}).margin == Catch::Approx(0.1).margin(1e-15));

    // Guessing everything: eta' = 0, boundary margin counts as feasible.
    const FeasibilityVerdict all = feasible({{0.5, 0.5}}, {{0, 1}});
    CHECK(all.feasible);
    CHECK(all.eta_prime == 0.0);
    CHECK(all.margin == Catch::Approx(0.0).margin(1e-15));

    const FeasibilityVerdict bad = feasible({{0.6, 0.6}}, {{0}});
    CHECK_FALSE(bad.feasible);
    CHECK(bad.margin == Catch::Approx(-0.2).margin(1e-15));
}

TEST_CASE("critical efficiencies") {
    CHECK(critical_efficiency(1, 2) == 0.5);
    CHECK(critical_efficiency(3, 3) == Catch::Approx(1.0 / 3.0).margin(1e-15));
    CHECK(critical_efficiency(2, 5) == Catch::Approx(1.0 / 3.0).margin(1e-15));
    CHECK_THROWS_AS(critical_efficiency(0, 2), ArgumentError);
    CHECK_THROWS_AS(critical_efficiency(3, 2), ArgumentError);
}

TEST_CASE("plan construction: taus and branch probabilities") {
    const AttackPlan p1 = build_plan({{0.5, 0.4}}, {{0}});
    CHECK(p1.taus[1] == Catch::Approx(0.8).margin(1e-15));
    CHECK(p1.residual_prob == Catch::Approx(0.5).margin(1e-15));

    const AttackPlan p2 = build_plan({{0.5, 0.5}}, {{0}});
    CHECK(p2.taus[1] == Catch::Approx(1.0).margin(1e-15)); // boundary saturation

    const AttackPlan p3 = build_plan({{0.3, 0.3, 0.3}}, {{0, 1, 2}});
    CHECK(p3.residual_prob == Catch::Approx(0.1).margin(1e-15));

    CHECK_THROWS_MATCHES(build_plan({{0.6, 0.6}}, {{0}}), InfeasibleError,
                         Catch::Matchers::Predicate<InfeasibleError>(
                             [](const InfeasibleError &e) {
                                 return std::abs(e.margin + 0.2) < 1e-12;
                             },
                             "carries margin -0.2"));
}

TEST_CASE("induced behavior equals the honest lossy table (statistical invisibility)") {
    const Behavior q = chsh_tsirelson();
    const EfficiencyProfile profile{{0.5, 0.5}};
    const TargetSet target{{0}};
    const AttackPlan plan = build_plan(profile, target);
    const LossyBehavior attacked = induced_behavior(plan, q);
    const LossyBehavior honest = apply_loss_bob(q, profile);
    attacked.validate();
    CHECK(max_abs_diff(attacked.table(), honest.table()) <= 1e-12);
}

TEST_CASE("induced behavior marginalized to Bob is the single-party lossy model") {
    SplitMix64 rng(21);
    const Behavior q = random_behavior(2, 3, 2, rng);
    const double eta = critical_efficiency(2, 3); // 1/3
    const AttackPlan plan = build_plan(EfficiencyProfile::uniform(eta, 3), {{0, 2}});
    const LossyBehavior attacked = induced_behavior(plan, q);
    for (int y = 0; y < 3; ++y) {
        const auto marg = bob_lossy_marginal(attacked, y);
        CHECK(marg[0] == Catch::Approx(1.0 - eta).margin(1e-12));
        for (int b = 0; b < 2; ++b)
            CHECK(marg[b + 1] == Catch::Approx(eta * q.bob_marginal(y, b)).margin(1e-12));
    }
}

TEST_CASE("deterministic behavior stays deterministic on clicks under attack") {
    const Behavior q = deterministic_behavior(2, 2, 2, {1, 0}, {0, 1});
    const AttackPlan plan = build_plan({{0.4, 0.5}}, {{0}});
    const LossyBehavior attacked = induced_behavior(plan, q);
    for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y)
            for (int a = 1; a <= 2; ++a)
                for (int b = 1; b <= 2; ++b) {
                    const double v = attacked.at(x, y, a, b);
                    if (v == 0.0) continue;
                    CHECK(a - 1 == (x == 0 ? 1 : 0));
                    CHECK(b - 1 == (y == 0 ? 0 : 1));
                }
}

TEST_CASE("honest Alice keeps her marginal under the attack") {
    SplitMix64 rng(22);
    const Behavior q = random_behavior(3, 3, 3, rng);
    const AttackPlan plan = build_plan({{0.25, 0.4, 0.3}}, {{1}});
    const LossyBehavior attacked = induced_behavior(plan, q);
    for (int x = 0; x < 3; ++x)
        for (int y = 0; y < 3; ++y)
            for (int a = 0; a < 3; ++a)
                CHECK(attacked.alice_marginal(x, a + 1, y) ==
                      Catch::Approx(q.alice_marginal(x, a, y)).margin(1e-12));
}

TEST_CASE("guessing probability: certainty on the target set") {
    const Behavior q = chsh_tsirelson();
    const AttackPlan plan = build_plan({{0.5, 0.5}}, {{0}});
    CHECK(guessing_probability(plan, q, 0) == 1.0); // exact, structural
    // Off-target: branch (ii) clicks are unread, Q(b|y) is uniform.
    const double off = guessing_probability(plan, q, 1);
    CHECK(off == Catch::Approx(1.0 - 0.5 * 0.5).margin(1e-12));
    CHECK(off < 1.0);
}

TEST_CASE("guessing probability: deterministic off-target outcomes are free") {
    const Behavior q = deterministic_behavior(2, 2, 2, {0, 0}, {1, 0});
    const AttackPlan plan = build_plan({{0.5, 0.5}}, {{0}});
    CHECK(guessing_probability(plan, q, 1) == Catch::Approx(1.0).margin(1e-15));
}

TEST_CASE("randomized property: invisibility, guessing, and threshold consistency") {
    SplitMix64 rng(23);
    for (int trial = 0; trial < 25; ++trial) {
        const int m_a = 1 + static_cast<int>(rng.next_below(3));
        const int m_b = 1 + static_cast<int>(rng.next_below(3));
        const int d = 2 + static_cast<int>(rng.next_below(2));
        const Behavior q = random_behavior(m_a, m_b, d, rng);
        const TargetSet target = random_target(m_b, rng);
        const EfficiencyProfile profile = random_feasible_profile(m_b, target, rng);

        const AttackPlan plan = build_plan(profile, target);
        const LossyBehavior attacked = induced_behavior(plan, q);
        const LossyBehavior honest = apply_loss_bob(q, profile);
        CHECK(max_abs_diff(attacked.table(), honest.table()) <= 1e-12);
        for (int y : target.settings) CHECK(guessing_probability(plan, q, y) == 1.0);
    }

    // Equal-efficiency threshold: feasible iff eta <= critical.
    for (int m_b = 2; m_b <= 5; ++m_b)
        for (int g = 1; g <= m_b; ++g) {
            TargetSet target;
            for (int y = 0; y < g; ++y) target.settings.push_back(y);
            const double crit = critical_efficiency(g, m_b);
            CHECK(feasible(EfficiencyProfile::uniform(crit, m_b), target).margin >= -1e-15);
            CHECK_FALSE(
                feasible(EfficiencyProfile::uniform(crit + 1e-9, m_b), target).feasible);
            CHECK(feasible(EfficiencyProfile::uniform(crit - 1e-9, m_b), target).feasible);
        }
}

TEST_CASE("simulation: determinism, perfect target guessing, and convergence") {
    const Behavior q = chsh_tsirelson();
    const AttackPlan plan = build_plan({{0.5, 0.5}}, {{0}});
    const std::int64_t n = 100000;

    const auto log1 = simulate_rounds(plan, q, n, 4242);
    const auto log2 = simulate_rounds(plan, q, n, 4242);
    REQUIRE(log1.size() == log2.size());
    bool identical = true;
    for (std::size_t i = 0; i < log1.size(); ++i) {
        identical = identical && log1[i].x == log2[i].x && log1[i].y == log2[i].y &&
                    log1[i].a == log2[i].a && log1[i].b == log2[i].b &&
                    log1[i].eve_branch == log2[i].eve_branch &&
                    log1[i].eve_guess_b == log2[i].eve_guess_b;
    }
    CHECK(identical);

    // Eve is right on every target-set round, clicked or not.
    for (const RoundRecord &r : log1)
        if (plan.target.contains(r.y - 1)) CHECK(r.eve_guess_b == r.b);

    // Empirical cells within 5 binomial standard errors of the table.
    const LossyBehavior exact = apply_loss_bob(q, plan.profile);
    std::map<std::pair<int, int>, std::int64_t> pair_counts;
    std::map<std::tuple<int, int, int, int>, std::int64_t> cell_counts;
    for (const RoundRecord &r : log1) {
        pair_counts[{r.x - 1, r.y - 1}]++;
        cell_counts[{r.x - 1, r.y - 1, r.a, r.b}]++;
    }
    for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y) {
            const double nxy = static_cast<double>(pair_counts[{x, y}]);
            REQUIRE(nxy > 0);
            for (int a = 0; a <= 2; ++a)
                for (int b = 0; b <= 2; ++b) {
                    const double p = exact.at(x, y, a, b);
                    const double f = static_cast<double>(cell_counts[{x, y, a, b}]) / nxy;
                    const double se = std::sqrt(p * (1.0 - p) / nxy);
                    if (se == 0.0)
                        CHECK(f == p);
                    else
                        CHECK(std::abs(f - p) <= 5.0 * se);
                }
        }
}

TEST_CASE("simulation input validation") {
    const Behavior q = chsh_tsirelson();
    const AttackPlan plan = build_plan({{0.5, 0.5}}, {{0}});
    CHECK_THROWS_AS(simulate_rounds(plan, q, 0, 1), ArgumentError);
}
