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

#include "detkit/builtins.hpp"
#include "detkit/lossy.hpp"
#include "test_helpers.hpp"

using namespace detkit;
using namespace detkit::testing;

TEST_CASE("efficiency profiles validate range and length") {
    CHECK_THROWS_AS((EfficiencyProfile{{0.5, 1.2}}.validate(2)), ArgumentError);
    CHECK_THROWS_AS((EfficiencyProfile{{0.5}}.validate(2)), ArgumentError);
    CHECK_NOTHROW((EfficiencyProfile{{0.0, 1.0}}.validate(2)));
}

TEST_CASE("apply_loss_bob: unit efficiency embeds the ideal table") {
    const Behavior q = chsh_tsirelson();
    const LossyBehavior p = apply_loss_bob(q, EfficiencyProfile::uniform(1.0, 2));
    p.validate();
    for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y) {
            for (int a = 0; a < 2; ++a) {
                CHECK(p.at(x, y, a + 1, 0) == 0.0);
                for (int b = 0; b < 2; ++b)
                    CHECK(p.at(x, y, a + 1, b + 1) == Catch::Approx(q.at(x, y, a, b)).margin(1e-15));
            }
            for (int b = 0; b <= 2; ++b) CHECK(p.at(x, y, 0, b) == 0.0);
        }
}

TEST_CASE("apply_loss_bob: opaque detector clicks never, Alice keeps her marginal") {
    const Behavior q = chsh_tsirelson();
    const LossyBehavior p = apply_loss_bob(q, EfficiencyProfile::uniform(0.0, 2));
    for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y) {
            double no_click = 0.0;
            for (int a = 0; a <= 2; ++a) no_click += p.at(x, y, a, 0);
            CHECK(no_click == Catch::Approx(1.0).margin(1e-15));
            for (int a = 0; a < 2; ++a)
                CHECK(p.at(x, y, a + 1, 0) ==
                      Catch::Approx(q.alice_marginal(x, a)).margin(1e-15));
        }
}

TEST_CASE("apply_loss_bob at eta = 1/2 halves Bob's click probabilities") {
    // Operating point of the single-target attack: every click outcome
    // appears with probability Q(b|y)/2 = 1/4.
    const Behavior q = chsh_tsirelson();
    const LossyBehavior p = apply_loss_bob(q, EfficiencyProfile::uniform(0.5, 2));
    for (int y = 0; y < 2; ++y) {
        const auto marg = bob_lossy_marginal(p, y);
        CHECK(marg[0] == Catch::Approx(0.5).margin(1e-12));
        CHECK(marg[1] == Catch::Approx(0.25).margin(1e-12));
        CHECK(marg[2] == Catch::Approx(0.25).margin(1e-12));
    }
}

TEST_CASE("apply_loss_bob preserves Alice's marginal exactly") {
    SplitMix64 rng(7);
    const Behavior q = random_behavior(3, 2, 3, rng);
    const EfficiencyProfile profile{{0.3, 0.9}};
    const LossyBehavior p = apply_loss_bob(q, profile);
    p.validate();
    for (int x = 0; x < 3; ++x)
        for (int y = 0; y < 2; ++y)
            for (int a = 0; a < 3; ++a)
                CHECK(p.alice_marginal(x, a + 1, y) ==
                      Catch::Approx(q.alice_marginal(x, a, y)).margin(1e-12));
}

TEST_CASE("apply_loss_both: block structure and masses") {
    SplitMix64 rng(8);
    const Behavior q = random_behavior(2, 3, 2, rng);
    const double eta = 0.6;
    const LossyBehavior p = apply_loss_both(q, eta);
    p.validate();
    for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 3; ++y) {
            CHECK(p.at(x, y, 0, 0) == Catch::Approx(0.16).margin(1e-12));
            double click_click = 0.0, click_no = 0.0, no_click = 0.0;
            for (int a = 1; a <= 2; ++a) {
                click_no += p.at(x, y, a, 0);
                for (int b = 1; b <= 2; ++b) click_click += p.at(x, y, a, b);
            }
            for (int b = 1; b <= 2; ++b) no_click += p.at(x, y, 0, b);
            CHECK(click_click == Catch::Approx(eta * eta).margin(1e-12));
            CHECK(click_no == Catch::Approx(eta * (1 - eta)).margin(1e-12));
            CHECK(no_click == Catch::Approx(eta * (1 - eta)).margin(1e-12));
        }
}

TEST_CASE("apply_loss_both at eta = 1 embeds the ideal behavior") {
    const Behavior q = magic_square();
    const LossyBehavior p = apply_loss_both(q, 1.0);
    for (int x = 0; x < 3; ++x)
        for (int y = 0; y < 3; ++y) {
            CHECK(p.at(x, y, 0, 0) == 0.0);
            for (int a = 0; a < 4; ++a)
                for (int b = 0; b < 4; ++b)
                    CHECK(p.at(x, y, a + 1, b + 1) == Catch::Approx(q.at(x, y, a, b)).margin(1e-15));
        }
}

TEST_CASE("marginalizing Alice out of apply_loss_bob gives the single-party model") {
    SplitMix64 rng(9);
    const Behavior q = random_behavior(2, 3, 2, rng);
    const double eta = 0.37;
    const LossyBehavior p = apply_loss_bob(q, EfficiencyProfile::uniform(eta, 3));
    for (int y = 0; y < 3; ++y) {
        const auto marg = bob_lossy_marginal(p, y);
        CHECK(marg[0] == Catch::Approx(1.0 - eta).margin(1e-12));
        for (int b = 0; b < 2; ++b)
            CHECK(marg[b + 1] == Catch::Approx(eta * q.bob_marginal(y, b)).margin(1e-12));
    }
}

TEST_CASE("blanking composition law: blank(loss(eta), s) = loss(s*eta)") {
    SplitMix64 rng(10);
    for (int trial = 0; trial < 6; ++trial) {
        const int m_a = 1 + static_cast<int>(rng.next_below(3));
        const int m_b = 1 + static_cast<int>(rng.next_below(3));
        const int d = 2 + static_cast<int>(rng.next_below(2));
        const Behavior q = random_behavior(m_a, m_b, d, rng);
        const double eta = rng.next_double();
        const double s = rng.next_double();
        const LossyBehavior left = blank_with_survival(apply_loss_both(q, eta), s);
        const LossyBehavior right = apply_loss_both(q, s * eta);
        CHECK(max_abs_diff(left.table(), right.table()) <= 1e-12);
    }
}

TEST_CASE("loss maps preserve no-signalling at 1e-12") {
    SplitMix64 rng(11);
    for (int trial = 0; trial < 6; ++trial) {
        const Behavior q = random_behavior(2, 3, 3, rng);
        CHECK(apply_loss_bob(q, EfficiencyProfile{{0.2, 0.8, 0.5}}).no_signalling_residual() <=
              1e-12);
        CHECK(apply_loss_both(q, 0.71).no_signalling_residual() <= 1e-12);
    }
}
