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

#include "detkit/builtins.hpp"
#include "detkit/quantum.hpp"
#include "detkit/scenario.hpp"
#include "test_helpers.hpp"

using namespace detkit;
using namespace detkit::testing;

namespace {

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

QuantumModel bell_state_computational() {
    QuantumModel m;
    m.dim_a = m.dim_b = 2;
    Eigen::VectorXcd phi = Eigen::VectorXcd::Zero(4);
    phi(0) = kInvSqrt2;
    phi(3) = kInvSqrt2;
    m.state = phi * phi.adjoint();
    Cmatrix p0 = Cmatrix::Zero(2, 2), p1 = Cmatrix::Zero(2, 2);
    p0(0, 0) = 1.0;
    p1(1, 1) = 1.0;
    m.povms_a = {{p0, p1}};
    m.povms_b = {{p0, p1}};
    return m;
}

} // namespace

TEST_CASE("scenario invariants are enforced") {
    CHECK_THROWS_AS(Scenario({0, 2, 2}).validate(), ArgumentError);
    CHECK_THROWS_AS(Scenario({2, 0, 2}).validate(), ArgumentError);
    CHECK_THROWS_AS(Scenario({2, 2, 1}).validate(), ArgumentError);
    CHECK_NOTHROW(Scenario({1, 3, 2}).validate()); // single-party form
}

TEST_CASE("born rule: maximally entangled state in matching bases") {
    const Behavior q = born_behavior(bell_state_computational());
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            CHECK(q.at(0, 0, a, b) == Catch::Approx(a == b ? 0.5 : 0.0).margin(1e-12));
}

TEST_CASE("born rule: product state gives a deterministic product behavior") {
    QuantumModel m;
    m.dim_a = m.dim_b = 2;
    Cmatrix rho = Cmatrix::Zero(4, 4);
    rho(1, 1) = 1.0; // |0><0| (x) |1><1|
    m.state = rho;
    Cmatrix p0 = Cmatrix::Zero(2, 2), p1 = Cmatrix::Zero(2, 2);
    p0(0, 0) = 1.0;
    p1(1, 1) = 1.0;
    m.povms_a = {{p0, p1}};
    m.povms_b = {{p0, p1}};
    const Behavior q = born_behavior(m);
    CHECK(q.at(0, 0, 0, 1) == Catch::Approx(1.0).margin(1e-12));
    CHECK(q.at(0, 0, 0, 0) == Catch::Approx(0.0).margin(1e-12));
    CHECK(q.at(0, 0, 1, 1) == Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("born rule: CHSH-optimal settings give the +-1/sqrt(2) correlators") {
    const Behavior q = born_behavior(chsh_quantum_model());
    CHECK(correlator(q, 0, 0) == Catch::Approx(kInvSqrt2).margin(1e-12));
    CHECK(correlator(q, 0, 1) == Catch::Approx(kInvSqrt2).margin(1e-12));
    CHECK(correlator(q, 1, 0) == Catch::Approx(kInvSqrt2).margin(1e-12));
    CHECK(correlator(q, 1, 1) == Catch::Approx(-kInvSqrt2).margin(1e-12));
}

TEST_CASE("born rule rejects dimension mismatches") {
    QuantumModel m = chsh_quantum_model();
    m.dim_b = 3; // state is still 4x4
    CHECK_THROWS_AS(born_behavior(m), ArgumentError);
}

TEST_CASE("born rule is linear in the state") {
    SplitMix64 rng(41);
    for (int trial = 0; trial < 5; ++trial) {
        QuantumModel m1 = random_model(2, 3, 2, rng);
        QuantumModel m2 = m1;
        m2.state = random_density(4, rng);
        const double lambda = rng.next_double();
        QuantumModel mixed = m1;
        mixed.state = lambda * m1.state + (1.0 - lambda) * m2.state;
        const Behavior qm = born_behavior(mixed);
        const Behavior q1 = born_behavior(m1);
        const Behavior q2 = born_behavior(m2);
        const Behavior expect = mix(q1, q2, lambda);
        CHECK(max_abs_diff(qm.table(), expect.table()) <= 1e-12);
    }
}

TEST_CASE("chsh_tsirelson: marginals, CHSH value, and Born-rule cross-check") {
    const Behavior q = chsh_tsirelson();
    q.validate();

    for (int x = 0; x < 2; ++x)
        for (int a = 0; a < 2; ++a)
            CHECK(q.alice_marginal(x, a) == Catch::Approx(0.5).margin(1e-12));
    for (int y = 0; y < 2; ++y)
        for (int b = 0; b < 2; ++b)
            CHECK(q.bob_marginal(y, b) == Catch::Approx(0.5).margin(1e-12));

    CHECK(chsh_value(q) == Catch::Approx(2.0 * std::sqrt(2.0)).margin(1e-12));

    const Behavior born = born_behavior(chsh_quantum_model());
    CHECK(max_abs_diff(q.table(), born.table()) <= 1e-12);
}

TEST_CASE("magic square: intersection agreement, support, and marginals") {
    const Behavior q = magic_square();
    q.validate();
    REQUIRE(q.scenario().m_a == 3);
    REQUIRE(q.scenario().m_b == 3);
    REQUIRE(q.scenario().d == 4);

    // The shared cell agrees with certainty; equivalently all support
    // sits on consistent pairs at exactly 1/8 each.
    for (int x = 0; x < 3; ++x)
        for (int y = 0; y < 3; ++y) {
            int support = 0;
            for (int a = 0; a < 4; ++a)
                for (int b = 0; b < 4; ++b) {
                    const double v = q.at(x, y, a, b);
                    if (v == 0.0) continue;
                    CHECK(v == Catch::Approx(0.125).margin(1e-15));
                    CHECK(detail::magic_row_value(a, y) == detail::magic_col_value(b, x, y));
                    ++support;
                }
            CHECK(support == 8);
        }

    // Uniform marginals over the four parity-consistent assignments.
    for (int x = 0; x < 3; ++x)
        for (int a = 0; a < 4; ++a)
            CHECK(q.alice_marginal(x, a) == Catch::Approx(0.25).margin(1e-12));
    for (int y = 0; y < 3; ++y)
        for (int b = 0; b < 4; ++b)
            CHECK(q.bob_marginal(y, b) == Catch::Approx(0.25).margin(1e-12));
}

TEST_CASE("magic square equals the Born table of the two-ebit strategy") {
    const Behavior q = magic_square();
    const Behavior born = born_behavior(magic_square_quantum_model());
    CHECK(max_abs_diff(q.table(), born.table()) <= 1e-12);
}

TEST_CASE("conditional_bob: product behavior reduces to Bob's marginal") {
    const Behavior q = deterministic_behavior(2, 2, 2, {0, 1}, {1, 0});
    const BobConditional c = conditional_bob(q, 0, 0);
    for (int y = 0; y < 2; ++y)
        for (int b = 0; b < 2; ++b)
            CHECK(c.at(y, b) == Catch::Approx(q.bob_marginal(y, b)).margin(1e-12));
}

TEST_CASE("conditional_bob: Bell state in matching bases is perfectly correlated") {
    const Behavior q = born_behavior(bell_state_computational());
    const BobConditional c = conditional_bob(q, 0, 0);
    CHECK(c.at(0, 0) == Catch::Approx(1.0).margin(1e-12));
    CHECK(c.at(0, 1) == Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("conditional_bob: rows are normalized and remix to the marginal") {
    const Behavior q = chsh_tsirelson();
    for (int x = 0; x < 2; ++x) {
        for (int y = 0; y < 2; ++y)
            for (int b = 0; b < 2; ++b) {
                double remix = 0.0;
                for (int a = 0; a < 2; ++a)
                    remix += q.alice_marginal(x, a) * conditional_bob(q, x, a).at(y, b);
                CHECK(remix == Catch::Approx(q.bob_marginal(y, b)).margin(1e-12));
            }
        for (int a = 0; a < 2; ++a) {
            const BobConditional c = conditional_bob(q, x, a);
            for (int y = 0; y < 2; ++y) {
                double sum = 0.0;
                for (int b = 0; b < 2; ++b) sum += c.at(y, b);
                CHECK(sum == Catch::Approx(1.0).margin(1e-12));
            }
        }
    }
}

TEST_CASE("conditional_bob rejects conditioning on zero-probability outcomes") {
    const Behavior q = deterministic_behavior(2, 2, 2, {0, 1}, {1, 0});
    CHECK_THROWS_AS(conditional_bob(q, 0, 1), ArgumentError); // Q(a=1|x=0) = 0
}

TEST_CASE("quantum model invariants are enforced") {
    QuantumModel m = chsh_quantum_model();
    m.state *= 2.0;
    CHECK_THROWS_AS(m.validate(), ArgumentError); // trace != 1

    QuantumModel bad_povm = chsh_quantum_model();
    bad_povm.povms_a[0][0] *= 0.5; // no longer sums to identity
    CHECK_THROWS_AS(bad_povm.validate(), ArgumentError);
}

TEST_CASE("random Born behaviors satisfy all Behavior invariants") {
    SplitMix64 rng(117);
    for (int trial = 0; trial < 10; ++trial) {
        const int m_a = 1 + static_cast<int>(rng.next_below(3));
        const int m_b = 1 + static_cast<int>(rng.next_below(3));
        const int d = 2 + static_cast<int>(rng.next_below(3));
        const Behavior q = random_behavior(m_a, m_b, d, rng);
        CHECK(q.min_entry() >= -1e-12);
        CHECK(q.normalization_residual() <= 1e-12);
        CHECK(q.no_signalling_residual() <= 1e-12);
    }
}
