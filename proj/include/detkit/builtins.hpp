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
 * Built-in example correlations: the CHSH behavior at the Tsirelson
 * point and the Peres-Mermin magic square, each as an exact closed-form
 * table and as the quantum model that generates it through the Born rule.
 */

#pragma once

#include <cmath>

#include "detkit/quantum.hpp"
#include "detkit/scenario.hpp"

namespace detkit {

/// CHSH behavior at the Tsirelson point: uniform marginals, correlators
/// E(0,0) = E(0,1) = E(1,0) = 1/sqrt(2), E(1,1) = -1/sqrt(2).
inline Behavior chsh_tsirelson() {
    const double e = 1.0 / std::sqrt(2.0);
    Behavior q = Behavior::zeros({2, 2, 2});
    for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y) {
            const double exy = (x == 1 && y == 1) ? -e : e;
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b)
                    q.at(x, y, a, b) = (1.0 + (a == b ? exy : -exy)) / 4.0;
        }
    return q;
}

/// Maximally entangled two-qubit model with Z/X on Alice and the
/// diagonal bases on Bob; its Born table is chsh_tsirelson().
inline QuantumModel chsh_quantum_model() {
    using namespace std::complex_literals;
    Cmatrix pauli_z(2, 2), pauli_x(2, 2), id = Cmatrix::Identity(2, 2);
    pauli_z << 1, 0, 0, -1;
    pauli_x << 0, 1, 1, 0;
    const double r = 1.0 / std::sqrt(2.0);

    QuantumModel m;
    m.dim_a = m.dim_b = 2;
    Eigen::VectorXcd phi = Eigen::VectorXcd::Zero(4);
    phi(0) = r;
    phi(3) = r;
    m.state = phi * phi.adjoint();

    auto dichotomic = [&](const Cmatrix &obs) {
        return std::vector<Cmatrix>{(id + obs) / 2.0, (id - obs) / 2.0};
    };
    m.povms_a = {dichotomic(pauli_z), dichotomic(pauli_x)};
    m.povms_b = {dichotomic((pauli_z + pauli_x) * r), dichotomic((pauli_z - pauli_x) * r)};
    return m;
}

namespace detail {

/// Outcome index <-> the two free signs of a magic-square assignment.
/// Outcome a encodes (s1, s2) via bits: bit set means -1.
inline int magic_sign(int outcome, int slot) {
    const int bit = (slot == 0) ? (outcome >> 1) & 1 : outcome & 1;
    return bit ? -1 : 1;
}

/// Alice's value in cell (x, y): entry y of her row-x assignment,
/// the third entry being fixed by the row parity +1.
inline int magic_row_value(int a, int y) {
    if (y < 2) return magic_sign(a, y);
    return magic_sign(a, 0) * magic_sign(a, 1);
}

/// Bob's value in cell (x, y): entry x of his column-y assignment, the
/// third entry fixed by the column parity (+1, +1, -1).
inline int magic_col_value(int b, int x, int y) {
    if (x < 2) return magic_sign(b, x);
    return (y == 2 ? -1 : 1) * magic_sign(b, 0) * magic_sign(b, 1);
}

} // namespace detail

/// Peres-Mermin magic square behavior: Alice measures row x, Bob column
/// y, outcomes encode the two free signs, and the shared cell always
/// agrees. Uniform 1/8 over the 8 consistent outcome pairs per setting.
inline Behavior magic_square() {
    Behavior q = Behavior::zeros({3, 3, 4});
    for (int x = 0; x < 3; ++x)
        for (int y = 0; y < 3; ++y)
            for (int a = 0; a < 4; ++a)
                for (int b = 0; b < 4; ++b)
                    if (detail::magic_row_value(a, y) == detail::magic_col_value(b, x, y))
                        q.at(x, y, a, b) = 1.0 / 8.0;
    return q;
}

/// Two-ebit realization of the magic square: both parties hold two
/// qubits of |phi+>^(x2); Alice projects onto the joint eigenbasis of
/// the row-x observables, Bob of the column-y observables.
inline QuantumModel magic_square_quantum_model() {
    using namespace std::complex_literals;
    Cmatrix z(2, 2), x(2, 2), y(2, 2), id = Cmatrix::Identity(2, 2);
    z << 1, 0, 0, -1;
    x << 0, 1, 1, 0;
    y << 0, -1i, 1i, 0;

    // The standard observable square: rows multiply to +I, columns 1-2
    // to +I, column 3 to -I. All nine entries are symmetric matrices.
    Cmatrix obs[3][3] = {
        {kron(x, id), kron(id, x), kron(x, x)},
        {kron(id, z), kron(z, id), kron(z, z)},
        {kron(x, z), kron(z, x), kron(y, y)},
    };

    const Cmatrix id4 = Cmatrix::Identity(4, 4);
    auto joint_projectors = [&](const Cmatrix &o1, const Cmatrix &o2) {
        std::vector<Cmatrix> povm(4);
        for (int outcome = 0; outcome < 4; ++outcome) {
            const double s1 = detail::magic_sign(outcome, 0);
            const double s2 = detail::magic_sign(outcome, 1);
            povm[outcome] = (id4 + s1 * o1) / 2.0 * ((id4 + s2 * o2) / 2.0);
        }
        return povm;
    };

    QuantumModel m;
    m.dim_a = m.dim_b = 4;
    Eigen::VectorXcd phi = Eigen::VectorXcd::Zero(16);
    for (int k = 0; k < 4; ++k) phi(k * 4 + k) = 0.5;
    m.state = phi * phi.adjoint();
    for (int r = 0; r < 3; ++r) m.povms_a.push_back(joint_projectors(obs[r][0], obs[r][1]));
    for (int c = 0; c < 3; ++c) m.povms_b.push_back(joint_projectors(obs[0][c], obs[1][c]));
    return m;
}

} // namespace detkit
