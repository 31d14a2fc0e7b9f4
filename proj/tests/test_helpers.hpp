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

// Shared generators for the test suites: seeded random density
// matrices, POVMs, behaviors, and feasible attack configurations.
// Everything is driven by SplitMix64 so failures reproduce exactly.

#pragma once

#include <cmath>
#include <vector>

#include "detkit/attack.hpp"
#include "detkit/builtins.hpp"
#include "detkit/lossy.hpp"
#include "detkit/quantum.hpp"
#include "detkit/rng.hpp"
#include "detkit/scenario.hpp"

namespace detkit::testing {

inline Cmatrix random_ginibre(int dim, SplitMix64 &rng) {
    Cmatrix g(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j)
            g(i, j) = {rng.next_double() * 2.0 - 1.0, rng.next_double() * 2.0 - 1.0};
    return g;
}

inline Cmatrix random_density(int dim, SplitMix64 &rng) {
    const Cmatrix g = random_ginibre(dim, rng);
    Cmatrix rho = g * g.adjoint();
    rho /= rho.trace().real();
    // Symmetrize away the last-ulp asymmetry from the division.
    return (rho + rho.adjoint()) / 2.0;
}

/// Random POVM with `outcomes` elements on dimension `dim`:
/// E_i = S^(-1/2) A_i S^(-1/2) for random PSD A_i with S = sum A_i.
inline std::vector<Cmatrix> random_povm(int dim, int outcomes, SplitMix64 &rng) {
    std::vector<Cmatrix> raw(outcomes);
    Cmatrix total = Cmatrix::Zero(dim, dim);
    for (int i = 0; i < outcomes; ++i) {
        const Cmatrix g = random_ginibre(dim, rng);
        raw[i] = g * g.adjoint() + 0.05 * Cmatrix::Identity(dim, dim);
        total += raw[i];
    }
    Eigen::SelfAdjointEigenSolver<Cmatrix> es(total);
    const Cmatrix inv_sqrt = es.operatorInverseSqrt();
    std::vector<Cmatrix> povm(outcomes);
    for (int i = 0; i < outcomes; ++i) {
        povm[i] = inv_sqrt * raw[i] * inv_sqrt;
        povm[i] = (povm[i] + povm[i].adjoint()) / 2.0;
    }
    return povm;
}

inline QuantumModel random_model(int m_a, int m_b, int d, SplitMix64 &rng, int dim = 2) {
    QuantumModel m;
    m.dim_a = m.dim_b = dim;
    m.state = random_density(dim * dim, rng);
    for (int x = 0; x < m_a; ++x) m.povms_a.push_back(random_povm(dim, d, rng));
    for (int y = 0; y < m_b; ++y) m.povms_b.push_back(random_povm(dim, d, rng));
    return m;
}

/// Random no-signalling behavior via the Born rule.
inline Behavior random_behavior(int m_a, int m_b, int d, SplitMix64 &rng, int dim = 2) {
    return born_behavior(random_model(m_a, m_b, d, rng, dim));
}

/// Random nonempty target set over m_b settings.
inline TargetSet random_target(int m_b, SplitMix64 &rng) {
    TargetSet t;
    for (int y = 0; y < m_b; ++y)
        if (rng.next_double() < 0.5) t.settings.push_back(y);
    if (t.settings.empty())
        t.settings.push_back(static_cast<int>(rng.next_below(m_b)));
    return t;
}

/// Random profile satisfying the feasibility condition for `target`:
/// the non-target efficiencies are drawn first, then the remaining
/// budget 1 - eta' is split across the target set.
inline EfficiencyProfile random_feasible_profile(int m_b, const TargetSet &target,
                                                 SplitMix64 &rng) {
    EfficiencyProfile p{std::vector<double>(m_b, 0.0)};
    double eta_prime = 0.0;
    for (int y = 0; y < m_b; ++y) {
        if (target.contains(y)) continue;
        p.etas[y] = rng.next_double() * 0.6;
        eta_prime = std::max(eta_prime, p.etas[y]);
    }
    const double budget = (1.0 - eta_prime) * rng.next_double();
    std::vector<double> cuts(target.settings.size());
    double total = 0.0;
    for (double &c : cuts) {
        c = 0.05 + rng.next_double();
        total += c;
    }
    for (std::size_t i = 0; i < cuts.size(); ++i)
        p.etas[target.settings[i]] = budget * cuts[i] / total;
    return p;
}

/// Deterministic product behavior: outcome tables a = f(x), b = g(y).
inline Behavior deterministic_behavior(int m_a, int m_b, int d,
                                       const std::vector<int> &alice,
                                       const std::vector<int> &bob) {
    Behavior q = Behavior::zeros({m_a, m_b, d});
    for (int x = 0; x < m_a; ++x)
        for (int y = 0; y < m_b; ++y) q.at(x, y, alice[x], bob[y]) = 1.0;
    return q;
}

/// Uniform-noise behavior on a scenario (all outcomes equally likely).
inline Behavior white_noise_behavior(int m_a, int m_b, int d) {
    Behavior q = Behavior::zeros({m_a, m_b, d});
    const double v = 1.0 / (d * d);
    for (int x = 0; x < m_a; ++x)
        for (int y = 0; y < m_b; ++y)
            for (int a = 0; a < d; ++a)
                for (int b = 0; b < d; ++b) q.at(x, y, a, b) = v;
    return q;
}

inline double max_abs_diff(const std::vector<double> &u, const std::vector<double> &v) {
    double worst = 0.0;
    for (std::size_t i = 0; i < u.size() && i < v.size(); ++i)
        worst = std::max(worst, std::abs(u[i] - v[i]));
    return worst;
}

} // namespace detkit::testing
