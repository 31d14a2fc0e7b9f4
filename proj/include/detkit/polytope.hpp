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
 * Local-polytope membership for lossy behaviors. A behavior is local
 * iff some probability distribution over deterministic strategy pairs
 * (one extended outcome per setting, per party) reproduces its table;
 * this is decided by a phase-I LP whose dual, on infeasibility, is a
 * separating Bell functional. Both verdicts ship re-checkable
 * certificates: a weight list that must reconstruct the table, or a
 * functional whose value must exceed its local bound.
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "detkit/lossy.hpp"
#include "detkit/scenario.hpp"
#include "detkit/simplex.hpp"

namespace detkit {

/// One extended outcome (0 = no-click) per setting, per party.
struct DeterministicStrategy {
    std::vector<int> alice;
    std::vector<int> bob;
};

/// Number of single-party deterministic strategies (d+1)^settings.
inline std::uint64_t strategy_count(int settings, int d) {
    std::uint64_t n = 1;
    for (int i = 0; i < settings; ++i) n *= static_cast<std::uint64_t>(d) + 1;
    return n;
}

/// Number of deterministic strategy pairs (d+1)^{M_A} (d+1)^{M_B}.
inline std::uint64_t deterministic_pair_count(const Scenario &s) {
    return strategy_count(s.m_a, s.d) * strategy_count(s.m_b, s.d);
}

/// Outcome assigned to `setting` by single-party strategy `index`
/// (digits of the index in base d+1, setting 0 least significant).
inline int strategy_outcome(std::uint64_t index, int setting, int d) {
    const std::uint64_t base = static_cast<std::uint64_t>(d) + 1;
    for (int k = 0; k < setting; ++k) index /= base;
    return static_cast<int>(index % base);
}

/// Decodes a pair index (alice-major) into explicit assignments.
inline DeterministicStrategy decode_strategy_pair(const Scenario &s, std::uint64_t pair) {
    const std::uint64_t n_b = strategy_count(s.m_b, s.d);
    DeterministicStrategy out;
    out.alice.resize(s.m_a);
    out.bob.resize(s.m_b);
    for (int x = 0; x < s.m_a; ++x)
        out.alice[x] = strategy_outcome(pair / n_b, x, s.d);
    for (int y = 0; y < s.m_b; ++y)
        out.bob[y] = strategy_outcome(pair % n_b, y, s.d);
    return out;
}

/// Bell functional: one real coefficient per extended table entry,
/// laid out exactly like a LossyBehavior table.
struct BellFunctional {
    Scenario scenario;
    std::vector<double> coeffs;

    std::size_t index(int x, int y, int a, int b) const {
        const std::size_t ext = static_cast<std::size_t>(scenario.d) + 1;
        return ((static_cast<std::size_t>(x) * scenario.m_b + y) * ext + a) * ext + b;
    }
    double at(int x, int y, int a, int b) const { return coeffs[index(x, y, a, b)]; }
};

struct StrategyWeight {
    std::uint64_t pair_index = 0;
    double weight = 0.0;
};

struct LocalityCertificate {
    bool local = false;
    double tol = 0.0;

    // Local verdict: weights over deterministic strategy pairs.
    std::vector<StrategyWeight> weights;
    double reconstruction_error = 0.0;
    double weight_sum = 0.0;

    // Nonlocal verdict: separating functional.
    BellFunctional functional;
    double local_bound = 0.0;
    double value = 0.0;

    double lp_objective = 0.0;
    long lp_iterations = 0;
};

/// Table reproduced by a weight list (dense, LossyBehavior layout).
inline std::vector<double> reconstruct_weights(const Scenario &s,
                                               const std::vector<StrategyWeight> &weights) {
    const std::size_t ext = static_cast<std::size_t>(s.d) + 1;
    std::vector<double> table(s.setting_pairs() * ext * ext, 0.0);
    for (const StrategyWeight &sw : weights) {
        const DeterministicStrategy strat = decode_strategy_pair(s, sw.pair_index);
        for (int x = 0; x < s.m_a; ++x)
            for (int y = 0; y < s.m_b; ++y) {
                const std::size_t idx =
                    ((static_cast<std::size_t>(x) * s.m_b + y) * ext + strat.alice[x]) * ext +
                    strat.bob[y];
                table[idx] += sw.weight;
            }
    }
    return table;
}

/// Max over deterministic strategy pairs of the functional. For a
/// fixed Alice strategy the best Bob outcome decouples per setting, so
/// the maximization is exact at (d+1)^{M_A} * M_B * (d+1) cost instead
/// of a full pair enumeration.
inline double local_bound(const BellFunctional &f) {
    const Scenario &s = f.scenario;
    const std::uint64_t n_a = strategy_count(s.m_a, s.d);
    double best = -std::numeric_limits<double>::infinity();
    for (std::uint64_t ia = 0; ia < n_a; ++ia) {
        double total = 0.0;
        for (int y = 0; y < s.m_b; ++y) {
            double best_b = -std::numeric_limits<double>::infinity();
            for (int b = 0; b <= s.d; ++b) {
                double v = 0.0;
                for (int x = 0; x < s.m_a; ++x)
                    v += f.at(x, y, strategy_outcome(ia, x, s.d), b);
                best_b = std::max(best_b, v);
            }
            total += best_b;
        }
        best = std::max(best, total);
    }
    return best;
}

/// (functional value on p, local bound of the functional).
inline std::pair<double, double> bell_value(const LossyBehavior &p, const BellFunctional &f) {
    if (!(p.scenario() == f.scenario))
        throw ArgumentError("bell_value: scenario mismatch");
    if (f.coeffs.size() != p.table().size())
        throw ArgumentError("bell_value: coefficient table size mismatch");
    double v = 0.0;
    for (std::size_t i = 0; i < f.coeffs.size(); ++i) v += f.coeffs[i] * p.table()[i];
    return {v, local_bound(f)};
}

/// Canonical CHSH functional lifted to the extended alphabet: click
/// outcomes carry their +-1 signs, no-click contributes zero. Value
/// 2*sqrt(2) on the lossless Tsirelson behavior, local bound 2.
inline BellFunctional chsh_functional() {
    BellFunctional f;
    f.scenario = Scenario{2, 2, 2};
    f.coeffs.assign(2 * 2 * 3 * 3, 0.0);
    for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y) {
            const double sign = (x == 1 && y == 1) ? -1.0 : 1.0;
            for (int a = 1; a <= 2; ++a)
                for (int b = 1; b <= 2; ++b)
                    f.coeffs[f.index(x, y, a, b)] = sign * (a == 1 ? 1.0 : -1.0) *
                                                    (b == 1 ? 1.0 : -1.0);
        }
    return f;
}

/// Decides membership of p in the local polytope to tolerance tol.
///
/// Formulation: primal variables are weights over deterministic
/// strategy pairs, with one equality constraint per table entry plus
/// normalization. Pairs that place mass on an exactly-zero table entry
/// are dropped up front (their weight is forced to zero), which also
/// removes the matching all-zero constraints; the dual certificate is
/// extended back over the dropped rows with a large negative
/// coefficient so it stays valid for every strategy pair.
inline LocalityCertificate is_local(const LossyBehavior &p, double tol = 1e-9,
                                    const PhaseOneOptions &opt = {}) {
    p.validate(1e-9);
    const Scenario &s = p.scenario();
    const int ext = s.d + 1;
    const std::uint64_t n_a = strategy_count(s.m_a, s.d);
    const std::uint64_t n_b = strategy_count(s.m_b, s.d);

    // Support filter: a pair survives iff every setting pair lands on a
    // strictly positive table entry.
    std::vector<std::uint64_t> surviving;
    for (std::uint64_t ia = 0; ia < n_a; ++ia) {
        for (std::uint64_t ib = 0; ib < n_b; ++ib) {
            bool ok = true;
            for (int x = 0; x < s.m_a && ok; ++x)
                for (int y = 0; y < s.m_b && ok; ++y)
                    ok = p.at(x, y, strategy_outcome(ia, x, s.d),
                              strategy_outcome(ib, y, s.d)) > 0.0;
            if (ok) surviving.push_back(ia * n_b + ib);
        }
    }

    // Keep rows for strictly positive entries plus normalization.
    const std::size_t entries = s.setting_pairs() * ext * ext;
    std::vector<std::size_t> kept_rows;
    for (std::size_t i = 0; i < entries; ++i)
        if (p.table()[i] > 0.0) kept_rows.push_back(i);
    const std::size_t m = kept_rows.size() + 1;
    const std::size_t n = surviving.size();

    std::vector<std::size_t> row_of(entries, m); // entry -> kept row
    for (std::size_t r = 0; r < kept_rows.size(); ++r) row_of[kept_rows[r]] = r;

    std::vector<double> a(m * n, 0.0);
    std::vector<double> b(m, 0.0);
    for (std::size_t r = 0; r < kept_rows.size(); ++r) b[r] = p.table()[kept_rows[r]];
    b[m - 1] = 1.0;
    for (std::size_t j = 0; j < n; ++j) {
        const DeterministicStrategy strat = decode_strategy_pair(s, surviving[j]);
        for (int x = 0; x < s.m_a; ++x)
            for (int y = 0; y < s.m_b; ++y) {
                const std::size_t idx =
                    ((static_cast<std::size_t>(x) * s.m_b + y) * ext + strat.alice[x]) * ext +
                    strat.bob[y];
                a[row_of[idx] * n + j] = 1.0; // surviving pairs never hit dropped rows
            }
        a[(m - 1) * n + j] = 1.0;
    }

    const PhaseOneResult lp = phase_one_simplex(m, n, a, b, tol, opt);

    LocalityCertificate cert;
    cert.tol = tol;
    cert.lp_objective = lp.objective;
    cert.lp_iterations = lp.iterations;
    cert.local = lp.feasible;

    if (cert.local) {
        for (std::size_t j = 0; j < n; ++j)
            if (lp.solution[j] > 0.0)
                cert.weights.push_back({surviving[j], lp.solution[j]});
        const std::vector<double> recon = reconstruct_weights(s, cert.weights);
        double err = 0.0, sum = 0.0;
        for (std::size_t i = 0; i < entries; ++i)
            err = std::max(err, std::abs(recon[i] - p.table()[i]));
        for (const StrategyWeight &sw : cert.weights) sum += sw.weight;
        cert.reconstruction_error = err;
        cert.weight_sum = sum;
        if (err > tol)
            throw NumericalError("is_local: feasible LP but reconstruction exceeds tol", err);
        return cert;
    }

    // Farkas dual -> Bell functional. The dual component of the
    // normalization row shifts value and bound equally, so it is
    // dropped; dropped table rows get a coefficient low enough that no
    // strategy pair touching them can be optimal.
    cert.functional.scenario = s;
    cert.functional.coeffs.assign(entries, 0.0);
    double dual_l1 = 0.0;
    for (std::size_t r = 0; r < kept_rows.size(); ++r) {
        cert.functional.coeffs[kept_rows[r]] = lp.dual[r];
        dual_l1 += std::abs(lp.dual[r]);
    }
    const double k = 1.0 + dual_l1 + std::abs(lp.dual[m - 1]);
    for (std::size_t i = 0; i < entries; ++i)
        if (p.table()[i] == 0.0) cert.functional.coeffs[i] = -k;
    const auto [value, bound] = bell_value(p, cert.functional);
    cert.value = value;
    cert.local_bound = bound;
    if (!(value - bound > tol))
        throw NumericalError("is_local: infeasible LP but certificate violation too small",
                             value - bound);
    return cert;
}

struct CriticalEtaResult {
    bool has_transition = false;
    double eta = 1.0; ///< midpoint of the final bracket
    double local_below = 0.0;
    double nonlocal_above = 1.0;
};

/// Bisects the locality transition of apply_loss_both(q, eta) to
/// absolute width `width`. Reports no transition when the behavior is
/// local even without loss.
inline CriticalEtaResult critical_local_eta(const Behavior &q, double width = 1e-3,
                                            double lp_tol = 1e-9,
                                            const PhaseOneOptions &opt = {}) {
    if (width <= 0.0) throw ArgumentError("critical_local_eta: width must be positive");
    CriticalEtaResult res;
    if (is_local(apply_loss_both(q, 1.0), lp_tol, opt).local) return res; // no transition
    double lo = 0.0, hi = 1.0; // local at 0 (deterministic no-click), nonlocal at 1
    while (hi - lo > width) {
        const double mid = (lo + hi) / 2.0;
        if (is_local(apply_loss_both(q, mid), lp_tol, opt).local)
            lo = mid;
        else
            hi = mid;
    }
    res.has_transition = true;
    res.local_below = lo;
    res.nonlocal_above = hi;
    res.eta = (lo + hi) / 2.0;
    return res;
}

} // namespace detkit
