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
 * Bound randomness: the tripartite no-signalling box P(abe|xyz) in
 * which Eve's input z = (xbar, ybar) selects the setting pair whose
 * outcomes she will know with certainty, while Alice and Bob observe
 * the unchanged two-sided lossy statistics. A behavior that is still
 * nonlocal at the efficiency where this box exists carries randomness
 * that no-signalling eavesdroppers can nevertheless fully learn after
 * the fact.
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "detkit/lossy.hpp"
#include "detkit/polytope.hpp"
#include "detkit/scenario.hpp"

namespace detkit {

/// Tripartite table P(abe|xyz), with a, b and both components of
/// e = (e_a, e_b) over the extended alphabet {0, 1..d} (0 = no-click)
/// and z ranging over all setting pairs. Flat row-major over
/// (z, x, y, e_a, e_b, a, b) with z = xbar * m_b + ybar.
class TripartiteBox {
  public:
    TripartiteBox() = default;

    explicit TripartiteBox(Scenario s) : scenario_(s) {
        s.validate();
        const std::size_t ext = static_cast<std::size_t>(s.d) + 1;
        const std::size_t per_z = s.setting_pairs() * ext * ext * ext * ext;
        table_.assign(s.setting_pairs() * per_z, 0.0);
    }

    const Scenario &scenario() const { return scenario_; }
    const std::vector<double> &table() const { return table_; }
    std::size_t ext() const { return static_cast<std::size_t>(scenario_.d) + 1; }
    int num_z() const { return scenario_.m_a * scenario_.m_b; }

    std::size_t index(int z, int x, int y, int ea, int eb, int a, int b) const {
        const std::size_t e = ext();
        return (((((static_cast<std::size_t>(z) * scenario_.m_a + x) * scenario_.m_b + y) *
                      e + ea) * e + eb) * e + a) * e + b;
    }

    double at(int z, int x, int y, int ea, int eb, int a, int b) const {
        return table_[index(z, x, y, ea, eb, a, b)];
    }
    double &at(int z, int x, int y, int ea, int eb, int a, int b) {
        return table_[index(z, x, y, ea, eb, a, b)];
    }

    /// Sum over Eve: the bipartite behavior seen by Alice and Bob under
    /// Eve's input z.
    LossyBehavior marginal_ab(int z) const {
        LossyBehavior p = LossyBehavior::zeros(scenario_);
        const int e = static_cast<int>(ext());
        for (int x = 0; x < scenario_.m_a; ++x)
            for (int y = 0; y < scenario_.m_b; ++y)
                for (int ea = 0; ea < e; ++ea)
                    for (int eb = 0; eb < e; ++eb)
                        for (int a = 0; a < e; ++a)
                            for (int b = 0; b < e; ++b)
                                p.at(x, y, a, b) += at(z, x, y, ea, eb, a, b);
        return p;
    }

  private:
    Scenario scenario_;
    std::vector<double> table_;
};

/// Builds the box by running the primary attack independently on each
/// side with single-setting targets {xbar} and {ybar} for every
/// z = (xbar, ybar). Feasibility of the single-target attack at equal
/// efficiencies requires eta <= 1/2; the non-targeted settings then
/// click with survival tau = eta/(1-eta) in the untouched branch.
inline TripartiteBox build_box(const Behavior &q, double eta) {
    if (!(eta >= 0.0 && eta <= 0.5 + 1e-15))
        throw InfeasibleError("build_box: per-side single-target attack needs eta <= 1/2",
                              0.5 - eta);
    eta = std::min(eta, 0.5);
    q.validate();
    const Scenario &s = q.scenario();
    TripartiteBox box(s);
    const double tau = eta < 1.0 ? eta / (1.0 - eta) : 1.0;
    const double w_ii = eta * eta;
    const double w_io = eta * (1.0 - eta); // measured Alice side, idle Bob side
    const double w_oo = (1.0 - eta) * (1.0 - eta);

    for (int xbar = 0; xbar < s.m_a; ++xbar)
        for (int ybar = 0; ybar < s.m_b; ++ybar) {
            const int z = xbar * s.m_b + ybar;
            for (int x = 0; x < s.m_a; ++x)
                for (int y = 0; y < s.m_b; ++y) {
                    // Both sides in branch (i): Eve measured (xbar, ybar)
                    // and obtained e = (ea, eb) ~ Q(ea eb | xbar ybar).
                    for (int ea = 0; ea < s.d; ++ea)
                        for (int eb = 0; eb < s.d; ++eb) {
                            const double v = w_ii * q.at(xbar, ybar, ea, eb);
                            if (v == 0.0) continue;
                            const int a = (x == xbar) ? ea + 1 : 0;
                            const int b = (y == ybar) ? eb + 1 : 0;
                            box.at(z, x, y, ea + 1, eb + 1, a, b) += v;
                        }

                    // Alice side measured, Bob side untouched: e_b = 0;
                    // Bob's device blanks ybar and clicks elsewhere with
                    // probability tau, outcome from the conditional state.
                    for (int ea = 0; ea < s.d; ++ea) {
                        const int a = (x == xbar) ? ea + 1 : 0;
                        if (y == ybar) {
                            const double v = w_io * q.alice_marginal(xbar, ea, y);
                            if (v != 0.0) box.at(z, x, y, ea + 1, 0, a, 0) += v;
                        } else {
                            for (int b = 0; b < s.d; ++b) {
                                const double v = w_io * tau * q.at(xbar, y, ea, b);
                                if (v != 0.0) box.at(z, x, y, ea + 1, 0, a, b + 1) += v;
                            }
                            const double v =
                                w_io * (1.0 - tau) * q.alice_marginal(xbar, ea, y);
                            if (v != 0.0) box.at(z, x, y, ea + 1, 0, a, 0) += v;
                        }
                    }

                    // Mirror case: Bob side measured, Alice side untouched.
                    for (int eb = 0; eb < s.d; ++eb) {
                        const int b = (y == ybar) ? eb + 1 : 0;
                        if (x == xbar) {
                            const double v = w_io * q.bob_marginal(ybar, eb, x);
                            if (v != 0.0) box.at(z, x, y, 0, eb + 1, 0, b) += v;
                        } else {
                            for (int a = 0; a < s.d; ++a) {
                                const double v = w_io * tau * q.at(x, ybar, a, eb);
                                if (v != 0.0) box.at(z, x, y, 0, eb + 1, a + 1, b) += v;
                            }
                            const double v = w_io * (1.0 - tau) * q.bob_marginal(ybar, eb, x);
                            if (v != 0.0) box.at(z, x, y, 0, eb + 1, 0, b) += v;
                        }
                    }

                    // Both sides untouched: e = (0, 0); targeted settings
                    // blank, the rest click with survival tau.
                    if (x == xbar && y == ybar) {
                        box.at(z, x, y, 0, 0, 0, 0) += w_oo;
                    } else if (x == xbar) {
                        for (int b = 0; b < s.d; ++b)
                            box.at(z, x, y, 0, 0, 0, b + 1) +=
                                w_oo * tau * q.bob_marginal(y, b, x);
                        box.at(z, x, y, 0, 0, 0, 0) += w_oo * (1.0 - tau);
                    } else if (y == ybar) {
                        for (int a = 0; a < s.d; ++a)
                            box.at(z, x, y, 0, 0, a + 1, 0) +=
                                w_oo * tau * q.alice_marginal(x, a, y);
                        box.at(z, x, y, 0, 0, 0, 0) += w_oo * (1.0 - tau);
                    } else {
                        for (int a = 0; a < s.d; ++a) {
                            for (int b = 0; b < s.d; ++b)
                                box.at(z, x, y, 0, 0, a + 1, b + 1) +=
                                    w_oo * tau * tau * q.at(x, y, a, b);
                            box.at(z, x, y, 0, 0, a + 1, 0) +=
                                w_oo * tau * (1.0 - tau) * q.alice_marginal(x, a, y);
                        }
                        for (int b = 0; b < s.d; ++b)
                            box.at(z, x, y, 0, 0, 0, b + 1) +=
                                w_oo * tau * (1.0 - tau) * q.bob_marginal(y, b, x);
                        box.at(z, x, y, 0, 0, 0, 0) += w_oo * (1.0 - tau) * (1.0 - tau);
                    }
                }
        }
    return box;
}

/// Probability that Eve's record equals the implemented outcomes when
/// the parties measure exactly the pair she targeted, e = (a, b) given
/// (x, y) = z. Exactly 1 for boxes built here: no branch ever places
/// mass off the diagonal at the targeted settings.
inline double guess_success(const TripartiteBox &box, int z) {
    const Scenario &s = box.scenario();
    if (z < 0 || z >= box.num_z()) throw ArgumentError("guess_success: z out of range");
    const int x = z / s.m_b;
    const int y = z % s.m_b;
    const int e = static_cast<int>(box.ext());
    double diag = 0.0, total = 0.0;
    for (int ea = 0; ea < e; ++ea)
        for (int eb = 0; eb < e; ++eb)
            for (int a = 0; a < e; ++a)
                for (int b = 0; b < e; ++b) {
                    const double v = box.at(z, x, y, ea, eb, a, b);
                    total += v;
                    if (a == ea && b == eb) diag += v;
                }
    return diag / total;
}

/// Residuals of every marginal-independence (no-signalling) constraint
/// of the tripartite box: each subset of parties must have marginals
/// independent of the remaining inputs. Residual = largest spread of a
/// marginal entry across the foreign inputs.
struct NoSignallingReport {
    double ab_vs_z = 0.0;  ///< P(ab|xy) independent of z
    double ae_vs_y = 0.0;  ///< P(a e|x z) independent of y
    double be_vs_x = 0.0;  ///< P(b e|y z) independent of x
    double a_vs_yz = 0.0;  ///< P(a|x) independent of (y, z)
    double b_vs_xz = 0.0;  ///< P(b|y) independent of (x, z)
    double e_vs_xy = 0.0;  ///< P(e|z) independent of (x, y)
    double max_residual = 0.0;
    bool pass = false;
};

inline NoSignallingReport verify_no_signalling(const TripartiteBox &box, double tol = kTableTol) {
    const Scenario &s = box.scenario();
    const int e = static_cast<int>(box.ext());
    const int nz = box.num_z();
    NoSignallingReport rep;

    auto spread = [](double lo, double hi) { return hi - lo; };

    // P(ab|xy) vs z.
    for (int x = 0; x < s.m_a; ++x)
        for (int y = 0; y < s.m_b; ++y)
            for (int a = 0; a < e; ++a)
                for (int b = 0; b < e; ++b) {
                    double lo = 2.0, hi = -1.0;
                    for (int z = 0; z < nz; ++z) {
                        double v = 0.0;
                        for (int ea = 0; ea < e; ++ea)
                            for (int eb = 0; eb < e; ++eb) v += box.at(z, x, y, ea, eb, a, b);
                        lo = std::min(lo, v);
                        hi = std::max(hi, v);
                    }
                    rep.ab_vs_z = std::max(rep.ab_vs_z, spread(lo, hi));
                }

    // P(a e|x z) vs y.
    for (int z = 0; z < nz; ++z)
        for (int x = 0; x < s.m_a; ++x)
            for (int ea = 0; ea < e; ++ea)
                for (int eb = 0; eb < e; ++eb)
                    for (int a = 0; a < e; ++a) {
                        double lo = 2.0, hi = -1.0;
                        for (int y = 0; y < s.m_b; ++y) {
                            double v = 0.0;
                            for (int b = 0; b < e; ++b) v += box.at(z, x, y, ea, eb, a, b);
                            lo = std::min(lo, v);
                            hi = std::max(hi, v);
                        }
                        rep.ae_vs_y = std::max(rep.ae_vs_y, spread(lo, hi));
                    }

    // P(b e|y z) vs x.
    for (int z = 0; z < nz; ++z)
        for (int y = 0; y < s.m_b; ++y)
            for (int ea = 0; ea < e; ++ea)
                for (int eb = 0; eb < e; ++eb)
                    for (int b = 0; b < e; ++b) {
                        double lo = 2.0, hi = -1.0;
                        for (int x = 0; x < s.m_a; ++x) {
                            double v = 0.0;
                            for (int a = 0; a < e; ++a) v += box.at(z, x, y, ea, eb, a, b);
                            lo = std::min(lo, v);
                            hi = std::max(hi, v);
                        }
                        rep.be_vs_x = std::max(rep.be_vs_x, spread(lo, hi));
                    }

    // Single-party marginals vs both foreign inputs.
    for (int x = 0; x < s.m_a; ++x)
        for (int a = 0; a < e; ++a) {
            double lo = 2.0, hi = -1.0;
            for (int z = 0; z < nz; ++z)
                for (int y = 0; y < s.m_b; ++y) {
                    double v = 0.0;
                    for (int ea = 0; ea < e; ++ea)
                        for (int eb = 0; eb < e; ++eb)
                            for (int b = 0; b < e; ++b) v += box.at(z, x, y, ea, eb, a, b);
                    lo = std::min(lo, v);
                    hi = std::max(hi, v);
                }
            rep.a_vs_yz = std::max(rep.a_vs_yz, spread(lo, hi));
        }
    for (int y = 0; y < s.m_b; ++y)
        for (int b = 0; b < e; ++b) {
            double lo = 2.0, hi = -1.0;
            for (int z = 0; z < nz; ++z)
                for (int x = 0; x < s.m_a; ++x) {
                    double v = 0.0;
                    for (int ea = 0; ea < e; ++ea)
                        for (int eb = 0; eb < e; ++eb)
                            for (int a = 0; a < e; ++a) v += box.at(z, x, y, ea, eb, a, b);
                    lo = std::min(lo, v);
                    hi = std::max(hi, v);
                }
            rep.b_vs_xz = std::max(rep.b_vs_xz, spread(lo, hi));
        }
    for (int z = 0; z < nz; ++z)
        for (int ea = 0; ea < e; ++ea)
            for (int eb = 0; eb < e; ++eb) {
                double lo = 2.0, hi = -1.0;
                for (int x = 0; x < s.m_a; ++x)
                    for (int y = 0; y < s.m_b; ++y) {
                        double v = 0.0;
                        for (int a = 0; a < e; ++a)
                            for (int b = 0; b < e; ++b) v += box.at(z, x, y, ea, eb, a, b);
                        lo = std::min(lo, v);
                        hi = std::max(hi, v);
                    }
                rep.e_vs_xy = std::max(rep.e_vs_xy, spread(lo, hi));
            }

    rep.max_residual = std::max({rep.ab_vs_z, rep.ae_vs_y, rep.be_vs_x, rep.a_vs_yz,
                                 rep.b_vs_xz, rep.e_vs_xy});
    rep.pass = rep.max_residual <= tol;
    return rep;
}

/// Largest deviation between the Eve-marginalized box and the honest
/// two-sided lossy behavior, maximized over z: the statement that the
/// attack changes nothing Alice and Bob can see.
inline double marginal_reproduction_residual(const TripartiteBox &box, const LossyBehavior &lossy) {
    double worst = 0.0;
    for (int z = 0; z < box.num_z(); ++z) {
        const LossyBehavior m = box.marginal_ab(z);
        for (std::size_t i = 0; i < m.table().size(); ++i)
            worst = std::max(worst, std::abs(m.table()[i] - lossy.table()[i]));
    }
    return worst;
}

/// Full bound-randomness certificate: the lossy behavior must be
/// nonlocal, and the box must reproduce it, be no-signalling, and give
/// Eve certainty on every targeted pair.
struct BoundRandomnessCertificate {
    double eta = 0.0;
    double eq_marginal_residual = 0.0; ///< box vs lossy behavior
    NoSignallingReport no_signalling;
    double min_guess_success = 0.0;
    bool nonlocal = false;
    LocalityCertificate locality;
    bool pass = false;
};

inline BoundRandomnessCertificate certify_bound_randomness(const Behavior &q, double eta,
                                                           double table_tol = kTableTol,
                                                           double lp_tol = 1e-9) {
    BoundRandomnessCertificate cert;
    cert.eta = eta;
    const LossyBehavior lossy = apply_loss_both(q, eta);
    const TripartiteBox box = build_box(q, eta);

    cert.eq_marginal_residual = marginal_reproduction_residual(box, lossy);
    cert.no_signalling = verify_no_signalling(box, table_tol);
    cert.min_guess_success = 1.0;
    for (int z = 0; z < box.num_z(); ++z)
        cert.min_guess_success = std::min(cert.min_guess_success, guess_success(box, z));

    cert.locality = is_local(lossy, lp_tol);
    cert.nonlocal = !cert.locality.local;

    cert.pass = cert.nonlocal && cert.eq_marginal_residual <= table_tol &&
                cert.no_signalling.pass && std::abs(cert.min_guess_success - 1.0) <= table_tol;
    return cert;
}

} // namespace detkit
