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
 * Dense phase-I simplex for equality-form feasibility problems
 *
 *     find w >= 0 with A w = b,   b >= 0,
 *
 * by minimizing the total artificial mass. Termination with a positive
 * objective yields a Farkas vector y (y^T A <= 0, y^T b > 0), which is
 * exactly the separating Bell functional needed upstream; termination
 * at zero yields a basic feasible solution whose L1 constraint residual
 * is bounded by the objective. Dantzig pricing with a permanent switch
 * to Bland's rule once the objective stalls, so degenerate instances
 * terminate.
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "detkit/errors.hpp"

namespace detkit {

struct PhaseOneOptions {
    long max_iterations = 200000;
    long stall_limit = 500;      ///< non-improving pivots before Bland mode
    double pivot_tol = 1e-9;     ///< minimum magnitude of a pivot element
    double price_tol = 1e-10;    ///< reduced-cost threshold for entering
    std::size_t max_tableau_entries = 50'000'000;
};

struct PhaseOneResult {
    bool feasible = false;
    double objective = 0.0;        ///< minimized sum of artificials
    std::vector<double> solution;  ///< structural values (size n), feasible case
    std::vector<double> dual;      ///< Farkas vector (size m), infeasible case
    long iterations = 0;
};

/// Solves the phase-I problem for a dense row-major m x n matrix.
/// The caller decides what "feasible" means by comparing `objective`
/// against its own tolerance; the `feasible` flag uses feas_tol.
inline PhaseOneResult phase_one_simplex(std::size_t m, std::size_t n,
                                        const std::vector<double> &a,
                                        const std::vector<double> &b, double feas_tol,
                                        const PhaseOneOptions &opt = {}) {
    if (a.size() != m * n) throw ArgumentError("phase_one_simplex: matrix size mismatch");
    if (b.size() != m) throw ArgumentError("phase_one_simplex: rhs size mismatch");
    for (double v : b)
        if (v < 0.0) throw ArgumentError("phase_one_simplex: rhs must be nonnegative");

    const std::size_t cols = n + m + 1; // structural | artificial | rhs
    if ((m + 1) * cols > opt.max_tableau_entries)
        throw ArgumentError("phase_one_simplex: tableau would exceed the dense size limit");

    std::vector<double> t((m + 1) * cols, 0.0); // last row = reduced costs
    auto row = [&](std::size_t i) { return t.data() + i * cols; };
    double *cost = row(m);

    for (std::size_t i = 0; i < m; ++i) {
        double *r = row(i);
        for (std::size_t j = 0; j < n; ++j) r[j] = a[i * n + j];
        r[n + i] = 1.0;
        r[cols - 1] = b[i];
    }
    // Reduced costs for basis = artificials: r_j = -sum_i A_ij,
    // objective row rhs = -sum_i b_i.
    for (std::size_t i = 0; i < m; ++i) {
        const double *r = row(i);
        for (std::size_t j = 0; j < n; ++j) cost[j] -= r[j];
        cost[cols - 1] -= r[cols - 1];
    }

    std::vector<std::size_t> basis(m);
    for (std::size_t i = 0; i < m; ++i) basis[i] = n + i;
    std::vector<char> banned(n + m, 0); // artificials may not re-enter

    PhaseOneResult res;
    bool bland = false;
    long stall = 0;
    double last_obj = -cost[cols - 1];

    for (res.iterations = 0; res.iterations < opt.max_iterations; ++res.iterations) {
        // Entering column: most negative reduced cost (Dantzig), or the
        // lowest-indexed negative one in Bland mode.
        std::size_t enter = cols;
        double best = -opt.price_tol;
        for (std::size_t j = 0; j < n + m; ++j) {
            if (banned[j]) continue;
            const double c = cost[j];
            if (c < best) {
                enter = j;
                best = c;
                if (bland) break;
            }
        }
        if (enter == cols) break; // optimal

        // Ratio test.
        std::size_t leave = m;
        double best_ratio = 0.0, best_pivot = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            const double piv = row(i)[enter];
            if (piv <= opt.pivot_tol) continue;
            const double ratio = row(i)[cols - 1] / piv;
            const bool better =
                leave == m || ratio < best_ratio - 1e-14 ||
                (ratio <= best_ratio + 1e-14 &&
                 (bland ? basis[i] < basis[leave] : std::abs(piv) > std::abs(best_pivot)));
            if (better) {
                leave = i;
                best_ratio = ratio;
                best_pivot = piv;
            }
        }
        if (leave == m)
            throw NumericalError("phase_one_simplex: unbounded pivot column (numerical)",
                                 -best);

        // Pivot.
        double *pr = row(leave);
        const double piv = pr[enter];
        for (std::size_t j = 0; j < cols; ++j) pr[j] /= piv;
        pr[enter] = 1.0;
        for (std::size_t i = 0; i <= m; ++i) {
            if (i == leave) continue;
            double *ri = row(i);
            const double f = ri[enter];
            if (f == 0.0) continue;
            for (std::size_t j = 0; j < cols; ++j) ri[j] -= f * pr[j];
            ri[enter] = 0.0;
        }
        if (basis[leave] >= n) banned[basis[leave]] = 1;
        basis[leave] = enter;

        const double obj = -cost[cols - 1];
        if (obj < last_obj - 1e-13) {
            stall = 0;
            last_obj = obj;
        } else if (++stall > opt.stall_limit) {
            bland = true;
        }
    }
    if (res.iterations >= opt.max_iterations)
        throw NumericalError("phase_one_simplex: iteration limit reached",
                             -cost[cols - 1]);

    res.objective = std::max(0.0, -cost[cols - 1]);
    res.feasible = res.objective <= feas_tol;
    if (res.feasible) {
        res.solution.assign(n, 0.0);
        for (std::size_t i = 0; i < m; ++i)
            if (basis[i] < n) res.solution[basis[i]] = std::max(0.0, row(i)[cols - 1]);
    } else {
        // y_i = c_art - reduced cost of artificial column i.
        res.dual.assign(m, 0.0);
        for (std::size_t i = 0; i < m; ++i) res.dual[i] = 1.0 - cost[n + i];
    }
    return res;
}

} // namespace detkit
