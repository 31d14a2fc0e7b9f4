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
 * Small dense Born-rule evaluator: a shared state plus per-setting POVMs
 * generate Behavior tables. All in-scope examples have local dimension
 * <= 4, so everything is dense Eigen arithmetic.
 */

#pragma once

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "detkit/scenario.hpp"

namespace detkit {

using Cmatrix = Eigen::MatrixXcd;

/// Tolerance for eigenvalue-based positivity checks.
inline constexpr double kPsdTol = 1e-10;

/// Kronecker product, smallest-possible implementation for the dense
/// low-dimensional matrices used here.
inline Cmatrix kron(const Cmatrix &lhs, const Cmatrix &rhs) {
    Cmatrix out(lhs.rows() * rhs.rows(), lhs.cols() * rhs.cols());
    for (Eigen::Index i = 0; i < lhs.rows(); ++i)
        for (Eigen::Index j = 0; j < lhs.cols(); ++j)
            out.block(i * rhs.rows(), j * rhs.cols(), rhs.rows(), rhs.cols()) =
                lhs(i, j) * rhs;
    return out;
}

/// Shared state and local POVMs; povms_a[x][a] is the operator for
/// outcome a of Alice's setting x.
struct QuantumModel {
    int dim_a = 0;
    int dim_b = 0;
    Cmatrix state; ///< density matrix on dim_a * dim_b
    std::vector<std::vector<Cmatrix>> povms_a;
    std::vector<std::vector<Cmatrix>> povms_b;

    Scenario scenario() const {
        return Scenario{static_cast<int>(povms_a.size()),
                        static_cast<int>(povms_b.size()),
                        povms_a.empty() ? 2 : static_cast<int>(povms_a[0].size())};
    }

    void validate() const;
};

namespace detail {

inline double hermiticity_residual(const Cmatrix &m) {
    return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

inline double min_eigenvalue(const Cmatrix &m) {
    Eigen::SelfAdjointEigenSolver<Cmatrix> es((m + m.adjoint()) / 2.0);
    return es.eigenvalues().minCoeff();
}

inline void validate_povm(const std::vector<Cmatrix> &elements, int dim,
                          const std::string &label) {
    if (elements.empty())
        throw ArgumentError("QuantumModel: empty POVM for " + label);
    Cmatrix sum = Cmatrix::Zero(dim, dim);
    for (const Cmatrix &e : elements) {
        if (e.rows() != dim || e.cols() != dim)
            throw ArgumentError("QuantumModel: POVM dimension mismatch for " + label);
        if (min_eigenvalue(e) < -kPsdTol)
            throw ArgumentError("QuantumModel: POVM element not positive for " + label);
        sum += e;
    }
    if ((sum - Cmatrix::Identity(dim, dim)).cwiseAbs().maxCoeff() > kPsdTol)
        throw ArgumentError("QuantumModel: POVM does not sum to identity for " + label);
}

} // namespace detail

inline void QuantumModel::validate() const {
    if (dim_a < 1 || dim_b < 1)
        throw ArgumentError("QuantumModel: local dimensions must be >= 1");
    const int dim = dim_a * dim_b;
    if (state.rows() != dim || state.cols() != dim)
        throw ArgumentError("QuantumModel: state dimension mismatch");
    if (std::abs(state.trace().real() - 1.0) > kTableTol ||
        std::abs(state.trace().imag()) > kTableTol)
        throw ArgumentError("QuantumModel: state trace != 1");
    if (detail::hermiticity_residual(state) > kTableTol)
        throw ArgumentError("QuantumModel: state not Hermitian");
    if (detail::min_eigenvalue(state) < -kPsdTol)
        throw ArgumentError("QuantumModel: state not positive semidefinite");
    const std::size_t d = povms_a.empty() ? 0 : povms_a[0].size();
    for (std::size_t x = 0; x < povms_a.size(); ++x) {
        if (povms_a[x].size() != d)
            throw ArgumentError("QuantumModel: uneven outcome counts on Alice");
        detail::validate_povm(povms_a[x], dim_a, "A[" + std::to_string(x) + "]");
    }
    for (std::size_t y = 0; y < povms_b.size(); ++y) {
        if (povms_b[y].size() != d)
            throw ArgumentError("QuantumModel: uneven outcome counts on Bob");
        detail::validate_povm(povms_b[y], dim_b, "B[" + std::to_string(y) + "]");
    }
}

/// Q(ab|xy) = Tr[state (A_xa (x) B_yb)].
inline Behavior born_behavior(const QuantumModel &model) {
    model.validate();
    const Scenario s = model.scenario();
    Behavior q = Behavior::zeros(s);
    for (int x = 0; x < s.m_a; ++x)
        for (int y = 0; y < s.m_b; ++y)
            for (int a = 0; a < s.d; ++a)
                for (int b = 0; b < s.d; ++b) {
                    const std::complex<double> v =
                        (model.state * kron(model.povms_a[x][a], model.povms_b[y][b]))
                            .trace();
                    q.at(x, y, a, b) = v.real();
                }
    q.validate(1e-10);
    return q;
}

} // namespace detkit
