// Copyright 2026 The dfls Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once
// qls.hpp — Linear open quantum systems in quadrature form: the symplectic
// structure, assembly of the drift/input/output/diffusion matrices from a
// Hamiltonian matrix G and complex coupling vectors, and the permutation
// between interleaved (q1,p1,...,qn,pn) and grouped (q1..qn,p1..pn) bases.
//
// Conventions (hbar = 1): the canonical commutator is [x, xT] = i*Sigma with
// Sigma_n = diag{S,...,S}, S = [[0,1],[-1,0]], and the vacuum covariance is
// I/2.  A field coupling operator L_i = c_i^T x is described by the complex
// vector c_i; the matrices of the moment dynamics are
//     A = Sigma_n (G + C^T Sigma_m C / 2),   C = sqrt(2) (Re c_1, Im c_1, ...)^T,
//     B = Sigma_n C^T Sigma_m,               D = Sigma_n^T C^T C Sigma_n / 2,
// so that d<x>/dt = A<x> and dV/dt = AV + VA^T + D, with D = B B^T / 2.
// All tolerance checks in this header use the max-abs norm.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "dfls/errors.hpp"

namespace dfls {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

// Max-abs norm with the convention that an empty matrix has norm 0.
inline double max_abs(const Matrix& m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

// ----------------------------- symplectic form -----------------------------

// The 2n x 2n form diag{S,...,S}, S = [[0,1],[-1,0]], interleaved ordering.
inline Matrix symplectic_form(int n_modes) {
    if (n_modes < 1)
        throw InvalidDimensionError("symplectic_form: mode count must be >= 1");
    Matrix sigma = Matrix::Zero(2 * n_modes, 2 * n_modes);
    for (int j = 0; j < n_modes; ++j) {
        sigma(2 * j, 2 * j + 1) = 1.0;
        sigma(2 * j + 1, 2 * j) = -1.0;
    }
    return sigma;
}

// Mode count bundled with its form; antisymmetric by construction.
struct SymplecticStructure {
    int modes;
    Matrix sigma;

    explicit SymplecticStructure(int n_modes)
        : modes(n_modes), sigma(symplectic_form(n_modes)) {}
};

// --------------------------- basis permutations -----------------------------

// Permutation between the grouped ordering (q1..qn, p1..pn) and the
// interleaved ordering (q1,p1,...,qn,pn) used everywhere else in the library.
// matrix() returns P with x_grouped = P x_interleaved; quadratic forms and
// operators M written in grouped coordinates become P^T M P interleaved.
struct ModeBasisPermutation {
    int modes;
    std::vector<int> order;  // order[k] = grouped index of interleaved coord k

    explicit ModeBasisPermutation(int n_modes) : modes(n_modes) {
        if (n_modes < 1)
            throw InvalidDimensionError("basis_permutation: mode count must be >= 1");
        order.resize(2 * n_modes);
        for (int j = 0; j < n_modes; ++j) {
            order[2 * j] = j;
            order[2 * j + 1] = n_modes + j;
        }
    }

    Matrix matrix() const {
        Matrix p = Matrix::Zero(2 * modes, 2 * modes);
        for (int k = 0; k < 2 * modes; ++k) p(order[k], k) = 1.0;
        return p;
    }

    Matrix to_interleaved(const Matrix& grouped) const {
        check_square(grouped, "to_interleaved");
        const Matrix p = matrix();
        return p.transpose() * grouped * p;
    }

    Matrix to_grouped(const Matrix& interleaved) const {
        check_square(interleaved, "to_grouped");
        const Matrix p = matrix();
        return p * interleaved * p.transpose();
    }

    ComplexVector vector_to_interleaved(const ComplexVector& grouped) const {
        check_vector(grouped, "vector_to_interleaved");
        return matrix().transpose().cast<std::complex<double>>() * grouped;
    }

    ComplexVector vector_to_grouped(const ComplexVector& interleaved) const {
        check_vector(interleaved, "vector_to_grouped");
        return matrix().cast<std::complex<double>>() * interleaved;
    }

  private:
    void check_square(const Matrix& m, const char* where) const {
        if (m.rows() != 2 * modes || m.cols() != 2 * modes)
            throw InvalidDimensionError(std::string("basis_permutation::") + where +
                                        ": matrix must be 2n x 2n");
    }
    void check_vector(const ComplexVector& v, const char* where) const {
        if (v.size() != 2 * modes)
            throw InvalidDimensionError(std::string("basis_permutation::") + where +
                                        ": vector must have length 2n");
    }
};

inline ModeBasisPermutation basis_permutation(int n_modes) {
    return ModeBasisPermutation(n_modes);
}

// ------------------------------ system assembly -----------------------------

// A linear open quantum system with n modes and m input fields, together with
// the assembled matrices of its moment dynamics.  Immutable by convention:
// build one with assemble_system and treat the fields as read-only.
struct QuantumLinearSystem {
    int modes = 0;    // n
    int fields = 0;   // m (0 = closed system)
    Matrix G;         // 2n x 2n symmetric Hamiltonian matrix
    std::vector<ComplexVector> couplings;  // m coupling vectors, each length 2n
    Matrix A;         // drift, 2n x 2n
    Matrix B;         // input, 2n x 2m
    Matrix C;         // output, 2m x 2n
    Matrix D;         // diffusion, 2n x 2n
};

inline QuantumLinearSystem assemble_system(int n_modes, int n_fields,
                                           const Matrix& G,
                                           const std::vector<ComplexVector>& couplings,
                                           double tol_sym = 1e-12) {
    if (n_modes < 1)
        throw InvalidDimensionError("assemble_system: mode count must be >= 1");
    if (n_fields < 0)
        throw InvalidDimensionError("assemble_system: field count must be >= 0");
    if (static_cast<int>(couplings.size()) != n_fields)
        throw InvalidDimensionError("assemble_system: expected " +
                                    std::to_string(n_fields) + " coupling vectors, got " +
                                    std::to_string(couplings.size()));
    const int d = 2 * n_modes;
    if (G.rows() != d || G.cols() != d)
        throw InvalidDimensionError("assemble_system: G must be 2n x 2n");
    const double g_scale = std::max(max_abs(G), 1.0);
    if (max_abs(G - G.transpose()) > tol_sym * g_scale)
        throw InvalidHamiltonianError("assemble_system: G is not symmetric at tol " +
                                      detail::fmt_num(tol_sym));
    for (const ComplexVector& c : couplings)
        if (c.size() != d)
            throw InvalidDimensionError("assemble_system: coupling vectors must have length 2n");

    QuantumLinearSystem sys;
    sys.modes = n_modes;
    sys.fields = n_fields;
    sys.G = 0.5 * (G + G.transpose());
    sys.couplings = couplings;

    Matrix c_mat(2 * n_fields, d);
    for (int i = 0; i < n_fields; ++i) {
        c_mat.row(2 * i) = std::sqrt(2.0) * couplings[i].real().transpose();
        c_mat.row(2 * i + 1) = std::sqrt(2.0) * couplings[i].imag().transpose();
    }
    sys.C = c_mat;

    const Matrix sigma_n = symplectic_form(n_modes);
    if (n_fields == 0) {
        sys.A = sigma_n * sys.G;
        sys.B = Matrix::Zero(d, 0);
        sys.D = Matrix::Zero(d, d);
    } else {
        const Matrix sigma_m = symplectic_form(n_fields);
        sys.A = sigma_n * (sys.G + c_mat.transpose() * sigma_m * c_mat / 2.0);
        sys.B = sigma_n * c_mat.transpose() * sigma_m;
        sys.D = sigma_n.transpose() * c_mat.transpose() * c_mat * sigma_n / 2.0;
    }
    return sys;
}

// The four dynamics matrices, re-verifying the diffusion identity D = B B^T/2.
struct SystemMatrices {
    Matrix A, B, C, D;
};

inline SystemMatrices system_matrices(const QuantumLinearSystem& sys) {
    const Matrix bbt_half = 0.5 * sys.B * sys.B.transpose();
    const double scale = std::max(max_abs(sys.D), 1.0);
    const double residual = max_abs(sys.D - bbt_half);
    if (residual > 1e-12 * scale)
        throw DecompositionInconsistencyError(
            "system_matrices: diffusion identity D = B B^T/2 violated, residual " +
            detail::fmt_num(residual));
    return {sys.A, sys.B, sys.C, sys.D};
}

// ------------------------------ symplectic test -----------------------------

struct SymplecticCheck {
    bool symplectic = false;
    double residual = 0.0;
};

// T (2n x 2k, k <= n) has symplectically orthonormal columns iff
// T^T Sigma_n T = Sigma_k; residual is the max-abs deviation.
inline SymplecticCheck is_symplectic(const Matrix& T, double tol = 1e-10) {
    if (T.rows() % 2 != 0 || T.cols() % 2 != 0)
        throw InvalidDimensionError("is_symplectic: dimensions must be even");
    if (T.cols() > T.rows())
        throw InvalidDimensionError("is_symplectic: more columns than rows");
    if (T.cols() == 0) return {true, 0.0};
    const int n = static_cast<int>(T.rows()) / 2;
    const int k = static_cast<int>(T.cols()) / 2;
    const Matrix r = T.transpose() * symplectic_form(n) * T - symplectic_form(k);
    const double residual = max_abs(r);
    return {residual <= tol, residual};
}

// System rewritten in the coordinates x' = T^T x for a square symplectic T:
// G' = T^T G T and c_i' = T^T c_i, reassembled from scratch.  For orthogonal
// symplectic T the drift transforms as A' = T^T A T.
inline QuantumLinearSystem transform_system(const QuantumLinearSystem& sys, const Matrix& T,
                                            double tol = 1e-10) {
    const int d = 2 * sys.modes;
    if (T.rows() != d || T.cols() != d)
        throw InvalidDimensionError("transform_system: T must be 2n x 2n");
    const SymplecticCheck check = is_symplectic(T, tol);
    if (!check.symplectic)
        throw InvarianceViolationError("transform_system: T is not symplectic, residual " +
                                       detail::fmt_num(check.residual));
    std::vector<ComplexVector> couplings;
    couplings.reserve(sys.couplings.size());
    const ComplexMatrix tt = T.transpose().cast<std::complex<double>>();
    for (const ComplexVector& c : sys.couplings) couplings.push_back(tt * c);
    return assemble_system(sys.modes, sys.fields, T.transpose() * sys.G * T, couplings);
}

}  // namespace dfls
