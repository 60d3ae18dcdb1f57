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
// df.hpp — Detection and construction of decoherence-free (DF) subsystems.
//
// A DF subsystem is a set of mode pairs that is neither driven by the input
// noise nor visible in the output field.  It is found as the intersection
// Ker(O) ∩ Ker(O Sigma_n) of kernels of the observability stack
// O = (C; CA; ...; CA^{2n-1}); the two kernels obey the duality
// Ker(O Sigma_n) = Ker(Ctrb^T) with the controllability stack
// Ctrb = (B, AB, ..., A^{2n-1}B).  The intersection is Sigma-invariant, so it
// carries a symplectic basis T1 = (v_1, Sigma^T v_1, v_2, ...); together with
// a symplectic basis T2 of the orthogonal complement, T = (T1, T2) block-
// diagonalizes the drift:
//     T^T A T = diag(Sigma_l G_DF, A2),   G_DF = T1^T G T1,
// and the input/output matrices lose their DF rows/columns (T1^T B = 0,
// C T1 = 0).  All tolerance checks use the max-abs norm; subspace agreement
// is measured by the sine of the largest principal angle.

#include <Eigen/Dense>

#include <algorithm>
#include <optional>
#include <string>

#include "dfls/errors.hpp"
#include "dfls/qls.hpp"

namespace dfls {

// ------------------------------ Kalman stacks -------------------------------

struct KalmanMatrices {
    Matrix ctrb;  // 2n x 2n*2m: (B, AB, ..., A^{2n-1}B)
    Matrix obsv;  // 2n*2m x 2n: (C; CA; ...; CA^{2n-1})
};

// Controllability/observability stacks with exactly 2n power terms.  Closed
// systems (m = 0) yield empty 2n x 0 and 0 x 2n matrices.
inline KalmanMatrices kalman_matrices(const QuantumLinearSystem& sys) {
    const int d = 2 * sys.modes;
    const int w = 2 * sys.fields;
    KalmanMatrices km;
    km.ctrb.resize(d, d * w);
    km.obsv.resize(d * w, d);
    Matrix ab = sys.B;  // A^k B
    Matrix ca = sys.C;  // C A^k
    for (int k = 0; k < d; ++k) {
        km.ctrb.middleCols(k * w, w) = ab;
        km.obsv.middleRows(k * w, w) = ca;
        if (k + 1 < d) {
            ab = sys.A * ab;
            ca = ca * sys.A;
        }
    }
    return km;
}

// ---------------------------- numerical kernels -----------------------------

struct KernelBasis {
    Matrix basis;   // orthonormal columns spanning the kernel
    int dim = 0;
    double tol_rank = 0.0;
};

// Kernel of M by SVD: directions whose singular value is at most
// tol_rank * sigma_max (sigma_max taken as 1 when M = 0).
inline KernelBasis kernel_basis(const Matrix& m, double tol_rank = 1e-9) {
    if (m.rows() < 1 || m.cols() < 1)
        throw InvalidDimensionError("kernel_basis: matrix must be nonempty");
    if (!(tol_rank > 0.0) || !(tol_rank < 1.0))
        throw ValidationError("kernel_basis: tol_rank must lie in (0, 1)");
    Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullV);
    const Vector& sv = svd.singularValues();
    double sigma_max = sv.size() > 0 ? sv(0) : 0.0;
    if (sigma_max == 0.0) sigma_max = 1.0;
    int rank = 0;
    for (int i = 0; i < sv.size(); ++i)
        if (sv(i) > tol_rank * sigma_max) ++rank;
    KernelBasis kb;
    kb.dim = static_cast<int>(m.cols()) - rank;
    kb.basis = svd.matrixV().rightCols(kb.dim);
    kb.tol_rank = tol_rank;
    return kb;
}

// Singular values (descending) of the stacked matrix (O; O Sigma_n) whose
// kernel is the DF subspace — useful for inspecting the rank gap.
inline Vector df_singular_values(const QuantumLinearSystem& sys) {
    if (sys.fields == 0)
        throw InvalidDimensionError("df_singular_values: closed system has an empty stack");
    const KalmanMatrices km = kalman_matrices(sys);
    Matrix stacked(2 * km.obsv.rows(), km.obsv.cols());
    stacked.topRows(km.obsv.rows()) = km.obsv;
    stacked.bottomRows(km.obsv.rows()) = km.obsv * symplectic_form(sys.modes);
    Eigen::JacobiSVD<Matrix> svd(stacked);
    return svd.singularValues();
}

// Sine of the largest principal angle between the column spans of two
// orthonormal bases (1.0 when the dimensions differ).
inline double subspace_gap_sin(const Matrix& u, const Matrix& w) {
    if (u.rows() != w.rows())
        throw InvalidDimensionError("subspace_gap_sin: bases must share the ambient space");
    if (u.cols() != w.cols()) return 1.0;
    if (u.cols() == 0) return 0.0;
    const Matrix residual = w - u * (u.transpose() * w);
    Eigen::JacobiSVD<Matrix> svd(residual);
    return svd.singularValues()(0);
}

// ------------------------------- DF subspace --------------------------------

// The DF subspace Ker(O) ∩ Ker(O Sigma_n), computed as the kernel of the
// stacked matrix (O; O Sigma_n).  Closed systems are entirely DF.  A DF
// subspace always has even dimension; an odd numerical answer means the rank
// decision is borderline at tol_rank.
inline KernelBasis df_subspace(const QuantumLinearSystem& sys, double tol_rank = 1e-9) {
    const int d = 2 * sys.modes;
    if (sys.fields == 0) return {Matrix::Identity(d, d), d, tol_rank};
    const KalmanMatrices km = kalman_matrices(sys);
    Matrix stacked(2 * km.obsv.rows(), d);
    stacked.topRows(km.obsv.rows()) = km.obsv;
    stacked.bottomRows(km.obsv.rows()) = km.obsv * symplectic_form(sys.modes);
    KernelBasis kb = kernel_basis(stacked, tol_rank);
    if (kb.dim % 2 != 0)
        throw IllConditionedRankError(
            "df_subspace: numerical kernel intersection has odd dimension " +
            std::to_string(kb.dim) + "; the rank decision is borderline — adjust tol_rank");
    return kb;
}

// ------------------------ symplectic basis construction ---------------------

namespace detail {

// Deterministic two-column step: pick the first standard basis vector with a
// significant projection onto the remainder span, normalize it to v, and pair
// it with Sigma^T v.  Deflating the pair keeps the remainder Sigma-invariant,
// so repeating consumes the whole subspace.
inline Matrix pair_symplectic_columns(Matrix remainder, const Matrix& sigma,
                                      const std::string& where) {
    const int d = static_cast<int>(remainder.rows());
    const int dim = static_cast<int>(remainder.cols());
    Matrix t(d, dim);
    for (int pair = 0; 2 * pair < dim; ++pair) {
        Vector v;
        for (int e = 0; e < d; ++e) {
            Vector cand = remainder * (remainder.transpose() * Vector::Unit(d, e));
            if (cand.norm() > 1e-6) {
                v = cand / cand.norm();
                break;
            }
        }
        if (v.size() == 0)
            throw DecompositionInconsistencyError(where + ": remainder span collapsed");
        Vector w = sigma.transpose() * v;
        w = remainder * (remainder.transpose() * w);  // numerical hygiene
        const double wn = w.norm();
        if (wn < 0.5)
            throw InvarianceViolationError(where +
                                           ": Sigma^T v left the subspace — span is not invariant");
        w /= wn;
        t.col(2 * pair) = v;
        t.col(2 * pair + 1) = w;
        const int left = dim - 2 * (pair + 1);
        if (left > 0) {
            Matrix deflated = remainder - v * (v.transpose() * remainder) -
                              w * (w.transpose() * remainder);
            Eigen::JacobiSVD<Matrix> svd(deflated, Eigen::ComputeFullU);
            remainder = svd.matrixU().leftCols(left);
        }
    }
    return t;
}

}  // namespace detail

// Symplectic orthonormal basis T1 = (v_1, Sigma^T v_1, ...) of a
// Sigma-invariant subspace; satisfies T1^T T1 = I and T1^T Sigma T1 = Sigma_l.
inline Matrix symplectic_df_basis(const KernelBasis& subspace, const SymplecticStructure& sigma,
                                  double tol = 1e-10) {
    const int d = 2 * sigma.modes;
    if (subspace.basis.rows() != d)
        throw InvalidDimensionError("symplectic_df_basis: basis does not match mode count");
    if (subspace.dim <= 0 || subspace.dim % 2 != 0)
        throw InvalidDimensionError("symplectic_df_basis: subspace dimension must be even and > 0");
    const Matrix& k = subspace.basis;
    // Span invariance under the form: Sigma^T K must stay inside span(K).
    const Matrix outside = sigma.sigma.transpose() * k - k * (k.transpose() * (sigma.sigma.transpose() * k));
    const double inv_residual = max_abs(outside);
    if (inv_residual > std::max(tol, 1e3 * subspace.tol_rank))
        throw InvarianceViolationError(
            "symplectic_df_basis: subspace is not invariant under the symplectic form, residual " +
            detail::fmt_num(inv_residual));

    const Matrix t1 = detail::pair_symplectic_columns(k, sigma.sigma, "symplectic_df_basis");

    const SymplecticCheck check = is_symplectic(t1, tol);
    const double orth = max_abs(Matrix(t1.transpose() * t1 - Matrix::Identity(subspace.dim, subspace.dim)));
    if (!check.symplectic || orth > tol)
        throw DecompositionInconsistencyError(
            "symplectic_df_basis: construction failed its own invariants (symplectic residual " +
            detail::fmt_num(check.residual) + ", orthonormality residual " + detail::fmt_num(orth) +
            ")");
    return t1;
}

// Symplectic orthonormal basis of the orthogonal complement of Range(T1).
// The complement of a Sigma-invariant span is Sigma-invariant, so the same
// pairing applies; returns a 2n x 0 matrix when T1 is square.
inline Matrix complement_basis(const Matrix& t1, const SymplecticStructure& sigma,
                               double tol = 1e-10) {
    const int d = 2 * sigma.modes;
    if (t1.rows() != d)
        throw InvalidDimensionError("complement_basis: T1 does not match mode count");
    const SymplecticCheck check = is_symplectic(t1, tol);
    if (!check.symplectic)
        throw InvarianceViolationError("complement_basis: T1 is not symplectic, residual " +
                                       detail::fmt_num(check.residual));
    const int dim = d - static_cast<int>(t1.cols());
    if (dim == 0) return Matrix(d, 0);
    Eigen::JacobiSVD<Matrix> svd(t1, Eigen::ComputeFullU);
    KernelBasis comp;
    comp.basis = svd.matrixU().rightCols(dim);
    comp.dim = dim;
    comp.tol_rank = 1e-12;
    return symplectic_df_basis(comp, sigma, tol);
}

// ----------------------------- block decomposition --------------------------

// Block decomposition in DF-ordered coordinates x' = (T1, T2)^T x:
//     drift  diag(A1, A2),  A1 = Sigma_l G_DF,  G_DF = T1^T G T1,
//     input  (0; B2),  output (0, C2),  diffusion  diag(0, D2).
struct DFDecomposition {
    int ell = 0;   // number of protected mode pairs
    Matrix t1;     // 2n x 2l
    Matrix t2;     // 2n x 2(n-l)
    Matrix g_df;   // 2l x 2l
    Matrix a1;     // 2l x 2l
    Matrix a2;     // 2(n-l) x 2(n-l)
    Matrix d2;     // 2(n-l) x 2(n-l)
    Matrix b2;     // 2(n-l) x 2m
    Matrix c2;     // 2m x 2(n-l)
};

// Restriction of the Hamiltonian matrix to the protected subspace.
inline Matrix df_hamiltonian(const Matrix& g, const Matrix& t1) {
    if (g.rows() != g.cols() || g.rows() != t1.rows())
        throw InvalidDimensionError("df_hamiltonian: dimension mismatch between G and T1");
    const Matrix restricted = t1.transpose() * g * t1;
    return 0.5 * (restricted + restricted.transpose());
}

inline std::optional<DFDecomposition> decompose(const QuantumLinearSystem& sys,
                                                double tol_rank = 1e-9) {
    const KernelBasis sub = df_subspace(sys, tol_rank);
    if (sub.dim == 0) return std::nullopt;
    const SymplecticStructure sigma(sys.modes);

    DFDecomposition dec;
    dec.ell = sub.dim / 2;
    dec.t1 = symplectic_df_basis(sub, sigma);
    dec.t2 = complement_basis(dec.t1, sigma);
    dec.g_df = df_hamiltonian(sys.G, dec.t1);
    dec.a1 = symplectic_form(dec.ell) * dec.g_df;
    dec.a2 = dec.t2.transpose() * sys.A * dec.t2;
    dec.d2 = dec.t2.transpose() * sys.D * dec.t2;
    const int n_diss = sys.modes - dec.ell;
    if (n_diss > 0 && sys.fields > 0)
        dec.b2 = symplectic_form(n_diss) * dec.t2.transpose() * sys.C.transpose() *
                 symplectic_form(sys.fields);
    else
        dec.b2 = Matrix::Zero(2 * n_diss, 2 * sys.fields);
    dec.c2 = sys.C * dec.t2;

    // Cross-checks: orthonormal symplectic frame and block-diagonal dynamics.
    const int d = 2 * sys.modes;
    Matrix t(d, d);
    t.leftCols(dec.t1.cols()) = dec.t1;
    t.rightCols(dec.t2.cols()) = dec.t2;
    const double orth = max_abs(Matrix(t.transpose() * t - Matrix::Identity(d, d)));
    const double sympl = std::max({is_symplectic(dec.t1).residual, is_symplectic(dec.t2).residual,
                                   max_abs(Matrix(dec.t1.transpose() * sigma.sigma * dec.t2))});
    if (orth > 1e-10 || sympl > 1e-10)
        throw DecompositionInconsistencyError(
            "decompose: basis frame failed orthonormal/symplectic checks (residuals " +
            detail::fmt_num(orth) + ", " + detail::fmt_num(sympl) + ")");

    const double bound_a = 100.0 * tol_rank * std::max(max_abs(sys.A), 1.0);
    const double bound_b = 100.0 * tol_rank * std::max(max_abs(sys.B), 1.0);
    const double bound_c = 100.0 * tol_rank * std::max(max_abs(sys.C), 1.0);
    const double r_ct1 = max_abs(Matrix(sys.C * dec.t1));
    const double r_a21 = max_abs(Matrix(dec.t2.transpose() * sys.A * dec.t1));
    const double r_a12 = max_abs(Matrix(dec.t1.transpose() * sys.A * dec.t2));
    const double r_b1 = max_abs(Matrix(dec.t1.transpose() * sys.B));
    const double r_a1 = max_abs(Matrix(dec.t1.transpose() * sys.A * dec.t1 - dec.a1));
    if (r_ct1 > bound_c || r_a21 > bound_a || r_a12 > bound_a || r_b1 > bound_b ||
        r_a1 > std::max(1e-9 * std::max(max_abs(sys.A), 1.0), bound_a))
        throw DecompositionInconsistencyError(
            "decompose: block residuals exceed tolerance (C*T1 " + detail::fmt_num(r_ct1) +
            ", T2'*A*T1 " + detail::fmt_num(r_a21) + ", T1'*A*T2 " + detail::fmt_num(r_a12) +
            ", T1'*B " + detail::fmt_num(r_b1) + ", A1 mismatch " + detail::fmt_num(r_a1) + ")");
    return dec;
}

// --------------------- Hamiltonian compatibility check ----------------------

// Does adding the Hamiltonian matrix G keep Range(T1) a DF subspace of the
// coupling described by C?  When Ker(C) = Ker(C Sigma) the zero test
// C G T1 = 0 is necessary and sufficient; otherwise only the sufficient
// invariance test ||(I - T1 T1^T) G T1|| <= tol * ||G|| is available and the
// result is flagged sufficient_only (a failure is then inconclusive).
struct HamiltonianDFCheck {
    bool preserves = false;
    bool sufficient_only = false;
    double residual = 0.0;
};

inline HamiltonianDFCheck hamiltonian_preserves_df(const Matrix& g, const Matrix& t1,
                                                   const Matrix& c, double tol = 1e-9) {
    const int d = static_cast<int>(t1.rows());
    if (d % 2 != 0 || d == 0)
        throw InvalidDimensionError("hamiltonian_preserves_df: ambient dimension must be even");
    if (g.rows() != d || g.cols() != d)
        throw InvalidDimensionError("hamiltonian_preserves_df: G must be 2n x 2n");
    if (c.cols() != d)
        throw InvalidDimensionError("hamiltonian_preserves_df: C must have 2n columns");
    const Matrix sigma = symplectic_form(d / 2);

    bool kernels_match = true;
    if (c.rows() > 0) {
        const KernelBasis ker_c = kernel_basis(c, 1e-9);
        const KernelBasis ker_cs = kernel_basis(Matrix(c * sigma), 1e-9);
        kernels_match = ker_c.dim == ker_cs.dim &&
                        subspace_gap_sin(ker_c.basis, ker_cs.basis) <= 1e-8;
    }

    HamiltonianDFCheck result;
    if (kernels_match) {
        result.residual = max_abs(Matrix(c * g * t1));
        result.preserves = result.residual <= tol * max_abs(c) * max_abs(g);
        result.sufficient_only = false;
    } else {
        const Matrix drift_out = g * t1 - t1 * (t1.transpose() * (g * t1));
        result.residual = max_abs(drift_out);
        result.preserves = result.residual <= tol * max_abs(g);
        result.sufficient_only = true;
    }
    return result;
}

}  // namespace dfls
