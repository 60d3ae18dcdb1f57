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
// gaussian.hpp — Gaussian moment dynamics and state metrics.
//
// First and second moments of a Gaussian state obey
//     d<x>/dt = A <x>,     dV/dt = A V + V A^T + D,
// solved exactly by exponentiating the affine generator on vec(V).  A
// fixed-step 4th-order Runge–Kutta integrator is kept behind an option as an
// independent cross-check.  The module also provides the unique steady
// covariance of a Hurwitz drift, a spectral stability certificate for
// decomposed systems (the DF/dissipative correlation block of V decays iff
// every pairwise sum Re eig(A1) + Re eig(A2) is negative), and Gaussian state
// metrics: physicality (V + i Sigma/2 >= 0), purity 1/sqrt(det 2V), and the
// two-mode logarithmic negativity from the partial transpose.

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "dfls/errors.hpp"
#include "dfls/qls.hpp"

namespace dfls {

// ------------------------------- physicality --------------------------------

// Minimum eigenvalue of the uncertainty matrix V + i Sigma/2 (>= 0 iff V is a
// physical covariance).
inline double uncertainty_min_eig(const Matrix& v, int n_modes) {
    if (v.rows() != 2 * n_modes || v.cols() != 2 * n_modes)
        throw InvalidDimensionError("uncertainty_min_eig: V must be 2n x 2n");
    using C = std::complex<double>;
    ComplexMatrix h = v.cast<C>() + C(0.0, 0.5) * symplectic_form(n_modes).cast<C>();
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h);
    if (es.info() != Eigen::Success)
        throw Error("uncertainty_min_eig: eigensolver failed");
    return es.eigenvalues().minCoeff();
}

// ------------------------------- moment flows -------------------------------

struct GaussianMoments {
    Vector mean;  // 2n
    Matrix cov;   // 2n x 2n symmetric
};

enum class EvolveMethod {
    exact,  // exponentiate the affine vec(V) generator; exact per grid time
    rk4,    // fixed-step classical Runge-Kutta; independent cross-check
};

struct EvolveOptions {
    bool allow_unphysical = false;  // skip the initial-state uncertainty check
    EvolveMethod method = EvolveMethod::exact;
    double rk4_max_step = 1e-3;
    double tol_psd = 1e-9;
};

namespace detail {

inline void validate_moment_inputs(const Matrix& a, const Matrix& d, const GaussianMoments& m0,
                                   const std::vector<double>& t_grid, const EvolveOptions& opts) {
    const int dim = static_cast<int>(a.rows());
    if (dim == 0 || dim % 2 != 0 || a.cols() != dim)
        throw InvalidDimensionError("evolve_moments: A must be square with even dimension");
    if (d.rows() != dim || d.cols() != dim)
        throw InvalidDimensionError("evolve_moments: D must match A");
    if (max_abs(d - d.transpose()) > 1e-12 * std::max(max_abs(d), 1.0))
        throw ValidationError("evolve_moments: D must be symmetric");
    if (m0.mean.size() != dim || m0.cov.rows() != dim || m0.cov.cols() != dim)
        throw InvalidDimensionError("evolve_moments: initial moments must match A");
    if (max_abs(m0.cov - m0.cov.transpose()) > 1e-12 * std::max(max_abs(m0.cov), 1.0))
        throw ValidationError("evolve_moments: initial covariance must be symmetric");
    if (t_grid.empty() || t_grid.front() != 0.0)
        throw ValidationError("evolve_moments: time grid must start at 0");
    for (size_t i = 1; i < t_grid.size(); ++i)
        if (!(t_grid[i] > t_grid[i - 1]))
            throw ValidationError("evolve_moments: time grid must be strictly increasing");
    if (!opts.allow_unphysical) {
        const double min_eig = uncertainty_min_eig(m0.cov, dim / 2);
        if (min_eig < -opts.tol_psd)
            throw UncertaintyViolationError(
                "evolve_moments: initial covariance violates the uncertainty bound "
                "(min eig of V + i Sigma/2 is " + detail::fmt_num(min_eig) +
                "); pass allow_unphysical to override");
    }
}

}  // namespace detail

// Moments at each grid time.  The grid must start at 0 and increase strictly.
inline std::vector<GaussianMoments> evolve_moments(const Matrix& a, const Matrix& d,
                                                   const GaussianMoments& initial,
                                                   const std::vector<double>& t_grid,
                                                   const EvolveOptions& opts = {}) {
    detail::validate_moment_inputs(a, d, initial, t_grid, opts);
    const int dim = static_cast<int>(a.rows());
    std::vector<GaussianMoments> out;
    out.reserve(t_grid.size());

    if (opts.method == EvolveMethod::exact) {
        // Affine augmentation: d/dt [vec(V); 1] = [[A (+) A, vec(D)]; [0, 0]],
        // with A (+) A = I⊗A + A⊗I acting on column-major vec(V).
        const Matrix eye = Matrix::Identity(dim, dim);
        Matrix gen = Matrix::Zero(dim * dim + 1, dim * dim + 1);
        gen.topLeftCorner(dim * dim, dim * dim) =
            Eigen::kroneckerProduct(eye, a) + Eigen::kroneckerProduct(a, eye);
        gen.topRightCorner(dim * dim, 1) =
            Eigen::Map<const Vector>(d.data(), dim * dim);
        const Eigen::Map<const Vector> vec_v0(initial.cov.data(), dim * dim);
        for (double t : t_grid) {
            GaussianMoments m;
            m.mean = (a * t).exp() * initial.mean;
            const Matrix big = (gen * t).exp();
            Vector vec_v = big.topLeftCorner(dim * dim, dim * dim) * vec_v0 +
                           big.topRightCorner(dim * dim, 1);
            Matrix v = Eigen::Map<Matrix>(vec_v.data(), dim, dim);
            m.cov = 0.5 * (v + v.transpose());
            out.push_back(std::move(m));
        }
        return out;
    }

    // Fixed-step RK4 on (mean, V) through consecutive grid intervals.
    Vector mean = initial.mean;
    Matrix v = initial.cov;
    const auto dv = [&](const Matrix& x) -> Matrix { return a * x + x * a.transpose() + d; };
    out.push_back({mean, v});
    for (size_t i = 1; i < t_grid.size(); ++i) {
        const double span = t_grid[i] - t_grid[i - 1];
        const int steps = std::max(1, static_cast<int>(std::ceil(span / opts.rk4_max_step)));
        const double h = span / steps;
        for (int s = 0; s < steps; ++s) {
            const Vector k1m = a * mean;
            const Vector k2m = a * (mean + 0.5 * h * k1m);
            const Vector k3m = a * (mean + 0.5 * h * k2m);
            const Vector k4m = a * (mean + h * k3m);
            const Matrix k1 = dv(v);
            const Matrix k2 = dv(v + 0.5 * h * k1);
            const Matrix k3 = dv(v + 0.5 * h * k2);
            const Matrix k4 = dv(v + h * k3);
            mean += (h / 6.0) * (k1m + 2.0 * k2m + 2.0 * k3m + k4m);
            v += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            v = 0.5 * (v + v.transpose());
        }
        out.push_back({mean, v});
    }
    return out;
}

// Unique steady covariance of a Hurwitz drift: A V + V A^T + D = 0.
inline Matrix steady_covariance(const Matrix& a, const Matrix& d) {
    const int dim = static_cast<int>(a.rows());
    if (dim == 0 || a.cols() != dim)
        throw InvalidDimensionError("steady_covariance: A must be square and nonempty");
    if (d.rows() != dim || d.cols() != dim)
        throw InvalidDimensionError("steady_covariance: D must match A");
    Eigen::EigenSolver<Matrix> es(a);
    if (es.info() != Eigen::Success) throw Error("steady_covariance: eigensolver failed");
    const double max_re = es.eigenvalues().real().maxCoeff();
    if (!(max_re < 0.0))
        throw NoSteadyStateError("steady_covariance: drift is not Hurwitz (max Re eig = " +
                                 detail::fmt_num(max_re) + ")");
    const Matrix eye = Matrix::Identity(dim, dim);
    const Matrix gen = Eigen::kroneckerProduct(eye, a) + Eigen::kroneckerProduct(a, eye);
    const Eigen::Map<const Vector> vec_d(d.data(), dim * dim);
    Vector vec_v = Eigen::FullPivLU<Matrix>(gen).solve(-vec_d);
    Matrix v = Eigen::Map<Matrix>(vec_v.data(), dim, dim);
    v = 0.5 * (v + v.transpose());
    const double residual = max_abs(a * v + v * a.transpose() + d);
    if (residual > 1e-9 * (max_abs(a) * max_abs(v) + max_abs(d) + 1.0))
        throw Error("steady_covariance: solver residual " + detail::fmt_num(residual) +
                    " exceeds tolerance");
    return v;
}

// --------------------------- stability certificate --------------------------

// Certificate for a decomposed system (drift diag(Sigma_l G_DF, A2)): the
// DF/dissipative correlation block of the covariance decays iff every pairwise
// eigenvalue sum lies strictly left of the margin.  When G_DF >= 0 the DF
// spectrum is purely imaginary and the test reduces to A2 alone being Hurwitz
// (the shortcut); both paths are computed and must agree.
struct StabilityReport {
    Eigen::VectorXcd eig_a1;  // spectrum of Sigma_l G_DF
    Eigen::VectorXcd eig_a2;  // spectrum of A2
    double worst_pair_real = -std::numeric_limits<double>::infinity();
    bool stable = false;
    bool marginal = false;      // worst pair within +-tol_margin of the axis
    bool a2_hurwitz = false;
    bool gdf_psd = false;
    bool shortcut_used = false;
};

inline StabilityReport stability_certificate(const Matrix& g_df, const Matrix& a2,
                                             double tol_margin = 1e-10) {
    if (g_df.rows() != g_df.cols() || g_df.rows() % 2 != 0)
        throw InvalidDimensionError("stability_certificate: G_DF must be square with even dimension");
    if (a2.rows() != a2.cols() || a2.rows() % 2 != 0)
        throw InvalidDimensionError("stability_certificate: A2 must be square with even dimension");
    if (!(tol_margin > 0.0))
        throw ValidationError("stability_certificate: tol_margin must be positive");

    StabilityReport rep;
    const int l2 = static_cast<int>(g_df.rows());
    if (l2 > 0) {
        if (max_abs(g_df - g_df.transpose()) > 1e-12 * std::max(max_abs(g_df), 1.0))
            throw InvalidHamiltonianError("stability_certificate: G_DF must be symmetric");
        const Matrix g_sym = 0.5 * (g_df + g_df.transpose());
        const Matrix a1 = symplectic_form(l2 / 2) * g_sym;
        Eigen::EigenSolver<Matrix> es1(a1);
        if (es1.info() != Eigen::Success) throw Error("stability_certificate: eigensolver failed");
        rep.eig_a1 = es1.eigenvalues();
        Eigen::SelfAdjointEigenSolver<Matrix> esg(g_sym);
        rep.gdf_psd = esg.eigenvalues().minCoeff() >= -1e-10;
    } else {
        rep.gdf_psd = true;
    }
    if (a2.rows() > 0) {
        Eigen::EigenSolver<Matrix> es2(a2);
        if (es2.info() != Eigen::Success) throw Error("stability_certificate: eigensolver failed");
        rep.eig_a2 = es2.eigenvalues();
        rep.a2_hurwitz = es2.eigenvalues().real().maxCoeff() < -tol_margin;
    } else {
        rep.a2_hurwitz = true;  // vacuous: no dissipative block
    }

    if (rep.eig_a1.size() > 0 && rep.eig_a2.size() > 0)
        rep.worst_pair_real =
            rep.eig_a1.real().maxCoeff() + rep.eig_a2.real().maxCoeff();
    rep.stable = rep.worst_pair_real < -tol_margin;
    rep.marginal = std::abs(rep.worst_pair_real) <= tol_margin;
    rep.shortcut_used = rep.gdf_psd;

    if (rep.shortcut_used && rep.eig_a1.size() > 0 && rep.eig_a2.size() > 0 &&
        rep.stable != rep.a2_hurwitz) {
        // With a purely imaginary DF spectrum the two verdicts can only differ
        // by the numerical width of Re eig(A1); anything larger is a bug.
        const double fuzz = rep.eig_a1.real().cwiseAbs().maxCoeff();
        const double a2_max = rep.eig_a2.real().maxCoeff();
        if (std::abs(rep.worst_pair_real - a2_max) > std::max(10.0 * fuzz, 1e-12))
            throw Error("stability_certificate: pairwise and shortcut verdicts disagree");
    }
    return rep;
}

// Frobenius norm of the off-diagonal DF/dissipative block of a covariance in
// DF-ordered coordinates (rows 1..2l against columns 2l+1..2n).
inline double correlation_block_norm(const Matrix& v, int ell) {
    const int dim = static_cast<int>(v.rows());
    if (dim == 0 || dim % 2 != 0 || v.cols() != dim)
        throw InvalidDimensionError("correlation_block_norm: V must be square with even dimension");
    if (ell < 0 || 2 * ell > dim)
        throw InvalidDimensionError("correlation_block_norm: block size out of range");
    return v.block(0, 2 * ell, 2 * ell, dim - 2 * ell).norm();
}

// ------------------------------- state metrics ------------------------------

// Purity 1/sqrt(det 2V) of a Gaussian state; 1 for pure states.
inline double purity(const Matrix& v) {
    const int dim = static_cast<int>(v.rows());
    if (dim == 0 || dim % 2 != 0 || v.cols() != dim)
        throw InvalidDimensionError("purity: V must be square with even dimension");
    const double det2v = Matrix(2.0 * v).determinant();
    if (det2v < 1.0 - 1e-6)
        throw UnphysicalStateError("purity: det(2V) = " + detail::fmt_num(det2v) +
                                   " is below 1; covariance is unphysical");
    return 1.0 / std::sqrt(det2v);
}

struct StateMetrics {
    double purity = 0.0;
    double log_negativity = 0.0;
    Vector symplectic_eigs_pt;  // symplectic spectrum of the partial transpose
};

// Logarithmic negativity of a two-mode Gaussian state: partially transpose by
// flipping p2, take the symplectic spectrum nu of the result as |eig(Sigma V~)|,
// and return E_N = max(0, -ln(2 nu_min)).
inline StateMetrics log_negativity_two_mode(const Matrix& v) {
    if (v.rows() != 4 || v.cols() != 4)
        throw InvalidDimensionError("log_negativity_two_mode: V must be 4 x 4 (two modes)");
    if (max_abs(v - v.transpose()) > 1e-12 * std::max(max_abs(v), 1.0))
        throw ValidationError("log_negativity_two_mode: V must be symmetric");
    if (uncertainty_min_eig(v, 2) < -1e-9)
        throw UnphysicalStateError(
            "log_negativity_two_mode: covariance violates the uncertainty bound");

    StateMetrics metrics;
    metrics.purity = purity(v);

    Matrix flip = Matrix::Identity(4, 4);
    flip(3, 3) = -1.0;
    const Matrix v_pt = flip * v * flip;
    Eigen::EigenSolver<Matrix> es(symplectic_form(2) * v_pt);
    if (es.info() != Eigen::Success) throw Error("log_negativity_two_mode: eigensolver failed");
    Vector mags = es.eigenvalues().cwiseAbs();
    std::sort(mags.data(), mags.data() + mags.size());
    metrics.symplectic_eigs_pt = Vector(2);
    metrics.symplectic_eigs_pt << 0.5 * (mags(0) + mags(1)), 0.5 * (mags(2) + mags(3));
    const double nu_min = metrics.symplectic_eigs_pt(0);
    metrics.log_negativity = std::max(0.0, -std::log(2.0 * nu_min));
    return metrics;
}

}  // namespace dfls
