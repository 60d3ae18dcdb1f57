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
// scenarios.hpp — Concrete physical models and their parameter engineering.
//
// Builders return fully assembled systems in the interleaved quadrature
// ordering:
//   * dissipative_pair / dispersive_pair — two particles in a common cavity
//     field, coupled through both quadratures (b1 + b2) or through positions
//     only (q1 + q2); the antisymmetric mode (q1-q2, p1-p2)/sqrt(2) is
//     protected in both cases.
//   * optomech — a mechanical oscillator coupled to a damped cavity, with an
//     optional auxiliary mode whose inverse mass mu and spring constant nu
//     are tunable; solve_optomech_df picks (mu, nu) so a protected mode pair
//     appears.
//   * ring_trap — three unit-mass particles in a ring cavity with springs
//     k (1-2), k2 (2-3), k3 (3-1); solve_ring_df picks (omega', k2, k3) so
//     the antisymmetric/breathing pair decouples with a positive definite
//     restricted Hamiltonian.
//   * tms_covariance — the pure two-mode squeezed covariance produced by
//     mixing a squeezed protected mode with a vacuum dissipative mode.

#include <Eigen/Dense>

#include <cmath>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "dfls/df.hpp"
#include "dfls/errors.hpp"
#include "dfls/gaussian.hpp"
#include "dfls/qls.hpp"

namespace dfls {

// ----------------------------- coupled pairs --------------------------------

namespace detail {

inline void check_pair_blocks(const Matrix& g1, const Matrix& g2, const char* who) {
    if (g1.rows() != 2 || g1.cols() != 2 || g2.rows() != 2 || g2.cols() != 2)
        throw InvalidDimensionError(std::string(who) + ": G1 and G2 must be 2 x 2");
}

inline Matrix pair_hamiltonian(const Matrix& g1, const Matrix& g2) {
    Matrix g(4, 4);
    g.topLeftCorner(2, 2) = g1;
    g.topRightCorner(2, 2) = g2;
    g.bottomLeftCorner(2, 2) = g2;
    g.bottomRightCorner(2, 2) = g1;
    return g;
}

}  // namespace detail

// Two modes coupled to one field through both quadratures:
// c = sqrt(kappa/2) (1, i, 1, i).
inline QuantumLinearSystem dissipative_pair(double kappa, const Matrix& g1, const Matrix& g2) {
    if (!(kappa > 0.0)) throw ValidationError("dissipative_pair: kappa must be positive");
    detail::check_pair_blocks(g1, g2, "dissipative_pair");
    ComplexVector c(4);
    const std::complex<double> i(0.0, 1.0);
    c << 1.0, i, 1.0, i;
    c *= std::sqrt(kappa / 2.0);
    return assemble_system(2, 1, detail::pair_hamiltonian(g1, g2), {c});
}

// Two modes coupled to one field through positions only (a continuous
// measurement of q1 + q2): c = sqrt(kappa/2) (1, 0, 1, 0).
inline QuantumLinearSystem dispersive_pair(double kappa, const Matrix& g1, const Matrix& g2) {
    if (!(kappa > 0.0)) throw ValidationError("dispersive_pair: kappa must be positive");
    detail::check_pair_blocks(g1, g2, "dispersive_pair");
    ComplexVector c(4);
    c << 1.0, 0.0, 1.0, 0.0;
    c *= std::sqrt(kappa / 2.0);
    return assemble_system(2, 1, detail::pair_hamiltonian(g1, g2), {c});
}

// --------------------------- optomechanical chain ---------------------------

struct OptomechExtension {
    double g;   // auxiliary-to-cavity coupling rate
    double mu;  // auxiliary inverse mass
    double nu;  // auxiliary (negated) spring constant
};

// Mechanical oscillator (mode 1, mass/frequency mass/omega) coupled at rate
// gamma to a cavity (mode 2) that decays at rate kappa; the optional third
// mode couples to the cavity at rate ext.g and has Hamiltonian
// (mu p3^2 - nu q3^2)/2.
inline QuantumLinearSystem optomech(double mass, double omega, double gamma, double kappa,
                                    const std::optional<OptomechExtension>& ext = std::nullopt) {
    if (!(mass > 0.0)) throw ValidationError("optomech: mass must be positive");
    if (!(omega > 0.0)) throw ValidationError("optomech: omega must be positive");
    if (!(kappa > 0.0)) throw ValidationError("optomech: kappa must be positive");
    const int n = ext ? 3 : 2;
    Matrix g = Matrix::Zero(2 * n, 2 * n);
    g(0, 0) = mass * omega * omega;
    g(1, 1) = 1.0 / mass;
    g(0, 2) = g(2, 0) = -gamma;
    if (ext) {
        g(2, 4) = g(4, 2) = -ext->g;
        g(4, 4) = -ext->nu;
        g(5, 5) = ext->mu;
    }
    ComplexVector c = ComplexVector::Zero(2 * n);
    c(2) = std::sqrt(kappa);
    c(3) = std::complex<double>(0.0, std::sqrt(kappa));
    return assemble_system(n, 1, g, {c});
}

// Pick the auxiliary parameters (mu, nu) that create a protected mode pair:
// matching the auxiliary to the mechanical oscillator gives mu = 1/mass and
// nu = -mass omega^2 (so mu*nu = -omega^2).  The analytic solution is
// verified by re-assembling the system and checking that the Kalman stack
// actually drops rank.
inline std::pair<double, double> solve_optomech_df(double mass, double omega, double gamma,
                                                   double kappa, double g) {
    if (!(mass > 0.0)) throw ValidationError("solve_optomech_df: mass must be positive");
    if (!(omega > 0.0)) throw ValidationError("solve_optomech_df: omega must be positive");
    if (!(kappa > 0.0)) throw ValidationError("solve_optomech_df: kappa must be positive");
    if (g == 0.0) throw ValidationError("solve_optomech_df: coupling g must be nonzero");
    const double mu = 1.0 / mass;
    const double nu = -mass * omega * omega;
    const QuantumLinearSystem sys =
        optomech(mass, omega, gamma, kappa, OptomechExtension{g, mu, nu});
    const KernelBasis sub = df_subspace(sys);
    if (sub.dim < 2)
        throw EngineeringInfeasibleError(
            "solve_optomech_df: engineered system exposes no protected subspace");
    return {mu, nu};
}

// -------------------------------- ring trap ---------------------------------

// Three unit-mass particles in a ring cavity, all coupled to one decaying
// field (c = sqrt(kappa/2) (1,1,1,i,i,i) in grouped coordinates).  Particles
// 1 and 2 are trapped at omega, particle 3 at omega_p; springs k between
// 1-2, k2 between 2-3, and k3 between 3-1.
inline QuantumLinearSystem ring_trap(double omega, double omega_p, double k, double k2,
                                     double k3, double kappa) {
    if (!(omega > 0.0)) throw ValidationError("ring_trap: omega must be positive");
    if (!(omega_p > 0.0)) throw ValidationError("ring_trap: omega_p must be positive");
    if (!(kappa > 0.0)) throw ValidationError("ring_trap: kappa must be positive");
    if (k < 0.0 || k2 < 0.0 || k3 < 0.0)
        throw ValidationError("ring_trap: spring constants must be nonnegative");

    Matrix gq(3, 3);
    gq << omega * omega + k + k3, -k, -k3,
          -k, omega * omega + k + k2, -k2,
          -k3, -k2, omega_p * omega_p + k2 + k3;
    Matrix g_grouped = Matrix::Zero(6, 6);
    g_grouped.topLeftCorner(3, 3) = gq;
    g_grouped.bottomRightCorner(3, 3) = Matrix::Identity(3, 3);

    ComplexVector c_grouped(6);
    const std::complex<double> i(0.0, 1.0);
    c_grouped << 1.0, 1.0, 1.0, i, i, i;
    c_grouped *= std::sqrt(kappa / 2.0);

    const ModeBasisPermutation perm = basis_permutation(3);
    return assemble_system(3, 1, perm.to_interleaved(g_grouped),
                           {perm.vector_to_interleaved(c_grouped)});
}

// The protected basis of the ring trap in the gauge used by the closed-form
// analysis: q-space directions (1,-1,0)/sqrt(2) and (1,1,-2)/sqrt(6), each
// paired with its momentum partner.  Columns: (v1, Sigma^T v1, v2, Sigma^T v2).
inline Matrix ring_trap_df_basis() {
    Vector t1(3), t2(3);
    t1 << 1.0 / std::sqrt(2.0), -1.0 / std::sqrt(2.0), 0.0;
    t2 << 1.0 / std::sqrt(6.0), 1.0 / std::sqrt(6.0), -2.0 / std::sqrt(6.0);
    Matrix basis = Matrix::Zero(6, 4);
    for (int j = 0; j < 3; ++j) {
        basis(2 * j, 0) = t1(j);      // q components of v1
        basis(2 * j + 1, 1) = t1(j);  // p components of Sigma^T v1
        basis(2 * j, 2) = t2(j);
        basis(2 * j + 1, 3) = t2(j);
    }
    return basis;
}

// Pick (omega_p, k2, k3) so the ring trap exposes a protected two-mode pair
// whose restricted Hamiltonian has the same structure as the bare two-particle
// system: omega_p = omega (from the compatibility condition C G T1 = 0) and
// k2 + k3 = 2k with the split k2 = sqrt(3) k, k3 = (2 - sqrt(3)) k.  The
// result is verified by re-assembling and certifying stability.
inline std::tuple<double, double, double> solve_ring_df(double omega, double k) {
    if (!(omega > 0.0)) throw ValidationError("solve_ring_df: omega must be positive");
    if (k < 0.0) throw ValidationError("solve_ring_df: spring constant must be nonnegative");
    const double omega_p = omega;
    const double k2 = std::sqrt(3.0) * k;
    const double k3 = (2.0 - std::sqrt(3.0)) * k;

    const QuantumLinearSystem sys = ring_trap(omega, omega_p, k, k2, k3, 1.0);
    const std::optional<DFDecomposition> dec = decompose(sys);
    if (!dec || dec->ell != 2)
        throw EngineeringInfeasibleError(
            "solve_ring_df: engineered ring does not expose a two-pair protected subspace");
    const StabilityReport rep = stability_certificate(dec->g_df, dec->a2);
    if (!rep.stable)
        throw EngineeringInfeasibleError(
            "solve_ring_df: engineered ring failed the stability certificate");
    return {omega_p, k2, k3};
}

// ------------------------------ reference states ----------------------------

// Pure two-mode squeezed covariance: a protected mode squeezed by r mixed
// with a vacuum dissipative mode under the balanced pair transformation,
//     V = (1/4) [[ (1+e^r, 1+e^-r) diag, (1-e^r, 1-e^-r) diag ],
//                [ (1-e^r, 1-e^-r) diag, (1+e^r, 1+e^-r) diag ]].
// Log-negativity r/2, purity 1.
inline Matrix tms_covariance(double r) {
    const double ep = std::exp(r);
    const double em = std::exp(-r);
    Matrix v = Matrix::Zero(4, 4);
    v(0, 0) = v(2, 2) = (1.0 + ep) / 4.0;
    v(1, 1) = v(3, 3) = (1.0 + em) / 4.0;
    v(0, 2) = v(2, 0) = (1.0 - ep) / 4.0;
    v(1, 3) = v(3, 1) = (1.0 - em) / 4.0;
    return v;
}

}  // namespace dfls
