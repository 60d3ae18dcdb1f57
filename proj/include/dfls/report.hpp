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
// report.hpp — The analysis report produced by the analyze / stability /
// engineer commands: protected-subspace frames, restricted Hamiltonian and
// spectra, the stability certificate, and the residuals backing each claim.
// Serializes to JSON that parses back to bit-identical matrices, and renders
// as readable text with full-precision numbers.

#include <cmath>
#include <iomanip>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "dfls/config.hpp"
#include "dfls/df.hpp"
#include "dfls/errors.hpp"
#include "dfls/gaussian.hpp"
#include "dfls/qls.hpp"

namespace dfls {

struct AnalysisReport {
    int modes = 0;
    int fields = 0;
    double tol_rank = 1e-9;
    double tol_margin = 1e-10;

    int df_pairs = 0;  // protected mode pairs; subspace dimension is 2 * df_pairs
    Matrix t1;         // 2n x 2l protected frame
    Matrix t2;         // 2n x 2(n-l) lossy frame (identity when no pairs exist)
    Matrix g_df;       // 2l x 2l restricted Hamiltonian
    Vector g_df_eigenvalues;                          // real spectrum of G_DF
    std::vector<std::complex<double>> a1_spectrum;    // spectrum of Sigma_l G_DF
    std::vector<std::complex<double>> a2_spectrum;    // spectrum of the lossy drift

    bool stability_applicable = false;  // a protected block exists to certify
    bool stable = false;
    bool marginal = false;
    bool a2_hurwitz = false;
    bool gdf_psd = false;
    bool shortcut_used = false;
    double worst_pair_real = -std::numeric_limits<double>::infinity();

    // Residual of the kernel identity Ker(O Sigma) = Ker(ctrb^T) that underpins
    // the subspace construction (principal-angle gap; 0 for closed systems).
    double kernel_duality_residual = 0.0;

    // Named max-abs residuals of the block-decomposition claims.
    std::vector<std::pair<std::string, double>> residuals;

    bool has_hamiltonian_check = false;  // a candidate G was supplied and tested
    HamiltonianDFCheck hamiltonian_check{};
};

// -------------------------------- analysis ----------------------------------

inline AnalysisReport analyze_system(const QuantumLinearSystem& sys, double tol_rank = 1e-9,
                                     double tol_margin = 1e-10,
                                     const std::optional<Matrix>& candidate_g = std::nullopt) {
    AnalysisReport rep;
    rep.modes = sys.modes;
    rep.fields = sys.fields;
    rep.tol_rank = tol_rank;
    rep.tol_margin = tol_margin;
    const int d = 2 * sys.modes;

    if (sys.fields > 0) {
        const KalmanMatrices km = kalman_matrices(sys);
        const KernelBasis ker_os =
            kernel_basis(Matrix(km.obsv * symplectic_form(sys.modes)), tol_rank);
        const KernelBasis ker_ct = kernel_basis(Matrix(km.ctrb.transpose()), tol_rank);
        rep.kernel_duality_residual =
            ker_os.dim == ker_ct.dim ? subspace_gap_sin(ker_os.basis, ker_ct.basis) : 1.0;
    }

    const std::optional<DFDecomposition> dec = decompose(sys, tol_rank);
    if (!dec) {
        rep.df_pairs = 0;
        rep.t1 = Matrix::Zero(d, 0);
        rep.t2 = Matrix::Identity(d, d);
        rep.g_df = Matrix::Zero(0, 0);
        rep.g_df_eigenvalues = Vector(0);
        const StabilityReport cert = stability_certificate(Matrix(0, 0), sys.A, tol_margin);
        for (int i = 0; i < cert.eig_a2.size(); ++i) rep.a2_spectrum.push_back(cert.eig_a2(i));
        rep.a2_hurwitz = cert.a2_hurwitz;
        rep.gdf_psd = true;
        rep.stability_applicable = false;
        return rep;
    }

    rep.df_pairs = dec->ell;
    rep.t1 = dec->t1;
    rep.t2 = dec->t2;
    rep.g_df = dec->g_df;
    Eigen::SelfAdjointEigenSolver<Matrix> esg(dec->g_df);
    rep.g_df_eigenvalues = esg.eigenvalues();

    const StabilityReport cert = stability_certificate(dec->g_df, dec->a2, tol_margin);
    for (int i = 0; i < cert.eig_a1.size(); ++i) rep.a1_spectrum.push_back(cert.eig_a1(i));
    for (int i = 0; i < cert.eig_a2.size(); ++i) rep.a2_spectrum.push_back(cert.eig_a2(i));
    rep.stability_applicable = true;
    rep.stable = cert.stable;
    rep.marginal = cert.marginal;
    rep.a2_hurwitz = cert.a2_hurwitz;
    rep.gdf_psd = cert.gdf_psd;
    rep.shortcut_used = cert.shortcut_used;
    rep.worst_pair_real = cert.worst_pair_real;

    Matrix frame(d, d);
    frame.leftCols(dec->t1.cols()) = dec->t1;
    frame.rightCols(dec->t2.cols()) = dec->t2;
    const SymplecticStructure sigma(sys.modes);
    rep.residuals = {
        {"output_on_protected", max_abs(Matrix(sys.C * dec->t1))},
        {"input_on_protected", max_abs(Matrix(dec->t1.transpose() * sys.B))},
        {"drift_lossy_to_protected", max_abs(Matrix(dec->t1.transpose() * sys.A * dec->t2))},
        {"drift_protected_to_lossy", max_abs(Matrix(dec->t2.transpose() * sys.A * dec->t1))},
        {"protected_drift_restriction",
         max_abs(Matrix(dec->t1.transpose() * sys.A * dec->t1 - dec->a1))},
        {"frame_orthonormality",
         max_abs(Matrix(frame.transpose() * frame - Matrix::Identity(d, d)))},
        {"frame_symplectic",
         std::max({is_symplectic(dec->t1).residual, is_symplectic(dec->t2).residual,
                   max_abs(Matrix(dec->t1.transpose() * sigma.sigma * dec->t2))})},
    };

    if (candidate_g) {
        rep.has_hamiltonian_check = true;
        rep.hamiltonian_check = hamiltonian_preserves_df(*candidate_g, dec->t1, sys.C);
    }
    return rep;
}

// ----------------------------- JSON serialization ---------------------------

namespace detail {

inline Json matrix_to_json(const Matrix& m) {
    Json j;
    j["rows"] = m.rows();
    j["cols"] = m.cols();
    Json data = Json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        Json row = Json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        data.push_back(std::move(row));
    }
    j["data"] = std::move(data);
    return j;
}

inline Matrix matrix_from_json(const Json& j, const std::string& where) {
    const auto rows = static_cast<Eigen::Index>(int_key(j, "rows", where));
    const auto cols = static_cast<Eigen::Index>(int_key(j, "cols", where));
    if (rows < 0 || cols < 0) parse_fail(where, "negative dimensions");
    const Json& data = member(j, "data", where);
    if (!data.is_array() || static_cast<Eigen::Index>(data.size()) != rows)
        parse_fail(where + ".data", "row count mismatch");
    Matrix m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const Json& row = data[static_cast<size_t>(r)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
            parse_fail(where + ".data", "column count mismatch");
        for (Eigen::Index c = 0; c < cols; ++c)
            m(r, c) = number_at(row[static_cast<size_t>(c)], where + ".data");
    }
    return m;
}

inline Json real_vector_to_json(const Vector& v) {
    Json j = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) j.push_back(v(i));
    return j;
}

inline Vector real_vector_from_json(const Json& j, const std::string& where) {
    if (!j.is_array()) parse_fail(where, "expected an array");
    Vector v(static_cast<Eigen::Index>(j.size()));
    for (size_t i = 0; i < j.size(); ++i)
        v(static_cast<Eigen::Index>(i)) = number_at(j[i], where);
    return v;
}

inline Json complex_list_to_json(const std::vector<std::complex<double>>& v) {
    Json j = Json::array();
    for (const std::complex<double>& z : v) j.push_back(Json::array({z.real(), z.imag()}));
    return j;
}

inline std::vector<std::complex<double>> complex_list_from_json(const Json& j,
                                                                const std::string& where) {
    if (!j.is_array()) parse_fail(where, "expected an array of [re, im] pairs");
    std::vector<std::complex<double>> v;
    v.reserve(j.size());
    for (const Json& entry : j) {
        if (!entry.is_array() || entry.size() != 2) parse_fail(where, "expected [re, im] pairs");
        v.emplace_back(number_at(entry[0], where), number_at(entry[1], where));
    }
    return v;
}

// worst_pair_real is -inf when a block is empty; JSON has no infinities, so
// null stands in for it.
inline Json finite_or_null(double x) {
    if (std::isfinite(x)) return Json(x);
    return Json(nullptr);
}

inline double number_or_neg_inf(const Json& j, const std::string& where) {
    if (j.is_null()) return -std::numeric_limits<double>::infinity();
    return number_at(j, where);
}

}  // namespace detail

inline Json report_to_json(const AnalysisReport& rep) {
    Json j;
    j["modes"] = rep.modes;
    j["fields"] = rep.fields;
    j["tolerances"] = {{"tol_rank", rep.tol_rank}, {"tol_margin", rep.tol_margin}};
    Json df;
    df["pairs"] = rep.df_pairs;
    df["dimension"] = 2 * rep.df_pairs;
    df["t1"] = detail::matrix_to_json(rep.t1);
    df["t2"] = detail::matrix_to_json(rep.t2);
    df["g_df"] = detail::matrix_to_json(rep.g_df);
    df["g_df_eigenvalues"] = detail::real_vector_to_json(rep.g_df_eigenvalues);
    df["a1_spectrum"] = detail::complex_list_to_json(rep.a1_spectrum);
    df["a2_spectrum"] = detail::complex_list_to_json(rep.a2_spectrum);
    j["df"] = std::move(df);
    Json st;
    st["applicable"] = rep.stability_applicable;
    st["stable"] = rep.stable;
    st["marginal"] = rep.marginal;
    st["a2_hurwitz"] = rep.a2_hurwitz;
    st["g_df_psd"] = rep.gdf_psd;
    st["shortcut_used"] = rep.shortcut_used;
    st["worst_pair_real"] = detail::finite_or_null(rep.worst_pair_real);
    j["stability"] = std::move(st);
    j["kernel_duality_residual"] = rep.kernel_duality_residual;
    Json res = Json::object();
    for (const auto& [name, value] : rep.residuals) res[name] = value;
    j["residuals"] = std::move(res);
    if (rep.has_hamiltonian_check) {
        Json hc;
        hc["preserves"] = rep.hamiltonian_check.preserves;
        hc["sufficient_only"] = rep.hamiltonian_check.sufficient_only;
        hc["residual"] = rep.hamiltonian_check.residual;
        j["hamiltonian_check"] = std::move(hc);
    } else {
        j["hamiltonian_check"] = Json(nullptr);
    }
    return j;
}

inline AnalysisReport report_from_json(const Json& j) {
    using detail::member;
    AnalysisReport rep;
    rep.modes = detail::int_key(j, "modes", "report");
    rep.fields = detail::int_key(j, "fields", "report");
    const Json& jt = member(j, "tolerances", "report");
    rep.tol_rank = detail::number_key(jt, "tol_rank", "report.tolerances");
    rep.tol_margin = detail::number_key(jt, "tol_margin", "report.tolerances");
    const Json& df = member(j, "df", "report");
    rep.df_pairs = detail::int_key(df, "pairs", "report.df");
    rep.t1 = detail::matrix_from_json(member(df, "t1", "report.df"), "report.df.t1");
    rep.t2 = detail::matrix_from_json(member(df, "t2", "report.df"), "report.df.t2");
    rep.g_df = detail::matrix_from_json(member(df, "g_df", "report.df"), "report.df.g_df");
    rep.g_df_eigenvalues = detail::real_vector_from_json(
        member(df, "g_df_eigenvalues", "report.df"), "report.df.g_df_eigenvalues");
    rep.a1_spectrum = detail::complex_list_from_json(member(df, "a1_spectrum", "report.df"),
                                                     "report.df.a1_spectrum");
    rep.a2_spectrum = detail::complex_list_from_json(member(df, "a2_spectrum", "report.df"),
                                                     "report.df.a2_spectrum");
    const Json& st = member(j, "stability", "report");
    rep.stability_applicable = member(st, "applicable", "report.stability").get<bool>();
    rep.stable = member(st, "stable", "report.stability").get<bool>();
    rep.marginal = member(st, "marginal", "report.stability").get<bool>();
    rep.a2_hurwitz = member(st, "a2_hurwitz", "report.stability").get<bool>();
    rep.gdf_psd = member(st, "g_df_psd", "report.stability").get<bool>();
    rep.shortcut_used = member(st, "shortcut_used", "report.stability").get<bool>();
    rep.worst_pair_real = detail::number_or_neg_inf(
        member(st, "worst_pair_real", "report.stability"), "report.stability.worst_pair_real");
    rep.kernel_duality_residual =
        detail::number_key(j, "kernel_duality_residual", "report");
    const Json& res = member(j, "residuals", "report");
    if (!res.is_object()) detail::parse_fail("report.residuals", "expected an object");
    for (const auto& item : res.items())
        rep.residuals.emplace_back(item.key(), detail::number_at(item.value(), "report.residuals"));
    const Json& hc = member(j, "hamiltonian_check", "report");
    if (!hc.is_null()) {
        rep.has_hamiltonian_check = true;
        rep.hamiltonian_check.preserves =
            member(hc, "preserves", "report.hamiltonian_check").get<bool>();
        rep.hamiltonian_check.sufficient_only =
            member(hc, "sufficient_only", "report.hamiltonian_check").get<bool>();
        rep.hamiltonian_check.residual =
            detail::number_key(hc, "residual", "report.hamiltonian_check");
    }
    return rep;
}

// ------------------------------ text rendering ------------------------------

namespace detail {

inline void write_matrix_text(std::ostream& out, const Matrix& m, const std::string& indent) {
    if (m.size() == 0) {
        out << indent << "(empty " << m.rows() << " x " << m.cols() << ")\n";
        return;
    }
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        out << indent << "[ ";
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            if (c > 0) out << ", ";
            out << std::setprecision(17) << m(r, c);
        }
        out << " ]\n";
    }
}

inline void write_complex_list_text(std::ostream& out,
                                    const std::vector<std::complex<double>>& v) {
    out << std::setprecision(17);
    for (size_t i = 0; i < v.size(); ++i) {
        if (i > 0) out << ", ";
        out << v[i].real() << (v[i].imag() < 0 ? " - " : " + ")
            << std::abs(v[i].imag()) << "i";
    }
    out << "\n";
}

}  // namespace detail

inline void write_report_text(std::ostream& out, const AnalysisReport& rep) {
    out << std::setprecision(17);
    out << "system: " << rep.modes << " mode(s), " << rep.fields << " field(s)\n";
    out << "rank tolerance: " << rep.tol_rank << ", stability margin: " << rep.tol_margin << "\n";
    out << "kernel duality residual: " << rep.kernel_duality_residual << "\n";
    if (rep.df_pairs == 0) {
        out << "protected pairs: 0 — no decoherence-free subsystem at this tolerance\n";
        if (!rep.a2_spectrum.empty()) {
            out << "full drift spectrum: ";
            detail::write_complex_list_text(out, rep.a2_spectrum);
            out << "full drift Hurwitz: " << (rep.a2_hurwitz ? "yes" : "no") << "\n";
        }
        return;
    }
    out << "protected pairs: " << rep.df_pairs << " (subspace dimension " << 2 * rep.df_pairs
        << ")\n";
    out << "protected frame T1 (columns span the protected subspace):\n";
    detail::write_matrix_text(out, rep.t1, "  ");
    out << "lossy frame T2:\n";
    detail::write_matrix_text(out, rep.t2, "  ");
    out << "restricted Hamiltonian G_DF:\n";
    detail::write_matrix_text(out, rep.g_df, "  ");
    out << "G_DF eigenvalues: ";
    for (Eigen::Index i = 0; i < rep.g_df_eigenvalues.size(); ++i)
        out << (i > 0 ? ", " : "") << rep.g_df_eigenvalues(i);
    out << "\n";
    out << "protected drift spectrum: ";
    detail::write_complex_list_text(out, rep.a1_spectrum);
    out << "lossy drift spectrum: ";
    detail::write_complex_list_text(out, rep.a2_spectrum);
    out << "stability: " << (rep.stable ? "stable" : "not stable")
        << (rep.marginal ? " (marginal)" : "") << "\n";
    out << "  worst pair real part: ";
    if (std::isfinite(rep.worst_pair_real)) out << rep.worst_pair_real;
    else out << "none (a block is empty)";
    out << "\n";
    out << "  lossy drift Hurwitz: " << (rep.a2_hurwitz ? "yes" : "no") << "\n";
    out << "  G_DF positive semidefinite: " << (rep.gdf_psd ? "yes" : "no")
        << (rep.shortcut_used ? " (shortcut verdict cross-checked)" : "") << "\n";
    out << "residuals:\n";
    for (const auto& [name, value] : rep.residuals)
        out << "  " << name << ": " << value << "\n";
    if (rep.has_hamiltonian_check) {
        out << "candidate Hamiltonian check: "
            << (rep.hamiltonian_check.preserves ? "preserves the protected subspace"
                                                : "does not preserve the protected subspace")
            << (rep.hamiltonian_check.sufficient_only ? " (sufficient test only)" : "")
            << ", residual " << rep.hamiltonian_check.residual << "\n";
    }
}

inline void write_stability_text(std::ostream& out, const AnalysisReport& rep) {
    out << std::setprecision(17);
    if (rep.df_pairs == 0) {
        out << "no protected subsystem at this tolerance; nothing to certify\n";
        out << "full drift Hurwitz: " << (rep.a2_hurwitz ? "yes" : "no") << "\n";
        return;
    }
    out << "stability certificate for " << rep.df_pairs << " protected pair(s)\n";
    out << "verdict: " << (rep.stable ? "stable" : "not stable")
        << (rep.marginal ? " (marginal)" : "") << "\n";
    out << "worst pair real part: ";
    if (std::isfinite(rep.worst_pair_real)) out << rep.worst_pair_real;
    else out << "none (a block is empty)";
    out << "\n";
    out << "lossy drift Hurwitz: " << (rep.a2_hurwitz ? "yes" : "no") << "\n";
    out << "G_DF positive semidefinite: " << (rep.gdf_psd ? "yes" : "no") << "\n";
}

}  // namespace dfls
