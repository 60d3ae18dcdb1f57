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
// commands.hpp — The config-driven subcommands behind the CLI front end:
// analyze, stability, simulate, and engineer.  Each takes a parsed RunConfig
// plus output options, writes to the given stream (and optionally a file),
// and returns the process exit code; exceptions never escape.
//
// Output convention: --format text renders a human-readable report on the
// stream, --format machine renders JSON.  When an output path is set (flag or
// config), the machine form is additionally written there, so one run yields
// both forms.  simulate's machine form is the CSV itself.

#include <cstdio>
#include <exception>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "dfls/config.hpp"
#include "dfls/df.hpp"
#include "dfls/errors.hpp"
#include "dfls/gaussian.hpp"
#include "dfls/qls.hpp"
#include "dfls/report.hpp"
#include "dfls/scenarios.hpp"

namespace dfls {

struct CommandOptions {
    std::string format = "text";  // "text" | "machine"
    std::string out_path;         // optional file for the machine-form output
};

// Map the error taxonomy onto the stable exit-code contract.  Internal
// inconsistencies (library bugs) fall through to 70, outside the contract.
inline int exit_code_for(const std::exception& e) noexcept {
    if (dynamic_cast<const ParseError*>(&e)) return exit_parse_error;
    if (dynamic_cast<const IllConditionedRankError*>(&e)) return exit_ill_conditioned_rank;
    if (dynamic_cast<const UncertaintyViolationError*>(&e)) return exit_unphysical_state;
    if (dynamic_cast<const UnphysicalStateError*>(&e)) return exit_unphysical_state;
    if (dynamic_cast<const EngineeringInfeasibleError*>(&e)) return exit_engineering_infeasible;
    if (dynamic_cast<const ValidationError*>(&e)) return exit_parse_error;
    if (dynamic_cast<const InvalidDimensionError*>(&e)) return exit_parse_error;
    if (dynamic_cast<const InvalidHamiltonianError*>(&e)) return exit_parse_error;
    return 70;
}

namespace detail {

inline void emit_error(std::ostream& out, const CommandOptions& opts, const std::string& msg) {
    if (opts.format == "machine") {
        Json j;
        j["error"] = msg;
        out << j.dump(2) << "\n";
    } else {
        out << "error: " << msg << "\n";
    }
}

inline void require_known_format(const CommandOptions& opts) {
    if (opts.format != "text" && opts.format != "machine")
        throw ParseError("--format must be 'text' or 'machine', got '" + opts.format + "'");
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open output file '" + path + "'");
    out << content;
    if (!out) throw Error("failed writing output file '" + path + "'");
}

// Chosen machine-output file: the command-line flag wins over the config.
inline std::string resolve_out_path(const RunConfig& cfg, const CommandOptions& opts) {
    return !opts.out_path.empty() ? opts.out_path : cfg.out_path;
}

// 17 significant digits: every double round-trips exactly, so two runs of the
// same build and config emit identical bytes.
inline std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline void emit_report(const AnalysisReport& rep, const RunConfig& cfg,
                        const CommandOptions& opts, std::ostream& out, bool stability_focus) {
    const Json j = report_to_json(rep);
    if (opts.format == "machine") out << j.dump(2) << "\n";
    else if (stability_focus) write_stability_text(out, rep);
    else write_report_text(out, rep);
    const std::string path = resolve_out_path(cfg, opts);
    if (!path.empty()) write_file(path, j.dump(2) + "\n");
}

}  // namespace detail

// --------------------------------- analyze ----------------------------------

inline int cmd_analyze(const RunConfig& cfg, const CommandOptions& opts, std::ostream& out) {
    try {
        detail::require_known_format(opts);
        const QuantumLinearSystem sys = build_system(cfg);
        const AnalysisReport rep =
            analyze_system(sys, cfg.tol_rank, cfg.tol_margin, cfg.candidate_g);
        detail::emit_report(rep, cfg, opts, out, /*stability_focus=*/false);
        return rep.df_pairs > 0 ? exit_ok : exit_no_df_subsystem;
    } catch (const std::exception& e) {
        detail::emit_error(out, opts, e.what());
        return exit_code_for(e);
    }
}

// --------------------------------- stability --------------------------------

inline int cmd_stability(const RunConfig& cfg, const CommandOptions& opts, std::ostream& out) {
    try {
        detail::require_known_format(opts);
        const QuantumLinearSystem sys = build_system(cfg);
        const AnalysisReport rep =
            analyze_system(sys, cfg.tol_rank, cfg.tol_margin, cfg.candidate_g);
        detail::emit_report(rep, cfg, opts, out, /*stability_focus=*/true);
        return rep.df_pairs > 0 ? exit_ok : exit_no_df_subsystem;
    } catch (const std::exception& e) {
        detail::emit_error(out, opts, e.what());
        return exit_code_for(e);
    }
}

// --------------------------------- simulate ---------------------------------

namespace detail {

// CSV contract: header then one row per grid time; columns are t, the mean
// components, the upper triangle of V row-major, purity, the protected/lossy
// correlation norm when protected pairs exist, and the two-mode entanglement
// E_N when n = 2.  Deterministic bytes for a fixed config and build.
inline std::string render_csv(const QuantumLinearSystem& sys,
                              const std::optional<DFDecomposition>& dec,
                              const std::vector<double>& grid,
                              const std::vector<GaussianMoments>& traj) {
    const int d = 2 * sys.modes;
    const int ell = dec ? dec->ell : 0;
    Matrix frame;
    if (ell > 0) {
        frame.resize(d, d);
        frame.leftCols(dec->t1.cols()) = dec->t1;
        frame.rightCols(dec->t2.cols()) = dec->t2;
    }

    std::string csv = "t";
    for (int i = 0; i < d; ++i) csv += ",mean_" + std::to_string(i);
    for (int i = 0; i < d; ++i)
        for (int jj = i; jj < d; ++jj)
            csv += ",V_" + std::to_string(i) + "_" + std::to_string(jj);
    csv += ",purity";
    if (ell > 0) csv += ",correlation_block_norm";
    if (sys.modes == 2) csv += ",E_N";
    csv += "\n";

    for (size_t row = 0; row < grid.size(); ++row) {
        const GaussianMoments& m = traj[row];
        csv += fmt17(grid[row]);
        for (int i = 0; i < d; ++i) csv += "," + fmt17(m.mean(i));
        for (int i = 0; i < d; ++i)
            for (int jj = i; jj < d; ++jj) csv += "," + fmt17(m.cov(i, jj));
        csv += "," + fmt17(purity(m.cov));
        if (ell > 0) {
            const Matrix primed = frame.transpose() * m.cov * frame;
            csv += "," + fmt17(correlation_block_norm(primed, ell));
        }
        if (sys.modes == 2) csv += "," + fmt17(log_negativity_two_mode(m.cov).log_negativity);
        csv += "\n";
    }
    return csv;
}

}  // namespace detail

inline int cmd_simulate(const RunConfig& cfg, const CommandOptions& opts, std::ostream& out) {
    try {
        detail::require_known_format(opts);
        if (!cfg.time_grid)
            throw ValidationError("simulate: the config must provide time_grid");
        const QuantumLinearSystem sys = build_system(cfg);
        const GaussianMoments m0 = build_initial_state(cfg, sys.modes);
        const std::optional<DFDecomposition> dec = decompose(sys, cfg.tol_rank);
        const std::vector<double> grid = cfg.time_grid->times();
        EvolveOptions evolve_opts;
        evolve_opts.tol_psd = cfg.tol_psd;
        const std::vector<GaussianMoments> traj =
            evolve_moments(sys.A, sys.D, m0, grid, evolve_opts);
        const std::string csv = detail::render_csv(sys, dec, grid, traj);
        const std::string path = detail::resolve_out_path(cfg, opts);
        if (!path.empty()) {
            detail::write_file(path, csv);
            out << "wrote " << grid.size() << " rows to " << path << "\n";
        } else {
            out << csv;
        }
        return exit_ok;
    } catch (const std::exception& e) {
        detail::emit_error(out, opts, e.what());
        return exit_code_for(e);
    }
}

// --------------------------------- engineer ---------------------------------

namespace detail {

struct EngineerOutcome {
    Json solved;  // solved (or verified) parameter values, by name
    QuantumLinearSystem sys;
};

inline EngineerOutcome engineer_optomech(const ScenarioSpec& sc, double tol_rank) {
    if (sc.mu.has_value() != sc.nu.has_value())
        throw ValidationError(
            "engineer: provide both mu and nu to verify a candidate, or neither to solve");
    double mu = 0.0, nu = 0.0;
    if (sc.mu) {
        mu = *sc.mu;
        nu = *sc.nu;
        const QuantumLinearSystem sys =
            optomech(*sc.mass, *sc.omega, *sc.gamma, *sc.kappa, OptomechExtension{*sc.g, mu, nu});
        if (df_subspace(sys, tol_rank).dim < 2)
            throw EngineeringInfeasibleError(
                "engineer: candidate (mu, nu) = (" + fmt17(mu) + ", " + fmt17(nu) +
                ") exposes no protected subspace");
        EngineerOutcome outcome;
        outcome.solved = {{"mu", mu}, {"nu", nu}};
        outcome.sys = sys;
        return outcome;
    }
    std::tie(mu, nu) = solve_optomech_df(*sc.mass, *sc.omega, *sc.gamma, *sc.kappa, *sc.g);
    EngineerOutcome outcome;
    outcome.solved = {{"mu", mu}, {"nu", nu}};
    outcome.sys =
        optomech(*sc.mass, *sc.omega, *sc.gamma, *sc.kappa, OptomechExtension{*sc.g, mu, nu});
    return outcome;
}

inline EngineerOutcome engineer_ring(const ScenarioSpec& sc, double tol_rank, double tol_margin) {
    const int have = int(sc.omega_prime.has_value()) + int(sc.k2.has_value()) +
                     int(sc.k3.has_value());
    if (have != 0 && have != 3)
        throw ValidationError(
            "engineer: provide all of omega_prime, k2, k3 to verify a candidate, "
            "or none to solve");
    double omega_p = 0.0, k2 = 0.0, k3 = 0.0;
    if (have == 3) {
        omega_p = *sc.omega_prime;
        k2 = *sc.k2;
        k3 = *sc.k3;
        const QuantumLinearSystem sys = ring_trap(*sc.omega, omega_p, *sc.k, k2, k3, *sc.kappa);
        const std::optional<DFDecomposition> dec = decompose(sys, tol_rank);
        if (!dec || dec->ell != 2)
            throw EngineeringInfeasibleError(
                "engineer: candidate (omega_prime, k2, k3) does not expose a two-pair "
                "protected subspace");
        if (!stability_certificate(dec->g_df, dec->a2, tol_margin).stable)
            throw EngineeringInfeasibleError(
                "engineer: candidate ring parameters fail the stability certificate");
        EngineerOutcome outcome;
        outcome.solved = {{"omega_prime", omega_p}, {"k2", k2}, {"k3", k3}};
        outcome.sys = sys;
        return outcome;
    }
    std::tie(omega_p, k2, k3) = solve_ring_df(*sc.omega, *sc.k);
    EngineerOutcome outcome;
    outcome.solved = {{"omega_prime", omega_p}, {"k2", k2}, {"k3", k3}};
    outcome.sys = ring_trap(*sc.omega, omega_p, *sc.k, k2, k3, *sc.kappa);
    return outcome;
}

}  // namespace detail

inline int cmd_engineer(const RunConfig& cfg, const CommandOptions& opts, std::ostream& out) {
    try {
        detail::require_known_format(opts);
        if (!cfg.scenario)
            throw ValidationError("engineer: requires a scenario config");
        const ScenarioSpec& sc = *cfg.scenario;
        detail::EngineerOutcome outcome;
        if (sc.kind == "optomech-extended") {
            outcome = detail::engineer_optomech(sc, cfg.tol_rank);
        } else if (sc.kind == "ring-trap") {
            outcome = detail::engineer_ring(sc, cfg.tol_rank, cfg.tol_margin);
        } else {
            throw ValidationError("engineer: scenario kind '" + sc.kind +
                                  "' has no parameters to solve "
                                  "(supported: optomech-extended, ring-trap)");
        }
        const AnalysisReport rep =
            analyze_system(outcome.sys, cfg.tol_rank, cfg.tol_margin, cfg.candidate_g);
        Json j;
        j["solved"] = outcome.solved;
        j["report"] = report_to_json(rep);
        if (opts.format == "machine") {
            out << j.dump(2) << "\n";
        } else {
            out << "solved parameters:\n" << std::setprecision(17);
            for (const auto& item : outcome.solved.items())
                out << "  " << item.key() << " = " << item.value().get<double>() << "\n";
            write_report_text(out, rep);
        }
        const std::string path = detail::resolve_out_path(cfg, opts);
        if (!path.empty()) detail::write_file(path, j.dump(2) + "\n");
        return exit_ok;
    } catch (const std::exception& e) {
        detail::emit_error(out, opts, e.what());
        return exit_code_for(e);
    }
}

}  // namespace dfls
