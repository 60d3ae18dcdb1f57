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
// config.hpp — Run configuration for the command-line tools: the JSON schema,
// its validating parser, and the builders that turn a parsed configuration
// into an assembled system and an initial Gaussian state.
//
// Schema sketch (all matrices are nested row arrays; complex vectors are
// arrays of [re, im] pairs):
//
//   {
//     "system":   { "n": 2, "m": 1, "G": [[...]], "couplings": [[[re,im],...]],
//                   "basis": "interleaved" | "grouped" },     // or:
//     "scenario": { "kind": "dissipative-pair", "params": { "kappa": 2, ... } },
//     "tolerances": { "tol_rank": 1e-9, "tol_margin": 1e-10, "tol_psd": 1e-9 },
//     "time_grid": { "t_end": 5.0, "steps": 50 },
//     "initial_state": { "type": "vacuum" }
//                      | { "type": "tms", "r": 1.0 }
//                      | { "type": "explicit", "mean": [...], "cov": [[...]] },
//     "candidate_G": [[...]] | { "matrix": [[...]], "basis": "grouped" },
//     "output": { "path": "run.csv" }
//   }
//
// Exactly one of "system" / "scenario" must be present.  Unknown keys are
// rejected so typos surface as parse errors naming the offending key.

#include <json.hpp>

#include <complex>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "dfls/errors.hpp"
#include "dfls/gaussian.hpp"
#include "dfls/qls.hpp"
#include "dfls/scenarios.hpp"

namespace dfls {

// Insertion-ordered JSON keeps emitted reports in a stable, readable order.
using Json = nlohmann::ordered_json;

// ------------------------------- config types -------------------------------

struct TimeGrid {
    double t_end = 0.0;
    int steps = 0;

    // Uniform grid 0, t_end/steps, ..., t_end (steps + 1 points).
    std::vector<double> times() const {
        std::vector<double> t(static_cast<size_t>(steps) + 1);
        for (int i = 0; i <= steps; ++i) t[static_cast<size_t>(i)] = t_end * i / steps;
        return t;
    }
};

enum class InitialStateKind { vacuum, tms, explicit_moments };

struct InitialStateSpec {
    InitialStateKind kind = InitialStateKind::vacuum;
    double r = 0.0;  // two-mode squeezing parameter (kind == tms)
    Vector mean;     // kind == explicit_moments
    Matrix cov;      // kind == explicit_moments
};

// Scenario parameters; which fields are required depends on the kind.  The
// engineered parameters (mu/nu, omega_prime/k2/k3) stay optional so the
// engineer command can solve for them when absent.
struct ScenarioSpec {
    std::string kind;  // dissipative-pair | dispersive-pair | optomech |
                       // optomech-extended | ring-trap
    std::optional<double> kappa;
    Matrix g1, g2;  // pair scenarios; default zero blocks
    std::optional<double> mass, omega, gamma;      // optomech kinds
    std::optional<double> g, mu, nu;               // optomech-extended
    std::optional<double> k, omega_prime, k2, k3;  // ring-trap
};

struct ExplicitSystemSpec {
    int modes = 0;
    int fields = 0;
    Matrix g;                              // interleaved ordering
    std::vector<ComplexVector> couplings;  // interleaved ordering
};

struct RunConfig {
    std::optional<ExplicitSystemSpec> system;
    std::optional<ScenarioSpec> scenario;
    double tol_rank = 1e-9;
    double tol_margin = 1e-10;
    double tol_psd = 1e-9;
    std::optional<TimeGrid> time_grid;
    InitialStateSpec initial;
    std::optional<Matrix> candidate_g;  // interleaved ordering
    std::string out_path;               // empty = no configured output file
};

// ------------------------------ parse helpers -------------------------------

namespace detail {

[[noreturn]] inline void parse_fail(const std::string& where, const std::string& what) {
    throw ParseError("config: " + where + ": " + what);
}

inline const Json& member(const Json& obj, const char* key, const std::string& where) {
    if (!obj.is_object()) parse_fail(where, "expected an object");
    const auto it = obj.find(key);
    if (it == obj.end()) parse_fail(where, std::string("missing key '") + key + "'");
    return *it;
}

inline void reject_unknown_keys(const Json& obj, std::initializer_list<const char*> allowed,
                                const std::string& where) {
    if (!obj.is_object()) parse_fail(where, "expected an object");
    for (const auto& item : obj.items()) {
        bool known = false;
        for (const char* key : allowed)
            if (item.key() == key) known = true;
        if (!known) parse_fail(where, "unknown key '" + item.key() + "'");
    }
}

inline double number_at(const Json& j, const std::string& where) {
    if (!j.is_number()) parse_fail(where, std::string("expected a number, got ") + j.type_name());
    return j.get<double>();
}

inline double number_key(const Json& obj, const char* key, const std::string& where) {
    return number_at(member(obj, key, where), where + "." + key);
}

inline int int_key(const Json& obj, const char* key, const std::string& where) {
    const Json& j = member(obj, key, where);
    if (!j.is_number_integer())
        parse_fail(where + "." + key, std::string("expected an integer, got ") + j.type_name());
    return j.get<int>();
}

inline std::string string_key(const Json& obj, const char* key, const std::string& where) {
    const Json& j = member(obj, key, where);
    if (!j.is_string())
        parse_fail(where + "." + key, std::string("expected a string, got ") + j.type_name());
    return j.get<std::string>();
}

inline Vector vector_at(const Json& j, const std::string& where) {
    if (!j.is_array()) parse_fail(where, "expected an array of numbers");
    Vector v(j.size());
    for (size_t i = 0; i < j.size(); ++i)
        v(static_cast<Eigen::Index>(i)) = number_at(j[i], where + "[" + std::to_string(i) + "]");
    return v;
}

inline Matrix matrix_at(const Json& j, const std::string& where) {
    if (!j.is_array() || j.empty()) parse_fail(where, "expected a non-empty array of row arrays");
    const size_t rows = j.size();
    size_t cols = 0;
    Matrix m;
    for (size_t i = 0; i < rows; ++i) {
        const std::string row_where = where + "[" + std::to_string(i) + "]";
        if (!j[i].is_array()) parse_fail(row_where, "expected a row array");
        if (i == 0) {
            cols = j[i].size();
            if (cols == 0) parse_fail(row_where, "rows must be non-empty");
            m.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
        } else if (j[i].size() != cols) {
            parse_fail(row_where, "ragged matrix: expected " + std::to_string(cols) +
                                      " entries, got " + std::to_string(j[i].size()));
        }
        for (size_t c = 0; c < cols; ++c)
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) =
                number_at(j[i][c], row_where + "[" + std::to_string(c) + "]");
    }
    return m;
}

// Complex vector written as [[re, im], ...].
inline ComplexVector complex_vector_at(const Json& j, const std::string& where) {
    if (!j.is_array()) parse_fail(where, "expected an array of [re, im] pairs");
    ComplexVector v(j.size());
    for (size_t i = 0; i < j.size(); ++i) {
        const std::string entry_where = where + "[" + std::to_string(i) + "]";
        if (!j[i].is_array() || j[i].size() != 2)
            parse_fail(entry_where, "expected a [re, im] pair");
        v(static_cast<Eigen::Index>(i)) = std::complex<double>(
            number_at(j[i][0], entry_where + "[0]"), number_at(j[i][1], entry_where + "[1]"));
    }
    return v;
}

inline std::string basis_key(const Json& obj, const std::string& where) {
    if (!obj.contains("basis")) return "interleaved";
    const std::string basis = string_key(obj, "basis", where);
    if (basis != "interleaved" && basis != "grouped")
        parse_fail(where + ".basis", "expected 'interleaved' or 'grouped', got '" + basis + "'");
    return basis;
}

inline double positive_tolerance(const Json& obj, const char* key, double fallback,
                                 const std::string& where) {
    if (!obj.contains(key)) return fallback;
    const double value = number_key(obj, key, where);
    if (!(value > 0.0 && value < 1.0))
        throw ValidationError("config: " + where + "." + key + ": must lie in (0, 1), got " +
                              detail::fmt_num(value));
    return value;
}

}  // namespace detail

// Mode count implied by a scenario kind.
inline int scenario_modes(const std::string& kind) {
    if (kind == "dissipative-pair" || kind == "dispersive-pair" || kind == "optomech") return 2;
    if (kind == "optomech-extended" || kind == "ring-trap") return 3;
    throw ParseError("config: scenario.kind: unknown kind '" + kind +
                     "' (expected dissipative-pair, dispersive-pair, optomech, "
                     "optomech-extended, or ring-trap)");
}

inline int config_modes(const RunConfig& cfg) {
    return cfg.system ? cfg.system->modes : scenario_modes(cfg.scenario->kind);
}

// ------------------------------- parse_config -------------------------------

namespace detail {

inline ExplicitSystemSpec parse_explicit_system(const Json& jsys) {
    reject_unknown_keys(jsys, {"n", "m", "G", "couplings", "basis"}, "system");
    ExplicitSystemSpec sys;
    sys.modes = int_key(jsys, "n", "system");
    sys.fields = int_key(jsys, "m", "system");
    if (sys.modes < 1) parse_fail("system.n", "mode count must be >= 1");
    if (sys.fields < 0) parse_fail("system.m", "field count must be >= 0");
    const int d = 2 * sys.modes;

    sys.g = matrix_at(member(jsys, "G", "system"), "system.G");
    if (sys.g.rows() != d || sys.g.cols() != d)
        parse_fail("system.G", "must be 2n x 2n = " + std::to_string(d) + " x " +
                                   std::to_string(d) + ", got " + std::to_string(sys.g.rows()) +
                                   " x " + std::to_string(sys.g.cols()));

    const Json& jc = member(jsys, "couplings", "system");
    if (!jc.is_array())
        parse_fail("system.couplings", "expected an array of coupling vectors");
    if (static_cast<int>(jc.size()) != sys.fields)
        parse_fail("system.couplings", "expected m = " + std::to_string(sys.fields) +
                                           " vectors, got " + std::to_string(jc.size()));
    for (size_t i = 0; i < jc.size(); ++i) {
        const std::string where = "system.couplings[" + std::to_string(i) + "]";
        ComplexVector c = complex_vector_at(jc[i], where);
        if (c.size() != d) parse_fail(where, "expected length 2n = " + std::to_string(d));
        sys.couplings.push_back(std::move(c));
    }

    if (basis_key(jsys, "system") == "grouped") {
        const ModeBasisPermutation perm = basis_permutation(sys.modes);
        sys.g = perm.to_interleaved(sys.g);
        for (ComplexVector& c : sys.couplings) c = perm.vector_to_interleaved(c);
    }
    return sys;
}

inline ScenarioSpec parse_scenario(const Json& jsc) {
    reject_unknown_keys(jsc, {"kind", "params"}, "scenario");
    ScenarioSpec sc;
    sc.kind = string_key(jsc, "kind", "scenario");
    scenario_modes(sc.kind);  // validates the kind
    const Json params = jsc.contains("params") ? jsc.at("params") : Json::object();
    const std::string where = "scenario.params";

    const auto opt_number = [&](const char* key) -> std::optional<double> {
        if (!params.contains(key)) return std::nullopt;
        return number_key(params, key, where);
    };
    const auto req_number = [&](const char* key) -> double {
        return number_key(params, key, where);
    };

    if (sc.kind == "dissipative-pair" || sc.kind == "dispersive-pair") {
        reject_unknown_keys(params, {"kappa", "G1", "G2"}, where);
        sc.kappa = req_number("kappa");
        sc.g1 = params.contains("G1") ? matrix_at(params.at("G1"), where + ".G1")
                                      : Matrix::Zero(2, 2);
        sc.g2 = params.contains("G2") ? matrix_at(params.at("G2"), where + ".G2")
                                      : Matrix::Zero(2, 2);
        if (sc.g1.rows() != 2 || sc.g1.cols() != 2) parse_fail(where + ".G1", "must be 2 x 2");
        if (sc.g2.rows() != 2 || sc.g2.cols() != 2) parse_fail(where + ".G2", "must be 2 x 2");
    } else if (sc.kind == "optomech") {
        reject_unknown_keys(params, {"m", "omega", "gamma", "kappa"}, where);
        sc.mass = req_number("m");
        sc.omega = req_number("omega");
        sc.gamma = req_number("gamma");
        sc.kappa = req_number("kappa");
    } else if (sc.kind == "optomech-extended") {
        reject_unknown_keys(params, {"m", "omega", "gamma", "kappa", "g", "mu", "nu"}, where);
        sc.mass = req_number("m");
        sc.omega = req_number("omega");
        sc.gamma = req_number("gamma");
        sc.kappa = req_number("kappa");
        sc.g = req_number("g");
        sc.mu = opt_number("mu");
        sc.nu = opt_number("nu");
    } else {  // ring-trap
        reject_unknown_keys(params, {"omega", "omega_prime", "k", "k2", "k3", "kappa"}, where);
        sc.omega = req_number("omega");
        sc.k = req_number("k");
        sc.kappa = req_number("kappa");
        sc.omega_prime = opt_number("omega_prime");
        sc.k2 = opt_number("k2");
        sc.k3 = opt_number("k3");
    }
    return sc;
}

}  // namespace detail

inline RunConfig parse_config(const Json& doc) {
    if (!doc.is_object()) detail::parse_fail("$", "top level must be an object");
    detail::reject_unknown_keys(
        doc, {"system", "scenario", "tolerances", "time_grid", "initial_state", "candidate_G",
              "output"},
        "$");

    RunConfig cfg;
    const bool has_system = doc.contains("system");
    const bool has_scenario = doc.contains("scenario");
    if (has_system == has_scenario)
        detail::parse_fail("$", "exactly one of 'system' or 'scenario' is required");
    if (has_system) cfg.system = detail::parse_explicit_system(doc.at("system"));
    else cfg.scenario = detail::parse_scenario(doc.at("scenario"));
    const int n = config_modes(cfg);
    const int d = 2 * n;

    if (doc.contains("tolerances")) {
        const Json& jt = doc.at("tolerances");
        detail::reject_unknown_keys(jt, {"tol_rank", "tol_margin", "tol_psd"}, "tolerances");
        cfg.tol_rank = detail::positive_tolerance(jt, "tol_rank", cfg.tol_rank, "tolerances");
        cfg.tol_margin = detail::positive_tolerance(jt, "tol_margin", cfg.tol_margin, "tolerances");
        cfg.tol_psd = detail::positive_tolerance(jt, "tol_psd", cfg.tol_psd, "tolerances");
    }

    if (doc.contains("time_grid")) {
        const Json& jg = doc.at("time_grid");
        detail::reject_unknown_keys(jg, {"t_end", "steps"}, "time_grid");
        TimeGrid grid;
        grid.t_end = detail::number_key(jg, "t_end", "time_grid");
        grid.steps = detail::int_key(jg, "steps", "time_grid");
        if (!(grid.t_end > 0.0))
            throw ValidationError("config: time_grid.t_end: must be positive, got " +
                                  detail::fmt_num(grid.t_end));
        if (grid.steps < 1)
            throw ValidationError("config: time_grid.steps: must be >= 1, got " +
                                  std::to_string(grid.steps));
        cfg.time_grid = grid;
    }

    if (doc.contains("initial_state")) {
        const Json& js = doc.at("initial_state");
        const std::string type = detail::string_key(js, "type", "initial_state");
        if (type == "vacuum") {
            detail::reject_unknown_keys(js, {"type"}, "initial_state");
            cfg.initial.kind = InitialStateKind::vacuum;
        } else if (type == "tms") {
            detail::reject_unknown_keys(js, {"type", "r"}, "initial_state");
            cfg.initial.kind = InitialStateKind::tms;
            cfg.initial.r = detail::number_key(js, "r", "initial_state");
        } else if (type == "explicit") {
            detail::reject_unknown_keys(js, {"type", "mean", "cov"}, "initial_state");
            cfg.initial.kind = InitialStateKind::explicit_moments;
            cfg.initial.mean =
                detail::vector_at(detail::member(js, "mean", "initial_state"), "initial_state.mean");
            cfg.initial.cov =
                detail::matrix_at(detail::member(js, "cov", "initial_state"), "initial_state.cov");
            if (cfg.initial.mean.size() != d)
                detail::parse_fail("initial_state.mean", "expected length 2n = " + std::to_string(d));
            if (cfg.initial.cov.rows() != d || cfg.initial.cov.cols() != d)
                detail::parse_fail("initial_state.cov",
                                   "expected 2n x 2n = " + std::to_string(d) + " x " +
                                       std::to_string(d));
        } else {
            detail::parse_fail("initial_state.type",
                               "expected 'vacuum', 'tms', or 'explicit', got '" + type + "'");
        }
    }

    if (doc.contains("candidate_G")) {
        const Json& jc = doc.at("candidate_G");
        Matrix cand;
        std::string basis = "interleaved";
        if (jc.is_object()) {
            detail::reject_unknown_keys(jc, {"matrix", "basis"}, "candidate_G");
            cand = detail::matrix_at(detail::member(jc, "matrix", "candidate_G"),
                                     "candidate_G.matrix");
            basis = detail::basis_key(jc, "candidate_G");
        } else {
            cand = detail::matrix_at(jc, "candidate_G");
        }
        if (cand.rows() != d || cand.cols() != d)
            detail::parse_fail("candidate_G", "expected 2n x 2n = " + std::to_string(d) + " x " +
                                                  std::to_string(d));
        if (basis == "grouped") cand = basis_permutation(n).to_interleaved(cand);
        cfg.candidate_g = cand;
    }

    if (doc.contains("output")) {
        const Json& jo = doc.at("output");
        detail::reject_unknown_keys(jo, {"path"}, "output");
        cfg.out_path = detail::string_key(jo, "path", "output");
    }
    return cfg;
}

inline RunConfig parse_config_text(const std::string& text) {
    Json doc;
    try {
        doc = Json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("config: not valid JSON: ") + e.what());
    }
    return parse_config(doc);
}

inline RunConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("config: cannot open file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

// -------------------------------- builders ----------------------------------

// Assemble the configured system.  Scenario kinds with engineered parameters
// require those parameters here; the engineer command solves for them first.
inline QuantumLinearSystem build_system(const RunConfig& cfg) {
    if (cfg.system)
        return assemble_system(cfg.system->modes, cfg.system->fields, cfg.system->g,
                               cfg.system->couplings);
    const ScenarioSpec& sc = *cfg.scenario;
    if (sc.kind == "dissipative-pair") return dissipative_pair(*sc.kappa, sc.g1, sc.g2);
    if (sc.kind == "dispersive-pair") return dispersive_pair(*sc.kappa, sc.g1, sc.g2);
    if (sc.kind == "optomech") return optomech(*sc.mass, *sc.omega, *sc.gamma, *sc.kappa);
    if (sc.kind == "optomech-extended") {
        if (!sc.mu || !sc.nu)
            throw ValidationError(
                "config: scenario optomech-extended needs both mu and nu here; "
                "run the engineer command to solve for them");
        return optomech(*sc.mass, *sc.omega, *sc.gamma, *sc.kappa,
                        OptomechExtension{*sc.g, *sc.mu, *sc.nu});
    }
    // ring-trap
    if (!sc.omega_prime || !sc.k2 || !sc.k3)
        throw ValidationError(
            "config: scenario ring-trap needs omega_prime, k2, and k3 here; "
            "run the engineer command to solve for them");
    return ring_trap(*sc.omega, *sc.omega_prime, *sc.k, *sc.k2, *sc.k3, *sc.kappa);
}

inline GaussianMoments build_initial_state(const RunConfig& cfg, int n_modes) {
    const int d = 2 * n_modes;
    GaussianMoments m;
    switch (cfg.initial.kind) {
        case InitialStateKind::vacuum:
            m.mean = Vector::Zero(d);
            m.cov = 0.5 * Matrix::Identity(d, d);
            return m;
        case InitialStateKind::tms:
            if (n_modes != 2)
                throw ValidationError(
                    "config: initial_state tms requires a two-mode system, got n = " +
                    std::to_string(n_modes));
            m.mean = Vector::Zero(d);
            m.cov = tms_covariance(cfg.initial.r);
            return m;
        case InitialStateKind::explicit_moments:
            m.mean = cfg.initial.mean;
            m.cov = cfg.initial.cov;
            return m;
    }
    throw Error("build_initial_state: unreachable");
}

}  // namespace dfls
