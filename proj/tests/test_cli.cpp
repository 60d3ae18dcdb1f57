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

// test_cli.cpp — Configuration schema, report serialization, and the command
// layer: exit codes, CSV contract, engineering verification, and the
// regression tables, all exercised through the same entry points the binary
// uses.

#include <doctest.h>

#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "dfls/dfls.hpp"

using namespace dfls;

namespace {

RunConfig pair_config(double kappa) {
    Json doc;
    doc["scenario"]["kind"] = "dissipative-pair";
    doc["scenario"]["params"]["kappa"] = kappa;
    return parse_config(doc);
}

Json matrix_to_rows(const Matrix& m) {
    Json rows = Json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        Json row = Json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(row);
    }
    return rows;
}

Json coupling_to_pairs(const ComplexVector& c) {
    Json pairs = Json::array();
    for (Eigen::Index i = 0; i < c.size(); ++i)
        pairs.push_back(Json::array({c(i).real(), c(i).imag()}));
    return pairs;
}

// Split a CSV string into cells; every line must be newline-terminated.
std::vector<std::vector<std::string>> split_csv(const std::string& csv) {
    std::vector<std::vector<std::string>> table;
    std::istringstream lines(csv);
    std::string line;
    while (std::getline(lines, line)) {
        std::vector<std::string> cells;
        std::istringstream fields(line);
        std::string cell;
        while (std::getline(fields, cell, ',')) cells.push_back(cell);
        table.push_back(std::move(cells));
    }
    return table;
}

int column_index(const std::vector<std::string>& header, const std::string& name) {
    for (size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return static_cast<int>(i);
    return -1;
}

}  // namespace

TEST_CASE("config: minimal scenario parses with defaults") {
    const RunConfig cfg = parse_config_text(R"({
        "scenario": { "kind": "dissipative-pair", "params": { "kappa": 2.0 } }
    })");
    CHECK(cfg.scenario.has_value());
    CHECK(cfg.scenario->kind == "dissipative-pair");
    CHECK(cfg.tol_rank == 1e-9);
    CHECK(cfg.tol_margin == 1e-10);
    CHECK(cfg.tol_psd == 1e-9);
    CHECK_FALSE(cfg.time_grid.has_value());
    CHECK(cfg.initial.kind == InitialStateKind::vacuum);
    const QuantumLinearSystem sys = build_system(cfg);
    CHECK(sys.modes == 2);
    CHECK(sys.fields == 1);
}

TEST_CASE("config: exactly one of system and scenario") {
    CHECK_THROWS_WITH_AS(parse_config_text("{}"), doctest::Contains("exactly one"), ParseError);
    CHECK_THROWS_WITH_AS(parse_config_text(R"({
        "system": { "n": 1, "m": 0, "G": [[1,0],[0,1]], "couplings": [] },
        "scenario": { "kind": "dissipative-pair", "params": { "kappa": 1.0 } }
    })"),
                         doctest::Contains("exactly one"), ParseError);
    CHECK_THROWS_AS(parse_config_text("not json"), ParseError);
}

TEST_CASE("config: schema violations name the offending key") {
    CHECK_THROWS_WITH_AS(parse_config_text(R"({
        "scenario": { "kind": "dissipative-pair", "params": { "kappa": 1.0 } },
        "surprise": 1
    })"),
                         doctest::Contains("surprise"), ParseError);
    CHECK_THROWS_WITH_AS(parse_config_text(R"({
        "scenario": { "kind": "dissipative-pair", "params": { "kappa": 1.0, "decay": 2.0 } }
    })"),
                         doctest::Contains("decay"), ParseError);
    CHECK_THROWS_WITH_AS(parse_config_text(R"({
        "scenario": { "kind": "warp-core", "params": {} }
    })"),
                         doctest::Contains("warp-core"), ParseError);
    CHECK_THROWS_WITH_AS(parse_config_text(R"({
        "scenario": { "kind": "dissipative-pair", "params": {} }
    })"),
                         doctest::Contains("kappa"), ParseError);
    // explicit system with the wrong Hamiltonian shape
    CHECK_THROWS_WITH_AS(parse_config_text(R"({
        "system": { "n": 2, "m": 0, "G": [[1,0],[0,1]], "couplings": [] }
    })"),
                         doctest::Contains("system.G"), ParseError);
    CHECK_THROWS_WITH_AS(parse_config_text(R"({
        "system": { "n": 1, "m": 1, "G": [[0,0],[0,0]], "couplings": [] }
    })"),
                         doctest::Contains("system.couplings"), ParseError);
    CHECK_THROWS_WITH_AS(parse_config_text(R"({
        "system": { "n": 1, "m": 1, "G": [[0,0],[0,0]], "couplings": [[1.0, 0.0]] }
    })"),
                         doctest::Contains("[re, im]"), ParseError);
}

TEST_CASE("config: grouped-basis explicit system matches the interleaved builder") {
    // The ring builder writes its Hamiltonian and coupling in grouped
    // coordinates internally; feeding the same grouped data through the
    // explicit-system path must produce the identical assembled system.
    const double omega = 1.0, omega_p = 1.2, k = 0.3, k2 = 0.4, k3 = 0.5, kappa = 0.8;
    const QuantumLinearSystem ref = ring_trap(omega, omega_p, k, k2, k3, kappa);

    Matrix gq(3, 3);
    gq << omega * omega + k + k3, -k, -k3,
          -k, omega * omega + k + k2, -k2,
          -k3, -k2, omega_p * omega_p + k2 + k3;
    Matrix g_grouped = Matrix::Zero(6, 6);
    g_grouped.topLeftCorner(3, 3) = gq;
    g_grouped.bottomRightCorner(3, 3) = Matrix::Identity(3, 3);
    ComplexVector c_grouped(6);
    const std::complex<double> im(0.0, 1.0);
    c_grouped << 1.0, 1.0, 1.0, im, im, im;
    c_grouped *= std::sqrt(kappa / 2.0);

    Json doc;
    doc["system"]["n"] = 3;
    doc["system"]["m"] = 1;
    doc["system"]["G"] = matrix_to_rows(g_grouped);
    doc["system"]["couplings"] = Json::array({coupling_to_pairs(c_grouped)});
    doc["system"]["basis"] = "grouped";
    const QuantumLinearSystem sys = build_system(parse_config(doc));

    CHECK(max_abs(sys.G - ref.G) == 0.0);  // pure reindexing: bit-identical
    CHECK(max_abs(sys.C - ref.C) == 0.0);
    CHECK(max_abs(sys.A - ref.A) < 1e-15);
    CHECK(max_abs(sys.B - ref.B) < 1e-15);
}

TEST_CASE("config: tolerance and time-grid ranges are validated") {
    CHECK_THROWS_WITH_AS(parse_config_text(R"({
        "scenario": { "kind": "dissipative-pair", "params": { "kappa": 1.0 } },
        "tolerances": { "tol_rank": 0.0 }
    })"),
                         doctest::Contains("tol_rank"), ValidationError);
    CHECK_THROWS_AS(parse_config_text(R"({
        "scenario": { "kind": "dissipative-pair", "params": { "kappa": 1.0 } },
        "tolerances": { "tol_margin": 1.5 }
    })"),
                    ValidationError);
    CHECK_THROWS_WITH_AS(parse_config_text(R"({
        "scenario": { "kind": "dissipative-pair", "params": { "kappa": 1.0 } },
        "time_grid": { "t_end": -1.0, "steps": 5 }
    })"),
                         doctest::Contains("t_end"), ValidationError);
    CHECK_THROWS_WITH_AS(parse_config_text(R"({
        "scenario": { "kind": "dissipative-pair", "params": { "kappa": 1.0 } },
        "time_grid": { "t_end": 1.0, "steps": 0 }
    })"),
                         doctest::Contains("steps"), ValidationError);

    const RunConfig cfg = parse_config_text(R"({
        "scenario": { "kind": "dissipative-pair", "params": { "kappa": 1.0 } },
        "time_grid": { "t_end": 2.0, "steps": 4 },
        "tolerances": { "tol_rank": 1e-7 }
    })");
    CHECK(cfg.tol_rank == 1e-7);
    REQUIRE(cfg.time_grid.has_value());
    const std::vector<double> times = cfg.time_grid->times();
    REQUIRE(times.size() == 5);
    CHECK(times.front() == 0.0);
    CHECK(times.back() == 2.0);
    CHECK(times[2] == 1.0);
}

TEST_CASE("config: initial state variants") {
    const RunConfig tms_cfg = parse_config_text(R"({
        "scenario": { "kind": "dissipative-pair", "params": { "kappa": 1.0 } },
        "initial_state": { "type": "tms", "r": 0.7 }
    })");
    const GaussianMoments m = build_initial_state(tms_cfg, 2);
    CHECK(max_abs(m.cov - tms_covariance(0.7)) == 0.0);
    CHECK(m.mean.norm() == 0.0);

    CHECK_THROWS_WITH_AS(parse_config_text(R"({
        "scenario": { "kind": "dissipative-pair", "params": { "kappa": 1.0 } },
        "initial_state": { "type": "explicit", "mean": [0, 0], "cov":
            [[1,0,0,0],[0,1,0,0],[0,0,1,0],[0,0,0,1]] }
    })"),
                         doctest::Contains("initial_state.mean"), ParseError);
    CHECK_THROWS_WITH_AS(parse_config_text(R"({
        "scenario": { "kind": "dissipative-pair", "params": { "kappa": 1.0 } },
        "initial_state": { "type": "squeezed" }
    })"),
                         doctest::Contains("squeezed"), ParseError);

    // tms needs exactly two modes
    const RunConfig ring_cfg = parse_config_text(R"({
        "scenario": { "kind": "ring-trap", "params": { "omega": 1.0, "k": 1.0, "kappa": 1.0,
            "omega_prime": 1.0, "k2": 1.0, "k3": 1.0 } },
        "initial_state": { "type": "tms", "r": 1.0 }
    })");
    CHECK_THROWS_AS(build_initial_state(ring_cfg, 3), ValidationError);
}

TEST_CASE("config: candidate Hamiltonian accepts grouped and bare forms") {
    Matrix cand_grouped = Matrix::Zero(4, 4);
    cand_grouped(0, 1) = cand_grouped(1, 0) = 0.25;  // grouped: q1-q2 cross term
    Json doc;
    doc["scenario"]["kind"] = "dissipative-pair";
    doc["scenario"]["params"]["kappa"] = 1.0;
    doc["candidate_G"]["matrix"] = matrix_to_rows(cand_grouped);
    doc["candidate_G"]["basis"] = "grouped";
    const RunConfig cfg = parse_config(doc);
    REQUIRE(cfg.candidate_g.has_value());
    const Matrix expected = basis_permutation(2).to_interleaved(cand_grouped);
    CHECK(max_abs(*cfg.candidate_g - expected) == 0.0);

    Json bare;
    bare["scenario"] = doc["scenario"];
    bare["candidate_G"] = matrix_to_rows(expected);
    const RunConfig cfg2 = parse_config(bare);
    REQUIRE(cfg2.candidate_g.has_value());
    CHECK(max_abs(*cfg2.candidate_g - expected) == 0.0);

    Json wrong;
    wrong["scenario"] = doc["scenario"];
    wrong["candidate_G"] = matrix_to_rows(Matrix::Zero(2, 2));
    CHECK_THROWS_WITH_AS(parse_config(wrong), doctest::Contains("candidate_G"), ParseError);
}

TEST_CASE("report: JSON round trip reproduces every field bit-for-bit") {
    Matrix g1(2, 2), g2(2, 2);
    g1 << 0.3, 0.1, 0.1, -0.2;
    g2 << 0.2, 0.0, 0.0, 0.4;
    const QuantumLinearSystem sys = dissipative_pair(2.0, g1, g2);
    Matrix cand = Matrix::Zero(4, 4);
    cand(0, 0) = 1.0;
    const AnalysisReport rep = analyze_system(sys, 1e-9, 1e-10, cand);
    REQUIRE(rep.df_pairs == 1);
    REQUIRE(rep.has_hamiltonian_check);

    const std::string text = report_to_json(rep).dump();
    const AnalysisReport back = report_from_json(Json::parse(text));

    CHECK(back.modes == rep.modes);
    CHECK(back.fields == rep.fields);
    CHECK(back.tol_rank == rep.tol_rank);
    CHECK(back.tol_margin == rep.tol_margin);
    CHECK(back.df_pairs == rep.df_pairs);
    CHECK(max_abs(back.t1 - rep.t1) == 0.0);
    CHECK(max_abs(back.t2 - rep.t2) == 0.0);
    CHECK(max_abs(back.g_df - rep.g_df) == 0.0);
    REQUIRE(back.g_df_eigenvalues.size() == rep.g_df_eigenvalues.size());
    CHECK((back.g_df_eigenvalues - rep.g_df_eigenvalues).norm() == 0.0);
    REQUIRE(back.a1_spectrum.size() == rep.a1_spectrum.size());
    for (size_t i = 0; i < rep.a1_spectrum.size(); ++i)
        CHECK(back.a1_spectrum[i] == rep.a1_spectrum[i]);
    REQUIRE(back.a2_spectrum.size() == rep.a2_spectrum.size());
    for (size_t i = 0; i < rep.a2_spectrum.size(); ++i)
        CHECK(back.a2_spectrum[i] == rep.a2_spectrum[i]);
    CHECK(back.stability_applicable == rep.stability_applicable);
    CHECK(back.stable == rep.stable);
    CHECK(back.marginal == rep.marginal);
    CHECK(back.a2_hurwitz == rep.a2_hurwitz);
    CHECK(back.gdf_psd == rep.gdf_psd);
    CHECK(back.shortcut_used == rep.shortcut_used);
    CHECK(back.worst_pair_real == rep.worst_pair_real);
    CHECK(back.kernel_duality_residual == rep.kernel_duality_residual);
    REQUIRE(back.residuals.size() == rep.residuals.size());
    for (size_t i = 0; i < rep.residuals.size(); ++i) {
        CHECK(back.residuals[i].first == rep.residuals[i].first);
        CHECK(back.residuals[i].second == rep.residuals[i].second);
    }
    CHECK(back.has_hamiltonian_check == rep.has_hamiltonian_check);
    CHECK(back.hamiltonian_check.preserves == rep.hamiltonian_check.preserves);
    CHECK(back.hamiltonian_check.sufficient_only == rep.hamiltonian_check.sufficient_only);
    CHECK(back.hamiltonian_check.residual == rep.hamiltonian_check.residual);
}

TEST_CASE("report: closed system round-trips the empty-block sentinel") {
    Matrix g = Matrix::Identity(2, 2);
    const QuantumLinearSystem sys = assemble_system(1, 0, g, {});
    const AnalysisReport rep = analyze_system(sys);
    CHECK(rep.df_pairs == 1);
    CHECK(rep.stability_applicable);
    CHECK(rep.worst_pair_real == -std::numeric_limits<double>::infinity());
    CHECK(rep.stable);  // nothing is coupled, so nothing can decohere

    const AnalysisReport back = report_from_json(Json::parse(report_to_json(rep).dump()));
    CHECK(back.worst_pair_real == -std::numeric_limits<double>::infinity());
    CHECK(back.t2.cols() == 0);
    CHECK_FALSE(back.has_hamiltonian_check);
}

TEST_CASE("commands: analyze exit codes and report destinations") {
    const CommandOptions text_opts{"text", ""};
    {
        std::ostringstream out;
        CHECK(cmd_analyze(pair_config(2.0), text_opts, out) == exit_ok);
        CHECK(out.str().find("protected pairs: 1") != std::string::npos);
    }
    {  // no protected subsystem: exit 3, report still rendered
        const RunConfig cfg = parse_config_text(R"({
            "scenario": { "kind": "optomech",
                "params": { "m": 1.0, "omega": 2.0, "gamma": 2.0, "kappa": 3.0 } }
        })");
        std::ostringstream out;
        CHECK(cmd_analyze(cfg, text_opts, out) == exit_no_df_subsystem);
        CHECK(out.str().find("protected pairs: 0") != std::string::npos);
    }
    {  // engineered parameters missing outside the engineer command: exit 2
        const RunConfig cfg = parse_config_text(R"({
            "scenario": { "kind": "optomech-extended",
                "params": { "m": 1.0, "omega": 2.0, "gamma": 2.0, "kappa": 3.0, "g": 1.0 } }
        })");
        std::ostringstream out;
        CHECK(cmd_analyze(cfg, text_opts, out) == exit_parse_error);
        CHECK(out.str().find("engineer") != std::string::npos);
    }
    {  // unknown format: exit 2
        std::ostringstream out;
        CHECK(cmd_analyze(pair_config(2.0), CommandOptions{"yaml", ""}, out) == exit_parse_error);
    }
    {  // machine format on stdout parses, and --out writes the same JSON
        const std::string path = "test_cli_analyze_out.tmp.json";
        std::ostringstream out;
        CHECK(cmd_analyze(pair_config(2.0), CommandOptions{"machine", path}, out) == exit_ok);
        const Json streamed = Json::parse(out.str());
        CHECK(streamed["modes"] == 2);
        CHECK(streamed["df"]["pairs"] == 1);
        std::ifstream in(path);
        REQUIRE(in.good());
        Json from_file;
        in >> from_file;
        CHECK(from_file == streamed);
        std::remove(path.c_str());
    }
}

TEST_CASE("commands: borderline rank tolerance maps to the ill-conditioned exit") {
    // Detuned two-mode coupling: the lower singular-value pair sits well off
    // zero, and its two members differ only by floating-point noise.  A rank
    // threshold aimed inside that noise window is exactly the refusal case.
    ComplexVector c(4);
    const std::complex<double> im(0.0, 1.0);
    c << 1.0, im, 1.0 + 1e-3, im * (1.0 + 1e-6);
    const QuantumLinearSystem probe = assemble_system(2, 1, Matrix::Zero(4, 4), {c});
    const Vector sv = df_singular_values(probe);
    if (sv(2) != sv(3)) {
        RunConfig cfg;
        ExplicitSystemSpec spec;
        spec.modes = 2;
        spec.fields = 1;
        spec.g = Matrix::Zero(4, 4);
        spec.couplings = {c};
        cfg.system = spec;
        cfg.tol_rank = 0.5 * (sv(2) + sv(3)) / sv(0);
        std::ostringstream out;
        CHECK(cmd_analyze(cfg, CommandOptions{}, out) == exit_ill_conditioned_rank);
        CHECK(out.str().find("tol_rank") != std::string::npos);
    }
}

TEST_CASE("commands: simulate CSV honors the column contract") {
    const RunConfig cfg = parse_config_text(R"({
        "scenario": { "kind": "dissipative-pair", "params": { "kappa": 4.0 } },
        "time_grid": { "t_end": 5.0, "steps": 50 },
        "initial_state": { "type": "tms", "r": 1.0 }
    })");
    std::ostringstream out;
    REQUIRE(cmd_simulate(cfg, CommandOptions{}, out) == exit_ok);
    const std::string csv = out.str();
    REQUIRE_FALSE(csv.empty());
    CHECK(csv.back() == '\n');

    const auto table = split_csv(csv);
    REQUIRE(table.size() == 52);  // header + 51 grid rows
    std::string expected_header = "t";
    for (int i = 0; i < 4; ++i) expected_header += ",mean_" + std::to_string(i);
    for (int i = 0; i < 4; ++i)
        for (int j = i; j < 4; ++j)
            expected_header += ",V_" + std::to_string(i) + "_" + std::to_string(j);
    expected_header += ",purity,correlation_block_norm,E_N";
    std::string joined;
    for (size_t i = 0; i < table[0].size(); ++i) joined += (i ? "," : "") + table[0][i];
    CHECK(joined == expected_header);

    const int col_t = column_index(table[0], "t");
    const int col_purity = column_index(table[0], "purity");
    const int col_corr = column_index(table[0], "correlation_block_norm");
    const int col_en = column_index(table[0], "E_N");
    REQUIRE(col_t == 0);
    REQUIRE(col_purity > 0);
    REQUIRE(col_corr > 0);
    REQUIRE(col_en > 0);
    CHECK(std::stod(table[1][col_t]) == 0.0);
    CHECK(std::stod(table[1][col_purity]) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(std::stod(table[1][col_en]) == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(std::stod(table.back()[col_t]) == doctest::Approx(5.0));
    CHECK(std::stod(table.back()[col_corr]) < 1e-6);
    // entanglement carried by the protected pair survives relaxation
    CHECK(std::stod(table.back()[col_en]) == doctest::Approx(0.5).epsilon(1e-6));

    // byte-identical on a second run; --out writes the same bytes to a file
    std::ostringstream again;
    REQUIRE(cmd_simulate(cfg, CommandOptions{}, again) == exit_ok);
    CHECK(again.str() == csv);
    const std::string path = "test_cli_simulate_out.tmp.csv";
    std::ostringstream summary;
    REQUIRE(cmd_simulate(cfg, CommandOptions{"text", path}, summary) == exit_ok);
    CHECK(summary.str().find("wrote 51 rows") != std::string::npos);
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream file_bytes;
    file_bytes << in.rdbuf();
    CHECK(file_bytes.str() == csv);
    in.close();
    std::remove(path.c_str());
}

TEST_CASE("commands: simulate guards and closed-system columns") {
    {  // missing time grid: exit 2
        std::ostringstream out;
        CHECK(cmd_simulate(pair_config(1.0), CommandOptions{}, out) == exit_parse_error);
        CHECK(out.str().find("time_grid") != std::string::npos);
    }
    {  // unphysical explicit initial covariance: exit 5
        const RunConfig cfg = parse_config_text(R"({
            "system": { "n": 1, "m": 1, "G": [[0,0],[0,0]],
                        "couplings": [[[1,0],[0,1]]] },
            "time_grid": { "t_end": 1.0, "steps": 4 },
            "initial_state": { "type": "explicit", "mean": [0,0],
                               "cov": [[0.1,0],[0,0.1]] }
        })");
        std::ostringstream out;
        CHECK(cmd_simulate(cfg, CommandOptions{}, out) == exit_unphysical_state);
        CHECK(out.str().find("uncertainty") != std::string::npos);
    }
    {  // closed single mode: fully protected, purity pinned at 1
        const RunConfig cfg = parse_config_text(R"({
            "system": { "n": 1, "m": 0, "G": [[1.3,0],[0,1.3]], "couplings": [] },
            "time_grid": { "t_end": 3.0, "steps": 6 }
        })");
        std::ostringstream out;
        REQUIRE(cmd_simulate(cfg, CommandOptions{}, out) == exit_ok);
        const auto table = split_csv(out.str());
        REQUIRE(table.size() == 8);
        const int col_purity = column_index(table[0], "purity");
        const int col_corr = column_index(table[0], "correlation_block_norm");
        REQUIRE(col_purity > 0);
        REQUIRE(col_corr > 0);          // whole space protected: column exists,
        CHECK(column_index(table[0], "E_N") == -1);  // single mode: no E_N
        for (size_t r = 1; r < table.size(); ++r) {
            CHECK(std::stod(table[r][col_purity]) == doctest::Approx(1.0).epsilon(1e-9));
            CHECK(std::stod(table[r][col_corr]) == 0.0);  // and is exactly zero
        }
    }
    {  // readout pair: purity decreases monotonically
        const RunConfig cfg = parse_config_text(R"({
            "scenario": { "kind": "dispersive-pair", "params": { "kappa": 2.0 } },
            "time_grid": { "t_end": 5.0, "steps": 20 }
        })");
        std::ostringstream out;
        REQUIRE(cmd_simulate(cfg, CommandOptions{}, out) == exit_ok);
        const auto table = split_csv(out.str());
        const int col_purity = column_index(table[0], "purity");
        REQUIRE(col_purity > 0);
        for (size_t r = 2; r < table.size(); ++r)
            CHECK(std::stod(table[r][col_purity]) < std::stod(table[r - 1][col_purity]));
    }
}

TEST_CASE("commands: engineer solves, verifies, and rejects") {
    const std::string om_base = R"({
        "scenario": { "kind": "optomech-extended",
            "params": { "m": 1.0, "omega": 2.0, "gamma": 2.0, "kappa": 3.0, "g": 1.0%EXTRA% } }
    })";
    const auto with_extra = [&](const std::string& extra) {
        std::string text = om_base;
        text.replace(text.find("%EXTRA%"), 7, extra);
        return parse_config_text(text);
    };
    {  // solve path, machine output
        std::ostringstream out;
        REQUIRE(cmd_engineer(with_extra(""), CommandOptions{"machine", ""}, out) == exit_ok);
        const Json j = Json::parse(out.str());
        CHECK(j["solved"]["mu"].get<double>() == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(j["solved"]["nu"].get<double>() == doctest::Approx(-4.0).epsilon(1e-12));
        CHECK(j["report"]["df"]["pairs"] == 1);
    }
    {  // verify path: correct candidate accepted
        std::ostringstream out;
        CHECK(cmd_engineer(with_extra(", \"mu\": 1.0, \"nu\": -4.0"), CommandOptions{}, out) ==
              exit_ok);
    }
    {  // verify path: wrong candidate -> infeasible
        std::ostringstream out;
        CHECK(cmd_engineer(with_extra(", \"mu\": 1.0, \"nu\": 4.0"), CommandOptions{}, out) ==
              exit_engineering_infeasible);
        CHECK(out.str().find("no protected subspace") != std::string::npos);
    }
    {  // half a candidate -> validation error
        std::ostringstream out;
        CHECK(cmd_engineer(with_extra(", \"mu\": 1.0"), CommandOptions{}, out) ==
              exit_parse_error);
    }
    {  // ring solve
        const RunConfig cfg = parse_config_text(R"({
            "scenario": { "kind": "ring-trap",
                "params": { "omega": 1.0, "k": 1.0, "kappa": 1.0 } }
        })");
        std::ostringstream out;
        REQUIRE(cmd_engineer(cfg, CommandOptions{"machine", ""}, out) == exit_ok);
        const Json j = Json::parse(out.str());
        CHECK(j["solved"]["omega_prime"].get<double>() == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(j["solved"]["k2"].get<double>() ==
              doctest::Approx(std::sqrt(3.0)).epsilon(1e-12));
        CHECK(j["solved"]["k3"].get<double>() ==
              doctest::Approx(2.0 - std::sqrt(3.0)).epsilon(1e-12));
        CHECK(j["report"]["df"]["pairs"] == 2);
        CHECK(j["report"]["stability"]["stable"] == true);
    }
    {  // ring verify with a partially-protected candidate: only one pair
        const RunConfig cfg = parse_config_text(R"({
            "scenario": { "kind": "ring-trap",
                "params": { "omega": 1.0, "k": 1.0, "kappa": 1.0,
                            "omega_prime": 1.5, "k2": 1.0, "k3": 1.0 } }
        })");
        std::ostringstream out;
        CHECK(cmd_engineer(cfg, CommandOptions{}, out) == exit_engineering_infeasible);
    }
    {  // nothing to solve for this kind
        std::ostringstream out;
        CHECK(cmd_engineer(pair_config(1.0), CommandOptions{}, out) == exit_parse_error);
    }
}

TEST_CASE("commands: stability focuses the certificate") {
    const RunConfig cfg = parse_config_text(R"({
        "scenario": { "kind": "dispersive-pair", "params": { "kappa": 2.0 } }
    })");
    std::ostringstream text_out;
    CHECK(cmd_stability(cfg, CommandOptions{}, text_out) == exit_ok);
    CHECK(text_out.str().find("not stable") != std::string::npos);
    std::ostringstream machine_out;
    CHECK(cmd_stability(cfg, CommandOptions{"machine", ""}, machine_out) == exit_ok);
    const Json j = Json::parse(machine_out.str());
    CHECK(j["stability"]["stable"] == false);
    CHECK(j["df"]["pairs"] == 1);
    CHECK(j["stability"]["worst_pair_real"].get<double>() >= -1e-10);
}

TEST_CASE("commands: analyze runs the candidate Hamiltonian check") {
    // The engineered ring preserves its own protected subspace; adding a local
    // trap perturbation on particle 1 does not.
    const QuantumLinearSystem sys =
        ring_trap(1.0, 1.0, 1.0, std::sqrt(3.0), 2.0 - std::sqrt(3.0), 1.0);
    RunConfig cfg = parse_config_text(R"({
        "scenario": { "kind": "ring-trap",
            "params": { "omega": 1.0, "k": 1.0, "kappa": 1.0 } }
    })");
    cfg.scenario->omega_prime = 1.0;
    cfg.scenario->k2 = std::sqrt(3.0);
    cfg.scenario->k3 = 2.0 - std::sqrt(3.0);

    cfg.candidate_g = sys.G;
    std::ostringstream good;
    CHECK(cmd_analyze(cfg, CommandOptions{"machine", ""}, good) == exit_ok);
    const Json jg = Json::parse(good.str());
    REQUIRE_FALSE(jg["hamiltonian_check"].is_null());
    CHECK(jg["hamiltonian_check"]["preserves"] == true);
    CHECK(jg["hamiltonian_check"]["sufficient_only"] == false);

    Matrix local = Matrix::Zero(6, 6);
    local(0, 0) = 1.0;  // extra q1^2 trap term
    cfg.candidate_g = local;
    std::ostringstream bad;
    CHECK(cmd_analyze(cfg, CommandOptions{"machine", ""}, bad) == exit_ok);
    const Json jb = Json::parse(bad.str());
    CHECK(jb["hamiltonian_check"]["preserves"] == false);
}

TEST_CASE("commands: reproduce tables run and fail loudly on bad ids") {
    {
        std::ostringstream out;
        CHECK(cmd_reproduce("VA", CommandOptions{}, out) == exit_ok);
        CHECK(out.str().find("0 failed") != std::string::npos);
    }
    {
        std::ostringstream out;
        CHECK(cmd_reproduce("unknown", CommandOptions{}, out) == exit_parse_error);
        CHECK(out.str().find("unknown example id") != std::string::npos);
    }
    {
        std::ostringstream out;
        CHECK(cmd_reproduce("VIB", CommandOptions{"machine", ""}, out) == exit_ok);
        const Json rows = Json::parse(out.str());
        REQUIRE(rows.is_array());
        REQUIRE_FALSE(rows.empty());
        for (const Json& row : rows) {
            CHECK(row["pass"] == true);
            CHECK(row["criterion"] == 7);
        }
    }
}
