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

// dfls_main.cpp — Command-line front end.  Subcommands: analyze, stability,
// simulate, engineer, reproduce.  Thin argument-handling shell: all behavior
// lives in the library's command layer so tests exercise the same code paths.

#include <CLI11.hpp>

#include <iostream>
#include <string>

#include "dfls/dfls.hpp"

namespace {

struct CliArgs {
    std::string config_path;
    std::string out_path;
    std::string format = "text";
    std::string example = "all";
    double tol_rank = 0.0;
    double tol_margin = 0.0;
};

void add_output_flags(CLI::App* sub, CliArgs& args) {
    sub->add_option("--out", args.out_path, "write the machine-form output to this file");
    sub->add_option("--format", args.format, "stdout rendering")
        ->check(CLI::IsMember({"text", "machine"}))
        ->capture_default_str();
}

void add_config_flags(CLI::App* sub, CliArgs& args) {
    sub->add_option("--config", args.config_path, "path to the JSON run configuration")
        ->required();
    sub->add_option("--tol-rank", args.tol_rank,
                    "override the numerical rank tolerance (0 < F < 1)");
    sub->add_option("--tol-margin", args.tol_margin,
                    "override the stability margin tolerance (0 < F < 1)");
    add_output_flags(sub, args);
}

dfls::RunConfig load_config(const CliArgs& args, const CLI::App* sub) {
    dfls::RunConfig cfg = dfls::load_config_file(args.config_path);
    if (sub->count("--tol-rank") > 0) {
        if (!(args.tol_rank > 0.0 && args.tol_rank < 1.0))
            throw dfls::ParseError("--tol-rank must lie in (0, 1)");
        cfg.tol_rank = args.tol_rank;
    }
    if (sub->count("--tol-margin") > 0) {
        if (!(args.tol_margin > 0.0 && args.tol_margin < 1.0))
            throw dfls::ParseError("--tol-margin must lie in (0, 1)");
        cfg.tol_margin = args.tol_margin;
    }
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"dfls — decoherence-free subsystem analysis for linear open quantum systems"};
    app.require_subcommand(1);
    CliArgs args;

    CLI::App* analyze = app.add_subcommand(
        "analyze", "detect and decompose the protected subsystem of a configured system");
    add_config_flags(analyze, args);
    CLI::App* stability = app.add_subcommand(
        "stability", "run the decomposition and report the stability certificate");
    add_config_flags(stability, args);
    CLI::App* simulate = app.add_subcommand(
        "simulate", "propagate Gaussian moments on the configured time grid and emit CSV");
    add_config_flags(simulate, args);
    CLI::App* engineer = app.add_subcommand(
        "engineer", "solve (or verify) scenario parameters that create a protected subsystem");
    add_config_flags(engineer, args);
    CLI::App* reproduce = app.add_subcommand(
        "reproduce", "run the built-in regression tables for the worked examples");
    reproduce->add_option("--example", args.example, "VA, VB, VIA, VIB, or all")
        ->capture_default_str();
    add_output_flags(reproduce, args);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);  // prints the CLI11 message
        return dfls::exit_parse_error;
    }

    const dfls::CommandOptions opts{args.format, args.out_path};
    try {
        if (reproduce->parsed()) return dfls::cmd_reproduce(args.example, opts, std::cout);
        const CLI::App* active = app.get_subcommands().at(0);
        const dfls::RunConfig cfg = load_config(args, active);
        if (analyze->parsed()) return dfls::cmd_analyze(cfg, opts, std::cout);
        if (stability->parsed()) return dfls::cmd_stability(cfg, opts, std::cout);
        if (simulate->parsed()) return dfls::cmd_simulate(cfg, opts, std::cout);
        if (engineer->parsed()) return dfls::cmd_engineer(cfg, opts, std::cout);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return dfls::exit_code_for(e);
    }
    return dfls::exit_parse_error;  // unreachable with require_subcommand(1)
}
