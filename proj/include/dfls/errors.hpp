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
// errors.hpp — Error taxonomy and the process exit codes shared by the tools.

#include <cstdio>
#include <stdexcept>
#include <string>

namespace dfls {

namespace detail {

// Compact general formatting for numbers in diagnostics.  std::to_string uses
// fixed six-decimal notation, which renders every small residual as 0.000000.
inline std::string fmt_num(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

}  // namespace detail

// Exit codes used by every CLI subcommand.
enum ExitCode : int {
    exit_ok = 0,                      // success
    exit_reproduce_failure = 1,       // a reproduction check missed its tolerance
    exit_parse_error = 2,             // bad config / bad CLI arguments
    exit_no_df_subsystem = 3,         // analysis found no protected subsystem
    exit_ill_conditioned_rank = 4,    // a numerical rank decision was borderline
    exit_unphysical_state = 5,        // a state violated the uncertainty bound
    exit_engineering_infeasible = 6,  // parameter engineering could not close
};

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Construction-time validation failures.
struct InvalidDimensionError : Error { using Error::Error; };
struct InvalidHamiltonianError : Error { using Error::Error; };
struct ValidationError : Error { using Error::Error; };

// A numerical rank decision sits too close to the tolerance to trust.
struct IllConditionedRankError : Error { using Error::Error; };
// A candidate subspace is not invariant under the symplectic form.
struct InvarianceViolationError : Error { using Error::Error; };
// Cross-checks of a computed block decomposition failed.
struct DecompositionInconsistencyError : Error { using Error::Error; };

// Dynamics-side failures.
struct NoSteadyStateError : Error { using Error::Error; };
struct UncertaintyViolationError : Error { using Error::Error; };
struct UnphysicalStateError : Error { using Error::Error; };

// Parameter engineering could not reach or verify a solution.
struct EngineeringInfeasibleError : Error { using Error::Error; };

// Config file / CLI input problems.
struct ParseError : Error { using Error::Error; };

}  // namespace dfls
