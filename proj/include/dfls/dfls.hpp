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
// dfls.hpp — Umbrella header: the whole library in one include.

#include "dfls/errors.hpp"     // error taxonomy and exit codes
#include "dfls/qls.hpp"        // symplectic structure and system assembly
#include "dfls/df.hpp"         // protected-subspace detection and decomposition
#include "dfls/gaussian.hpp"   // moment flows, stability certificate, metrics
#include "dfls/scenarios.hpp"  // worked-example system builders
#include "dfls/config.hpp"     // run configuration schema and builders
#include "dfls/report.hpp"     // analysis report and serialization
#include "dfls/commands.hpp"   // analyze / stability / simulate / engineer
#include "dfls/reproduce.hpp"  // regression tables and the reproduce command
