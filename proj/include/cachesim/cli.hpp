// Copyright 2026 The cachesim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line driver.
//
//   cachesim sim    [-cache:il1 ..] [-flush true|false] [-mem:lat F N] ... TRACE
//   cachesim vexsim CFG TRACE [--profile]
//   cachesim sweep  --sets LIST --bsize LIST --assoc LIST [--opt] TRACE
//   cachesim gen    sequential|loop|random|mixed [options]

#pragma once

#include <iosfwd>
#include <span>
#include <string>

#include "cachesim/hierarchy.hpp"

namespace cachesim {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitInput = 2,   // unreadable or malformed trace, inconsistent data
  kExitConfig = 3,  // cache, hierarchy or vex.cfg configuration errors
};

/// Runs one subcommand. `args` excludes the program name. When `clock` is
/// set it replaces the wall clock for elapsed-time fields.
int run_cli(std::span<const std::string> args, std::ostream& out, std::ostream& err,
            const Clock& clock = {});

/// The `sim` flag listing, one `# -flag default # description` line each.
std::string sim_help();

}  // namespace cachesim
