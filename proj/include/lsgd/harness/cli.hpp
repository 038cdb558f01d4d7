// Copyright (c) 2026, The lsgd Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iosfwd>

namespace lsgd::harness {

enum ExitCode : int {
  kExitOk = 0,
  kExitError = 1,
  kExitUsage = 2,  // bad flags or configuration
  kExitDiverged = 3,
};

// Entry point of the lsgd command-line tool. Subcommands: train, sweep, fit,
// plotdata, scenario, gradcheck, version.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace lsgd::harness
