// SPDX-License-Identifier: Apache-2.0
//
// The atsss command-line interface, callable in-process.
#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace atsss::cli {

enum ExitCode : int {
  kOk = 0,
  kConfigError = 1,
  kRuntimeError = 2,
  kIoError = 3,
};

/// Runs one invocation; argv[0] is the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Resolves a --config value: an existing path, or the name of a shipped config.
std::filesystem::path resolve_config(const std::string& value);

}  // namespace atsss::cli
