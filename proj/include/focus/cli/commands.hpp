#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "focus/cli/run_config.hpp"

namespace focus::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitRuntime = 2;

const std::vector<std::string>& command_names();

// Validates the config, runs one command and writes its artifacts under the
// `out` directory. Errors are reported on `err`; returns the exit code.
int run_command(std::string_view command, const RunConfig& config, std::ostream& log,
                std::ostream& err);

}  // namespace focus::cli
