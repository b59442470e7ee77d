#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace armcal {

/// Exit statuses of run_command.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;  // bad flags, unknown method, unreadable config or input

/// Runs one `armcal` invocation. `args` excludes the program name.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace armcal
