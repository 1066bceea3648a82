#pragma once

#include <string>
#include <vector>

namespace pvbess::cli {

inline constexpr const char* kToolVersion = "1.0.0";

enum ExitCode : int { kOk = 0, kInputError = 1, kInfeasible = 2, kInternalError = 3 };

/// Entry point of the `pvbess` tool. Returns the process exit code.
int run(int argc, const char* const* argv);

/// Convenience overload for tests: args exclude the program name.
int run(const std::vector<std::string>& args);

}  // namespace pvbess::cli
