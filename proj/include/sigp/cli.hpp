#pragma once

// Command-line front end. `run` is the whole tool minus the process
// boundary, so tests can drive it in-process.

#include <iosfwd>
#include <string>
#include <vector>

namespace sigp::cli {

inline constexpr const char* kToolName = "sigp";
inline constexpr const char* kVersion = "1.0.0";

enum ExitCode : int { kOk = 0, kNumericFailure = 1, kUsageError = 2 };

/// args excludes the program name. Returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace sigp::cli
