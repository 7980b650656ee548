#pragma once

#include <string>
#include <vector>

namespace thz::cli {

/// Exit codes of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitIo = 2;

/// Runs the tool on argv-style arguments (args[0] is the program name).
/// Errors go to stderr as a single line "thzr: <CODE>: <message>".
int dispatch(const std::vector<std::string>& args);

} // namespace thz::cli
