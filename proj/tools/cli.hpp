#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace tsdiag::cli {

// Exit codes: 0 success, 1 input or validation error, 2 internal error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 1;
inline constexpr int kExitInternal = 2;

// Runs the tool with `args` (args[0] is the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tsdiag::cli
