#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace nullbound {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitNegative = 2;  // NEC violated, diverging, NotInFlowImage

/// Runs the command line (without the program name). Data goes to `out`,
/// diagnostics to `err`; returns the process exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace nullbound
