#pragma once

#include <ostream>

namespace scorecraft {

/// Runs the command-line interface. Returns the process exit code:
/// 0 success, 1 validation error or bad usage, 2 numerical failure.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace scorecraft
