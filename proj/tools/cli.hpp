#pragma once

#include <ostream>

namespace bgpolymer::cli {

enum ExitCode : int { kPass = 0, kCheckFailed = 1, kUsageError = 2 };

// Entry point of the `bgpolymer` tool; callable in-process from tests.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace bgpolymer::cli
