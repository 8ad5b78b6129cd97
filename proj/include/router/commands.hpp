#pragma once

#include <string>
#include <vector>

namespace router {

// Command-line entry point.  Exit codes: 0 success, 2 config/input error,
// 3 fit failure, 4 numerical failure.
int cli_main(int argc, const char* const* argv);

// Convenience overload for tests: args exclude the program name.
int cli_main(const std::vector<std::string>& args);

}  // namespace router
