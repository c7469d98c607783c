#pragma once

#include <string>
#include <vector>

namespace uwb1a::cli {

/// Runs the command-line front end. Exit codes: 0 success, 2 usage error,
/// 3 data error (parse/IO failures).
int run(const std::vector<std::string>& args);

int run(int argc, const char* const* argv);

}  // namespace uwb1a::cli
