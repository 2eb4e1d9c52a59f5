#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace dstft::cli {

enum ExitCode : int { ok = 0, config_error = 2, io_error = 3, degenerate = 4 };

/// Runs one invocation; args exclude the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dstft::cli
