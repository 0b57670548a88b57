#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cvhar::cli {

/// Runs one invocation; returns the process exit code (0 ok, 1 domain
/// error, 2 I/O or configuration error). args[0] is the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cvhar::cli
