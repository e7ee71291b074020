#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace reacquire::cli {

/// Runs one command line (args[0] is the program name). Returns the process
/// exit code: 0 on success, 1 on bad input or refusal, 2 on usage errors.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace reacquire::cli
