#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace hbn::cli {

/// Runs one `hbn` invocation. `args` excludes the program name. Exit codes:
/// 0 success, 1 failed checks or degenerate/unsupported inference,
/// 2 unreadable or malformed inputs and bad command lines.
int run(std::vector<std::string> args, std::ostream& out, std::ostream& err);

}  // namespace hbn::cli
