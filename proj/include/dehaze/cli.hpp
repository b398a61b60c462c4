#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace dehaze {

/// Entry point of the `dehaze` tool. `args` excludes the program name.
/// Returns 0 on success, 1 on an operational failure and 2 on a usage error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dehaze
