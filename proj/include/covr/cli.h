#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace covr {

// Entry point behind the `covr` binary. args[0] is the program name.
// Exit codes: 0 = artifact fully produced, 1 = error, 2 = partial result
// (rerun with --skip-missing to accept it).
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace covr
