#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mixscope::cli {

/// Runs one subcommand. Returns 0 on success, 1 for usage errors, 2 for
/// malformed input data and 3 for analysis errors.
int cli_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int cli_dispatch(int argc, char** argv);

}  // namespace mixscope::cli
