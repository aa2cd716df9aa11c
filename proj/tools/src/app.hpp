#pragma once

#include <iosfwd>

namespace qladder::cli {

/// Parses the command line and runs one subcommand. Returns the process exit code.
int run_app(int argc, const char* const* argv, std::ostream& err);

}  // namespace qladder::cli
