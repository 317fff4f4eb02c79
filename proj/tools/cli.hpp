#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hom::cli {

/// Process exit codes.
enum ExitCode : int {
    kSuccess = 0,
    kUsageError = 1,
    kDataError = 2,
    kNotConverged = 3,
};

/// Runs the homsim command line. args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hom::cli
