#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace owc::cli {

/// Runs the command line and returns the process exit code. Results and
/// progress go to `out`, errors to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace owc::cli
