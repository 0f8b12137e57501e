#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cobweb::cli {

// Exit statuses.
inline constexpr int kOk = 0;
inline constexpr int kUsageError = 1;
inline constexpr int kDataError = 2;
inline constexpr int kInternalError = 3;

// Runs the convcobweb command line. `args` excludes the program name.
// Normal output goes to `out`, diagnostics and progress to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cobweb::cli
