#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fdrkit::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitIo = 1;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitCheckFailed = 3;

/// Runs the command line `args` (program name excluded). Input that is not
/// read from a file comes from `in`; reports go to `out` unless --output is
/// given; diagnostics go to `err`. Returns the process exit status.
int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
        std::ostream& err);

}  // namespace fdrkit::cli
