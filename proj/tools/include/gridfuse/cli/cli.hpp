#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace gridfuse::cli {

/// Exit codes of `run`.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUserError = 1;
inline constexpr int kExitNumericalFailure = 2;

/// Entry point of the gridfuse command line. `args` includes the program name.
/// Data goes to files or `out`; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gridfuse::cli
