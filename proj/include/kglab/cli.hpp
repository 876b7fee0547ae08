#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace kglab::cli {

inline constexpr const char* kVersion = KGLAB_VERSION;

/// Exit codes of the kg-lab frontend.
enum ExitCode : int {
    kOk = 0,
    kInternalError = 1,  ///< contract violation inside the library
    kUsageError = 2,     ///< invalid arguments or inputs outside a documented envelope
};

/// Runs one kg-lab invocation. Results go to `out` (or the --out file), usage
/// and error messages to `err`.
int parse_and_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Convenience overload; args[0] is the program name.
int parse_and_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace kglab::cli
