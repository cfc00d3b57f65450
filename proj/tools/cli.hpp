#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace affrep::cli {

enum ExitCode : int {
    kOk = 0,
    kIoError = 1,
    kBadArguments = 2,
    kClassViolation = 3,
    kCheckFailed = 4,
};

/// Environment variable naming the directory for outputs written without
/// an explicit path. Defaults to the working directory.
inline constexpr const char* kOutputDirEnv = "AFFREP_OUTPUT_DIR";

/// Runs one command line (without the program name). Results go to `out`,
/// diagnostics to `err`; the return value is an ExitCode.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace affrep::cli
