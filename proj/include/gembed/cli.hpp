#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace gembed::cli {

/// Exit codes: 0 success, 1 validation error, 2 numerical failure.
inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitNumerical = 2;

/// `args` excludes the program name. Errors go to `err` as one JSON object.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int run(int argc, char** argv);

}  // namespace gembed::cli
