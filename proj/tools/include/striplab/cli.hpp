#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace striplab::cli {

// Exit codes: 0 success (an infeasible condition is a result, not a
// failure), 1 usage or invalid parameters, 2 I/O or malformed input file,
// 3 numerical non-convergence.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitIo = 2;
inline constexpr int kExitNumeric = 3;

// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int run(int argc, char** argv);

}  // namespace striplab::cli
