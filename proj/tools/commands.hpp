#pragma once

#include <iosfwd>

namespace stopcost::cli {

// Exit codes: 0 success, 2 config or usage error, 3 numeric or validation failure.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumeric = 3;

int run(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace stopcost::cli
