#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace elqkd::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalidConfig = 2;
inline constexpr int kExitEmptyCurve = 3;
inline constexpr int kExitDegenerateSimulation = 4;

/// Runs one invocation. `args` excludes the program name. Results go to
/// `out` unless --out names a file, diagnostics go to `err`.
int run(std::vector<std::string> args, std::ostream& out, std::ostream& err);

}  // namespace elqkd::cli
