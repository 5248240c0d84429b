// Command-line front end. run_cli is the whole program minus main(), so tests
// can drive it with in-memory streams.
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace nodal::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitNotCertified = 2;

/// args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace nodal::cli
