#pragma once

#include <string>
#include <vector>

namespace q3p {

inline constexpr const char* kToolVersion = "0.1.0";

// Runs the q3p command line. Returns 0 on success, 1 on a domain error and
// 2 on a usage error.
int run_cli(const std::vector<std::string>& args);
int run_cli(int argc, const char* const* argv);

}  // namespace q3p
