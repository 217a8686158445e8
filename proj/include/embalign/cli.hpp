#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace embalign::cli {

/// Seed used when --seed is not given.
inline constexpr unsigned long long kDefaultSeed = 42;

/// Runs one command line (args[0] is the program name). Returns the process
/// exit code: 0 success, 1 usage, 2 I/O or parse, 3 numeric.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace embalign::cli
