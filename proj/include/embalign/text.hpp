#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace embalign {

/// ASCII lowercase; other bytes pass through.
std::string to_lower(std::string s);

/// Splits on runs of spaces, tabs and carriage returns.
std::vector<std::string_view> split_whitespace(std::string_view line);

}  // namespace embalign
