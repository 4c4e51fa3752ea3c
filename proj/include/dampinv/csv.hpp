#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace dampinv::csv {

/// Shortest decimal representation that parses back to the same double.
std::string format(double v);

/// Exact inverse of format(); throws InvalidArgument on malformed input.
double parse_double(std::string_view s);

/// Split a comma-separated line (no quoting; the formats here never need it).
std::vector<std::string_view> split(std::string_view line);

}  // namespace dampinv::csv
