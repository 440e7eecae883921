#pragma once

#include <string>

namespace mdepth {

/// Shortest decimal string that parses back to exactly `x`.
std::string format_double(double x);

/// Parses a full decimal field; throws InvalidArgument naming `what` otherwise.
double parse_double(const std::string& field, const char* what);

}  // namespace mdepth
