#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace pinlab::text {

/// Shortest round-trip decimal form; '.' separator regardless of locale.
std::string format_double(double x);

/// Strict parse of a full token; throws Error(Format) on trailing garbage.
double parse_double(std::string_view s);
long long parse_int(std::string_view s);
unsigned long long parse_u64(std::string_view s);
bool parse_bool(std::string_view s);

std::string_view trim(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);

}  // namespace pinlab::text
