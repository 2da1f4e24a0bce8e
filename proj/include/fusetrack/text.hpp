#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace fusetrack::text {

/// Shortest representation that round-trips exactly.
std::string format_number(double v);
std::string format_number(std::int64_t v);

std::string_view trim(std::string_view s);
std::vector<std::string_view> split(std::string_view s, char sep);

/// Throw Error(kParse) mentioning `context` on malformed input.
double parse_double(std::string_view s, std::string_view context);
std::int64_t parse_int(std::string_view s, std::string_view context);
bool parse_bool(std::string_view s, std::string_view context);

std::string read_file(const std::string& path);
/// Writes the whole file, creating parent directories.
void write_file(const std::string& path, std::string_view content);

}  // namespace fusetrack::text
