#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace copeland::csv {

std::string_view trim(std::string_view s);

// Splits on commas and trims each field. No quoting support.
std::vector<std::string> split(std::string_view line);

double parse_double(std::string_view field);
long long parse_int(std::string_view field);

// Shortest decimal form that round-trips a double.
std::string format_double(double v);

// Reads the stream line by line, dropping '\r', blank lines and lines whose
// first non-space character is '#'.
std::vector<std::string> read_lines(std::istream& in);

}  // namespace copeland::csv
