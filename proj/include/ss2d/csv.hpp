#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace ss2d::csv {

/// Shortest text that parses back to the identical double.
std::string fmt(double v);

std::vector<std::string_view> split(std::string_view line, char sep = ',');

double to_double(std::string_view field);
long long to_int(std::string_view field);

/// Reads the next line that is neither empty nor a `#` comment; returns false at EOF.
bool next_row(std::istream& is, std::string& line);

/// Collects `# key=value key=value` pairs from leading comment lines, leaving the stream
/// positioned at the first non-comment line.
std::vector<std::pair<std::string, std::string>> read_comment_header(std::istream& is);

}  // namespace ss2d::csv
