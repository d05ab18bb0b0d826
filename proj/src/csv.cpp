#include "ss2d/csv.hpp"

#include <charconv>
#include <istream>
#include <sstream>

#include "ss2d/error.hpp"

namespace ss2d::csv {

std::string fmt(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc{}) fail(ErrorCategory::Format, "cannot format number");
  return std::string(buf, end);
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

double to_double(std::string_view field) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc{} || ptr != field.data() + field.size())
    fail(ErrorCategory::Format, "not a number: '" + std::string(field) + "'");
  return v;
}

long long to_int(std::string_view field) {
  long long v = 0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc{} || ptr != field.data() + field.size())
    fail(ErrorCategory::Format, "not an integer: '" + std::string(field) + "'");
  return v;
}

bool next_row(std::istream& is, std::string& line) {
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    return true;
  }
  return false;
}

std::vector<std::pair<std::string, std::string>> read_comment_header(std::istream& is) {
  std::vector<std::pair<std::string, std::string>> out;
  while (is.peek() == '#') {
    std::string line;
    std::getline(is, line);
    std::istringstream words(line.substr(1));
    std::string word;
    while (words >> word) {
      const auto eq = word.find('=');
      if (eq != std::string::npos) out.emplace_back(word.substr(0, eq), word.substr(eq + 1));
    }
  }
  return out;
}

}  // namespace ss2d::csv
