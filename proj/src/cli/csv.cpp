#include "csv.hpp"

#include <charconv>
#include <istream>
#include <string_view>

namespace fdrkit::cli {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

}  // namespace

Column read_column(std::istream& in) {
  Column column;
  std::string line;
  std::size_t number = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++number;
    std::string_view view(line);
    if (number == 1 && view.starts_with("\xEF\xBB\xBF")) view.remove_prefix(3);
    view = trim(view);
    if (!have_header) {
      if (view.empty()) throw InputError("line 1: missing header (expected 'p' or 'e')");
      column.header = std::string(view);
      have_header = true;
      continue;
    }
    if (view.empty()) continue;
    double value = 0.0;
    const auto [end, ec] = std::from_chars(view.data(), view.data() + view.size(), value);
    if (ec != std::errc() || end != view.data() + view.size()) {
      throw InputError("line " + std::to_string(number) + ": cannot parse '" +
                       std::string(view) + "' as a number");
    }
    column.values.push_back(value);
    column.lines.push_back(number);
  }
  if (in.bad()) throw std::ios_base::failure("read failed");
  if (column.values.empty()) throw InputError("no values");
  return column;
}

std::string format_double(double value) {
  char buffer[32];
  const auto [end, ec] = std::to_chars(buffer, buffer + sizeof buffer, value);
  return std::string(buffer, end);
}

}  // namespace fdrkit::cli
