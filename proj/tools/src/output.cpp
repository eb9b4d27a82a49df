#include "macrobell_cli/output.hpp"

#include <algorithm>

#include <fmt/format.h>

namespace macrobell::cli {

std::string machine_number(double x) { return fmt::format("{:.12g}", x); }

std::string human_number(double x) { return fmt::format("{:.4g}", x); }

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + '"';
}

void write_csv_row(std::ostream& out, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) out << (i ? "," : "") << csv_field(fields[i]);
  out << "\r\n";
}

std::string pad_right(const std::string& s, std::size_t width) {
  return s.size() < width ? s + std::string(width - s.size(), ' ') : s + ' ';
}

void write_table(std::ostream& out, const std::vector<std::pair<std::string, std::string>>& rows) {
  std::size_t width = 0;
  for (const auto& r : rows) width = std::max(width, r.first.size());
  for (const auto& [k, v] : rows) out << fmt::format("{:<{}}  {}\n", k, width, v);
}

}  // namespace macrobell::cli
