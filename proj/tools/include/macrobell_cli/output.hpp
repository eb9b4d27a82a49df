#pragma once

#include <ostream>
#include <string>
#include <utility>
#include <vector>

namespace macrobell::cli {

/// 12 significant digits, for CSV and JSON.
std::string machine_number(double x);
/// 4 significant digits, for tables.
std::string human_number(double x);

/// Quotes a CSV field when it contains a comma, quote or line break.
std::string csv_field(const std::string& s);
void write_csv_row(std::ostream& out, const std::vector<std::string>& fields);

/// Left-aligned in a field of `width`, with at least one trailing space.
std::string pad_right(const std::string& s, std::size_t width = 14);

/// Two-column key/value table with aligned keys.
void write_table(std::ostream& out, const std::vector<std::pair<std::string, std::string>>& rows);

}  // namespace macrobell::cli
