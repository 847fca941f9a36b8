#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace scorecraft::csv {

struct Row {
  std::size_t line = 0;  // 1-based source line
  std::vector<std::string> cells;
};

/// Splits comma-separated text into rows. Double-quoted cells may contain
/// commas and doubled quotes. Blank lines and lines whose first character
/// is `#` are skipped. Cells are not trimmed.
std::vector<Row> parse(std::string_view text);

/// Quotes a cell only when it needs it.
std::string escape(std::string_view cell);

std::string read_file(const std::string& path);
/// Writes to `path.tmp` and renames over `path`.
void write_file_atomic(const std::string& path, std::string_view contents);

/// Shortest round-trip decimal form of a double ("inf"/"-inf" for infinities).
std::string format_double(double v);
/// Parses a full-string double; accepts inf/-inf. Returns false on junk.
bool parse_double(std::string_view text, double& out);

std::string trim(std::string_view s);

}  // namespace scorecraft::csv
