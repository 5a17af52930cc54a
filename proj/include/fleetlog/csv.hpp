#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace fleetlog::csv {

struct ParseError : std::runtime_error {
  ParseError(const std::string& msg, std::size_t line)
      : std::runtime_error(msg + " (line " + std::to_string(line) + ")"),
        line_number(line) {}
  std::size_t line_number;
};

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  int column_index(const std::string& name) const;  // -1 when absent
};

/// RFC-4180: comma-delimited, double-quote quoting with "" escapes, first row
/// is the header. Accepts both \n and \r\n line ends.
Table read_file(const std::filesystem::path& path);
Table read_string(const std::string& text);

std::string quote_field(const std::string& field);
std::string to_string(const Table& table);
void write_file(const std::filesystem::path& path, const Table& table);

}  // namespace fleetlog::csv
