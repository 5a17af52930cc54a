#include "fleetlog/csv.hpp"

#include <fstream>
#include <sstream>

namespace fleetlog::csv {

int Table::column_index(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return static_cast<int>(i);
  }
  return -1;
}

namespace {

std::vector<std::vector<std::string>> parse_records(const std::string& text) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  std::size_t line = 1;

  auto end_field = [&] {
    record.push_back(field);
    field.clear();
    field_started = false;
  };
  auto end_record = [&] {
    end_field();
    records.push_back(std::move(record));
    record.clear();
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field += c;
      }
      continue;
    }
    switch (c) {
      case '"':
        if (field_started && !field.empty()) {
          throw ParseError("quote inside unquoted field", line);
        }
        in_quotes = true;
        field_started = true;
        break;
      case ',':
        end_field();
        break;
      case '\r':
        break;  // handled with the following \n
      case '\n':
        end_record();
        ++line;
        break;
      default:
        field += c;
        field_started = true;
        break;
    }
  }
  if (in_quotes) throw ParseError("unterminated quoted field", line);
  if (field_started || !record.empty()) end_record();
  return records;
}

}  // namespace

Table read_string(const std::string& text) {
  auto records = parse_records(text);
  if (records.empty()) return {};
  Table t;
  t.header = records.front();
  for (std::size_t r = 1; r < records.size(); ++r) {
    if (records[r].size() != t.header.size()) {
      throw ParseError("row has " + std::to_string(records[r].size()) +
                           " fields, header has " +
                           std::to_string(t.header.size()),
                       r + 1);
    }
    t.rows.push_back(std::move(records[r]));
  }
  return t;
}

Table read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open CSV file: " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return read_string(buf.str());
}

std::string quote_field(const std::string& field) {
  bool needs_quotes = field.find_first_of(",\"\r\n") != std::string::npos;
  if (!needs_quotes) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string to_string(const Table& table) {
  std::string out;
  auto write_row = [&](const std::vector<std::string>& row) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += quote_field(row[i]);
    }
    out += '\n';
  };
  write_row(table.header);
  for (const auto& row : table.rows) write_row(row);
  return out;
}

void write_file(const std::filesystem::path& path, const Table& table) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot write CSV file: " + path.string());
  }
  out << to_string(table);
}

}  // namespace fleetlog::csv
