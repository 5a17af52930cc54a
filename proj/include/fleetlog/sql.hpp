#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace fleetlog::sql {

/// NULL, integer, real, or text. Dates live as ISO text; the fixed format
/// makes lexicographic comparison chronological.
using Value = std::variant<std::monostate, long long, double, std::string>;

enum class ColumnType { kText, kInteger, kReal, kDate };

const char* column_type_name(ColumnType type);

struct Column {
  std::string name;
  ColumnType type = ColumnType::kText;
};

struct Table {
  std::string name;
  std::vector<Column> columns;
  std::vector<std::vector<Value>> rows;
};

struct QueryResult {
  std::vector<std::string> columns;
  std::vector<std::vector<Value>> rows;
  bool truncated = false;
};

struct SqlError {
  std::string message;
  std::optional<std::size_t> position;  // character offset, syntax errors only

  std::string to_string() const;
};

using ExecuteResult = std::variant<QueryResult, SqlError>;

/// Type ordering NULL < numbers < text; numbers compare numerically across
/// integer/real, text compares bytewise.
int compare_values(const Value& a, const Value& b);
bool values_equal(const Value& a, const Value& b);

/// Case-insensitive LIKE with % and _ wildcards.
bool like_match(const std::string& value, const std::string& pattern);

std::string value_to_display(const Value& v);

/// Read-only evaluator for a small SELECT subset: projection with aliases,
/// WHERE (=, !=, <, <=, >, >=, LIKE, IN, AND/OR/NOT), inner JOIN on equality,
/// GROUP BY with COUNT/MIN/MAX/SUM/AVG, ORDER BY, LIMIT. Anything else is
/// rejected; statement faults come back as SqlError, never exceptions.
class Engine {
 public:
  void add_table(Table table);
  const std::vector<Table>& tables() const { return tables_; }
  const Table* find_table(const std::string& name) const;

  ExecuteResult execute(const std::string& query, int row_limit) const;

 private:
  std::vector<Table> tables_;
};

}  // namespace fleetlog::sql
