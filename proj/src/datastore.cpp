#include "fleetlog/datastore.hpp"

#include <algorithm>

#include "fleetlog/csv.hpp"
#include "fleetlog/date.hpp"
#include "fleetlog/environment.hpp"

namespace fleetlog {

namespace {

bool parses_as_integer(const std::string& s) {
  if (s.empty()) return false;
  std::size_t i = (s[0] == '-') ? 1 : 0;
  if (i == s.size() || s.size() - i > 18) return false;  // keep inside int64
  for (; i < s.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  }
  return true;
}

sql::Table table_from_csv(const std::string& name, const csv::Table& source) {
  sql::Table table;
  table.name = name;

  std::size_t ncols = source.header.size();
  std::vector<bool> all_int(ncols, true), all_date(ncols, true);
  for (const auto& row : source.rows) {
    for (std::size_t c = 0; c < ncols; ++c) {
      if (all_int[c] && !parses_as_integer(row[c])) all_int[c] = false;
      if (all_date[c] && !Date::looks_like(row[c])) all_date[c] = false;
    }
  }
  for (std::size_t c = 0; c < ncols; ++c) {
    sql::ColumnType type = sql::ColumnType::kText;
    if (!source.rows.empty()) {
      if (all_int[c]) type = sql::ColumnType::kInteger;
      else if (all_date[c]) type = sql::ColumnType::kDate;
    }
    table.columns.push_back({source.header[c], type});
  }
  table.rows.reserve(source.rows.size());
  for (const auto& row : source.rows) {
    std::vector<sql::Value> values;
    values.reserve(ncols);
    for (std::size_t c = 0; c < ncols; ++c) {
      if (table.columns[c].type == sql::ColumnType::kInteger) {
        values.emplace_back(std::stoll(row[c]));
      } else {
        values.emplace_back(row[c]);
      }
    }
    table.rows.push_back(std::move(values));
  }
  return table;
}

}  // namespace

Datastore Datastore::load(const std::filesystem::path& env_dir) {
  const std::pair<const char*, const char*> files[] = {
      {"fleet_registry", envfile::kRegistry},
      {"service_catalog", envfile::kCatalog},
      {"signal_odometer", envfile::kOdometer},
  };
  sql::Engine engine;
  for (const auto& [table_name, file_name] : files) {
    auto path = env_dir / file_name;
    if (!std::filesystem::exists(path)) {
      throw StoreError("environment is missing " + std::string(file_name) +
                       " (" + path.string() + ")");
    }
    try {
      engine.add_table(table_from_csv(table_name, csv::read_file(path)));
    } catch (const csv::ParseError& e) {
      throw StoreError("malformed CSV in " + path.string() + ": " + e.what());
    }
  }
  return from_engine(std::move(engine));
}

Datastore Datastore::from_engine(sql::Engine engine) {
  Datastore store;
  store.engine_ = std::move(engine);
  return store;
}

std::vector<std::string> Datastore::list_tables() const {
  std::vector<std::string> names;
  for (const auto& t : engine_.tables()) names.push_back(t.name);
  std::sort(names.begin(), names.end());
  return names;
}

TableSchema Datastore::describe_table(const std::string& name) const {
  const sql::Table* table = engine_.find_table(name);
  if (!table) {
    std::string valid;
    for (const auto& n : list_tables()) {
      if (!valid.empty()) valid += ", ";
      valid += n;
    }
    throw ToolInvocationError("unknown table '" + name +
                              "'; valid tables: " + valid);
  }
  TableSchema schema;
  schema.name = table->name;
  for (const auto& col : table->columns) {
    schema.columns.emplace_back(col.name, sql::column_type_name(col.type));
  }
  return schema;
}

Datastore::SqlOutcome Datastore::run_sql(const std::string& query,
                                         std::optional<int> limit) const {
  int cap = limit.value_or(kHardRowCap);
  if (cap < 1) {
    return {std::nullopt, "limit must be a positive integer"};
  }
  if (cap > kHardRowCap) {
    return {std::nullopt, "limit exceeds the hard row cap of " +
                              std::to_string(kHardRowCap)};
  }
  auto outcome = engine_.execute(query, cap);
  if (const auto* err = std::get_if<sql::SqlError>(&outcome)) {
    return {std::nullopt, err->to_string()};
  }
  return {std::get<sql::QueryResult>(std::move(outcome)), std::nullopt};
}

nlohmann::ordered_json database_tool_schemas() {
  using Json = nlohmann::ordered_json;
  Json tools = Json::array();
  tools.push_back(
      {{"type", "function"},
       {"function",
        {{"name", "list_tables"},
         {"description",
          "Enumerates available database tables."},
         {"parameters",
          {{"type", "object"},
           {"properties", Json::object()},
           {"required", Json::array()}}}}}});
  tools.push_back(
      {{"type", "function"},
       {"function",
        {{"name", "describe_table"},
         {"description",
          "Provides schema introspection for a given table (columns and data "
          "types)."},
         {"parameters",
          {{"type", "object"},
           {"properties",
            {{"table_name", {{"type", "string"}}}}},
           {"required", Json::array({"table_name"})}}}}}});
  tools.push_back(
      {{"type", "function"},
       {"function",
        {{"name", "run_sql"},
         {"description",
          "Executes a SQL SELECT query with a row cap (limit) to avoid large "
          "responses."},
         {"parameters",
          {{"type", "object"},
           {"properties",
            {{"query", {{"type", "string"}}},
             {"limit",
              {{"type", "integer"},
               {"description", "maximum rows to return (default 200)"}}}}},
           {"required", Json::array({"query"})}}}}}});
  return tools;
}

bool is_database_tool(const std::string& name) {
  return name == "list_tables" || name == "describe_table" || name == "run_sql";
}

nlohmann::ordered_json dispatch_database_tool(
    const Datastore& store, const std::string& name,
    const nlohmann::ordered_json& args) {
  using Json = nlohmann::ordered_json;
  if (!args.is_object()) {
    throw ToolInvocationError("tool arguments must be a JSON object");
  }
  if (name == "list_tables") {
    return Json{{"tables", store.list_tables()}};
  }
  if (name == "describe_table") {
    if (!args.contains("table_name") || !args.at("table_name").is_string()) {
      throw ToolInvocationError(
          "describe_table requires a string 'table_name' argument");
    }
    TableSchema schema =
        store.describe_table(args.at("table_name").get<std::string>());
    Json columns = Json::array();
    for (const auto& [col, type] : schema.columns) {
      columns.push_back({{"name", col}, {"type", type}});
    }
    return Json{{"table", schema.name}, {"columns", columns}};
  }
  if (name == "run_sql") {
    if (!args.contains("query") || !args.at("query").is_string()) {
      throw ToolInvocationError("run_sql requires a string 'query' argument");
    }
    std::optional<int> limit;
    if (args.contains("limit")) {
      if (!args.at("limit").is_number_integer()) {
        throw ToolInvocationError("run_sql 'limit' must be an integer");
      }
      limit = args.at("limit").get<int>();
    }
    auto outcome = store.run_sql(args.at("query").get<std::string>(), limit);
    if (outcome.error) {
      return Json{{"error", *outcome.error}};
    }
    Json rows = Json::array();
    for (const auto& row : outcome.result->rows) {
      Json out_row = Json::array();
      for (const auto& v : row) {
        if (std::holds_alternative<std::monostate>(v)) {
          out_row.push_back(nullptr);
        } else if (const auto* i = std::get_if<long long>(&v)) {
          out_row.push_back(*i);
        } else if (const auto* d = std::get_if<double>(&v)) {
          out_row.push_back(*d);
        } else {
          out_row.push_back(std::get<std::string>(v));
        }
      }
      rows.push_back(std::move(out_row));
    }
    return Json{{"columns", outcome.result->columns},
                {"rows", rows},
                {"truncated", outcome.result->truncated}};
  }
  throw ToolInvocationError("unknown tool: '" + name + "'");
}

}  // namespace fleetlog
