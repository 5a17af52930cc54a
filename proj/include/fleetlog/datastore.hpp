#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fleetlog/sql.hpp"

namespace fleetlog {

struct StoreError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A malformed tool invocation (unknown tool, bad arguments, unknown table).
/// These consume the per-tool retry budget; run_sql statement faults do not —
/// they are ordinary observations returned to the agent.
struct ToolInvocationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct TableSchema {
  std::string name;
  std::vector<std::pair<std::string, std::string>> columns;  // (name, type)
};

/// Read-only relational view over an environment's reference tables. The
/// maintenance log is never loaded; records reach agents only via the prompt.
class Datastore {
 public:
  static constexpr int kHardRowCap = 200;

  static Datastore load(const std::filesystem::path& env_dir);
  static Datastore from_engine(sql::Engine engine);

  std::vector<std::string> list_tables() const;
  TableSchema describe_table(const std::string& name) const;

  struct SqlOutcome {
    std::optional<sql::QueryResult> result;
    std::optional<std::string> error;
  };
  /// Never throws for statement faults; the error comes back in-band.
  SqlOutcome run_sql(const std::string& query,
                     std::optional<int> limit = std::nullopt) const;

  const sql::Engine& engine() const { return engine_; }

 private:
  sql::Engine engine_;
};

/// JSON tool schemas for the three database tools (function-calling wire
/// format).
nlohmann::ordered_json database_tool_schemas();

/// Executes one database tool call; the result object is what the agent sees.
/// Throws ToolInvocationError for malformed invocations.
nlohmann::ordered_json dispatch_database_tool(const Datastore& store,
                                              const std::string& name,
                                              const nlohmann::ordered_json& args);

bool is_database_tool(const std::string& name);

}  // namespace fleetlog
