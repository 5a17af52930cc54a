#include <doctest.h>

#include <fstream>

#include "fleetlog/datastore.hpp"
#include "helpers.hpp"

using namespace fleetlog;

TEST_CASE("load exposes exactly the three reference tables") {
  Environment env = test::small_environment(5);
  test::TempDir dir("store");
  write_environment(env, dir.path());

  Datastore store = Datastore::load(dir.path());
  CHECK(store.list_tables() ==
        std::vector<std::string>{"fleet_registry", "service_catalog",
                                 "signal_odometer"});
  // the maintenance log never enters the store
  auto outcome = store.run_sql("SELECT * FROM maintenance_log_noisy", 10);
  REQUIRE(outcome.error.has_value());
  CHECK(outcome.error->find("no such table") != std::string::npos);

  // row counts equal the CSV data-row counts
  auto count = store.run_sql("SELECT COUNT(*) FROM fleet_registry", 10);
  REQUIRE(count.result.has_value());
  CHECK(std::get<long long>(count.result->rows[0][0]) ==
        static_cast<long long>(env.registry.size()));
  auto catalog_count = store.run_sql("SELECT COUNT(*) FROM service_catalog", 10);
  CHECK(std::get<long long>(catalog_count.result->rows[0][0]) == 142);
  auto odo_count = store.run_sql("SELECT COUNT(*) FROM signal_odometer", 10);
  CHECK(std::get<long long>(odo_count.result->rows[0][0]) ==
        static_cast<long long>(env.sensor.size()));
}

TEST_CASE("missing reference file is a load error naming the file") {
  Environment env = test::small_environment(6);
  test::TempDir dir("missing");
  write_environment(env, dir.path());
  std::filesystem::remove(dir.path() / envfile::kOdometer);
  CHECK_THROWS_WITH_AS(Datastore::load(dir.path()),
                       doctest::Contains("signal_odometer.csv"), StoreError);
}

TEST_CASE("malformed csv is a parse error with a line number") {
  Environment env = test::small_environment(7);
  test::TempDir dir("malformed");
  write_environment(env, dir.path());
  std::ofstream out(dir.path() / envfile::kRegistry, std::ios::app);
  out << "only,two,fields\n";
  out.close();
  CHECK_THROWS_WITH_AS(Datastore::load(dir.path()), doctest::Contains("line"),
                       StoreError);
}

TEST_CASE("describe_table infers datatypes") {
  Environment env = test::small_environment(8);
  test::TempDir dir("describe");
  write_environment(env, dir.path());
  Datastore store = Datastore::load(dir.path());

  TableSchema registry = store.describe_table("fleet_registry");
  REQUIRE(registry.columns.size() == 4);
  CHECK(registry.columns[0] == std::pair<std::string, std::string>{"device_id",
                                                                   "text"});
  CHECK(registry.columns[2].first == "license_plate");
  for (const auto& [name, type] : registry.columns) CHECK(type == "text");

  TableSchema odometer = store.describe_table("signal_odometer");
  std::map<std::string, std::string> types(odometer.columns.begin(),
                                           odometer.columns.end());
  CHECK(types.at("odometer") == "integer");
  CHECK(types.at("km_traveled") == "integer");
  CHECK(types.at("date") == "date");
  CHECK(types.at("device_id") == "text");

  CHECK_THROWS_WITH_AS(store.describe_table("nope"),
                       doctest::Contains("fleet_registry"),
                       ToolInvocationError);
}

TEST_CASE("run_sql enforces the row cap and reports errors in-band") {
  Environment env = test::small_environment(9);
  test::TempDir dir("cap");
  write_environment(env, dir.path());
  Datastore store = Datastore::load(dir.path());

  auto over = store.run_sql("SELECT * FROM signal_odometer", 500);
  REQUIRE(over.error.has_value());
  CHECK(over.error->find("hard row cap") != std::string::npos);

  auto capped = store.run_sql("SELECT * FROM signal_odometer");
  REQUIRE(capped.result.has_value());
  CHECK(capped.result->rows.size() == 200);
  CHECK(capped.result->truncated);

  auto drop = store.run_sql("DROP TABLE fleet_registry", 10);
  REQUIRE(drop.error.has_value());
  CHECK(drop.error->find("read-only") != std::string::npos);
}

TEST_CASE("store is immutable across tool call sequences") {
  Environment env = test::small_environment(10);
  test::TempDir dir("immutable");
  write_environment(env, dir.path());
  Datastore store = Datastore::load(dir.path());

  auto snapshot = store.run_sql(
      "SELECT * FROM fleet_registry ORDER BY device_id", 200);
  for (int i = 0; i < 5; ++i) {
    store.list_tables();
    store.describe_table("service_catalog");
    store.run_sql("SELECT COUNT(*) FROM signal_odometer", 10);
    store.run_sql("DELETE FROM fleet_registry", 10);  // rejected, no effect
  }
  auto again = store.run_sql(
      "SELECT * FROM fleet_registry ORDER BY device_id", 200);
  REQUIRE(snapshot.result.has_value());
  REQUIRE(again.result.has_value());
  CHECK(snapshot.result->rows == again.result->rows);
}

TEST_CASE("plate lookup works end to end") {
  Environment env = test::small_environment(11);
  test::TempDir dir("lookup");
  write_environment(env, dir.path());
  Datastore store = Datastore::load(dir.path());

  const DeviceRecord& vehicle = env.registry.front();
  auto outcome = store.run_sql(
      "SELECT license_plate FROM fleet_registry WHERE name = '" +
          vehicle.name + "'",
      10);
  REQUIRE(outcome.result.has_value());
  REQUIRE(outcome.result->rows.size() == 1);
  CHECK(std::get<std::string>(outcome.result->rows[0][0]) ==
        vehicle.license_plate);
}

TEST_CASE("tool dispatch shapes results as JSON and flags bad invocations") {
  Environment env = test::small_environment(12);
  test::TempDir dir("dispatch");
  write_environment(env, dir.path());
  Datastore store = Datastore::load(dir.path());
  using Json = nlohmann::ordered_json;

  auto tables = dispatch_database_tool(store, "list_tables", Json::object());
  CHECK(tables.at("tables").size() == 3);

  auto schema = dispatch_database_tool(store, "describe_table",
                                       Json{{"table_name", "fleet_registry"}});
  CHECK(schema.at("columns").size() == 4);

  auto rows = dispatch_database_tool(
      store, "run_sql",
      Json{{"query", "SELECT COUNT(*) FROM fleet_registry"}, {"limit", 5}});
  CHECK(rows.at("rows")[0][0].get<long long>() ==
        static_cast<long long>(env.registry.size()));

  // malformed SQL is an observation, not an invocation failure
  auto bad_sql = dispatch_database_tool(store, "run_sql",
                                        Json{{"query", "SELEKT"}});
  CHECK(bad_sql.contains("error"));

  CHECK_THROWS_AS(
      dispatch_database_tool(store, "describe_table", Json::object()),
      ToolInvocationError);
  CHECK_THROWS_AS(dispatch_database_tool(store, "run_sql",
                                         Json{{"limit", 5}}),
                  ToolInvocationError);
  CHECK_THROWS_AS(
      dispatch_database_tool(store, "drop_everything", Json::object()),
      ToolInvocationError);
  CHECK_THROWS_AS(dispatch_database_tool(store, "describe_table",
                                         Json{{"table_name", "zzz"}}),
                  ToolInvocationError);
}
