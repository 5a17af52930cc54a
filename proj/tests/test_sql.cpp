#include <doctest.h>

#include "fleetlog/sql.hpp"
#include "helpers.hpp"
#include "sql_oracle.hpp"

using namespace fleetlog;
using fleetlog::sql::Engine;
using fleetlog::sql::QueryResult;
using fleetlog::sql::SqlError;
using fleetlog::sql::Value;

namespace {

Engine tiny_engine() {
  Engine engine;
  sql::Table people;
  people.name = "people";
  people.columns = {{"id", sql::ColumnType::kInteger},
                    {"name", sql::ColumnType::kText},
                    {"team", sql::ColumnType::kText},
                    {"score", sql::ColumnType::kInteger}};
  people.rows = {
      {1LL, std::string("ana"), std::string("red"), 10LL},
      {2LL, std::string("bob"), std::string("red"), 20LL},
      {3LL, std::string("cyd"), std::string("blue"), 30LL},
      {4LL, std::string("dee"), std::string("blue"), 40LL},
  };
  engine.add_table(std::move(people));

  sql::Table teams;
  teams.name = "teams";
  teams.columns = {{"team", sql::ColumnType::kText},
                   {"city", sql::ColumnType::kText}};
  teams.rows = {{std::string("red"), std::string("Lyon")},
                {std::string("blue"), std::string("Turin")}};
  engine.add_table(std::move(teams));
  return engine;
}

QueryResult run_ok(const Engine& engine, const std::string& query,
                   int limit = 200) {
  auto outcome = engine.execute(query, limit);
  REQUIRE_MESSAGE(std::holds_alternative<QueryResult>(outcome),
                  (std::get<SqlError>(outcome).to_string()));
  return std::get<QueryResult>(outcome);
}

SqlError run_err(const Engine& engine, const std::string& query,
                 int limit = 200) {
  auto outcome = engine.execute(query, limit);
  REQUIRE(std::holds_alternative<SqlError>(outcome));
  return std::get<SqlError>(outcome);
}

}  // namespace

TEST_CASE("projection, aliases, where") {
  Engine e = tiny_engine();
  auto r = run_ok(e, "SELECT name AS who, score FROM people WHERE score >= 20");
  CHECK(r.columns == std::vector<std::string>{"who", "score"});
  CHECK(r.rows.size() == 3);

  auto star = run_ok(e, "SELECT * FROM people WHERE name = 'ana'");
  REQUIRE(star.rows.size() == 1);
  CHECK(star.columns.size() == 4);
  CHECK(std::get<long long>(star.rows[0][0]) == 1);

  auto neq = run_ok(e, "SELECT name FROM people WHERE team != 'red'");
  CHECK(neq.rows.size() == 2);
  auto diamond = run_ok(e, "SELECT name FROM people WHERE team <> 'red'");
  CHECK(diamond.rows.size() == 2);
}

TEST_CASE("logic operators, IN, LIKE") {
  Engine e = tiny_engine();
  CHECK(run_ok(e, "SELECT name FROM people WHERE score > 10 AND team = 'red'")
            .rows.size() == 1);
  CHECK(run_ok(e,
               "SELECT name FROM people WHERE score = 10 OR score = 40")
            .rows.size() == 2);
  CHECK(run_ok(e, "SELECT name FROM people WHERE NOT team = 'red'")
            .rows.size() == 2);
  CHECK(run_ok(e, "SELECT name FROM people WHERE name IN ('ana', 'cyd')")
            .rows.size() == 2);
  CHECK(run_ok(e, "SELECT name FROM people WHERE name NOT IN ('ana')")
            .rows.size() == 3);
  // LIKE is case-insensitive with % and _
  CHECK(run_ok(e, "SELECT name FROM people WHERE name LIKE 'A%'")
            .rows.size() == 1);
  CHECK(run_ok(e, "SELECT name FROM people WHERE name LIKE '_o_'")
            .rows.size() == 1);
  CHECK(run_ok(e, "SELECT city FROM teams WHERE city LIKE '%N'")
            .rows.size() == 2);
  CHECK(run_ok(e, "SELECT name FROM people WHERE name NOT LIKE '%a%'")
            .rows.size() == 3);
}

TEST_CASE("order by and limit with truncation flag") {
  Engine e = tiny_engine();
  auto desc = run_ok(e, "SELECT name FROM people ORDER BY score DESC");
  REQUIRE(desc.rows.size() == 4);
  CHECK(std::get<std::string>(desc.rows[0][0]) == "dee");
  CHECK_FALSE(desc.truncated);

  auto limited = run_ok(e, "SELECT name FROM people ORDER BY score LIMIT 2");
  REQUIRE(limited.rows.size() == 2);
  CHECK(std::get<std::string>(limited.rows[0][0]) == "ana");
  CHECK(limited.truncated);

  // the tool row cap truncates too
  auto capped = run_ok(e, "SELECT name FROM people ORDER BY name", 3);
  CHECK(capped.rows.size() == 3);
  CHECK(capped.truncated);

  // query LIMIT below the cap wins
  auto both = run_ok(e, "SELECT name FROM people ORDER BY name LIMIT 1", 3);
  CHECK(both.rows.size() == 1);
  CHECK(both.truncated);
}

TEST_CASE("aggregates and group by") {
  Engine e = tiny_engine();
  auto count = run_ok(e, "SELECT COUNT(*) FROM people");
  REQUIRE(count.rows.size() == 1);
  CHECK(std::get<long long>(count.rows[0][0]) == 4);
  CHECK(count.columns[0] == "COUNT(*)");

  auto grouped = run_ok(
      e,
      "SELECT team, COUNT(*) AS n, SUM(score) AS total, AVG(score) AS avg, "
      "MIN(name) AS lo, MAX(name) AS hi FROM people GROUP BY team ORDER BY "
      "team");
  REQUIRE(grouped.rows.size() == 2);
  CHECK(std::get<std::string>(grouped.rows[0][0]) == "blue");
  CHECK(std::get<long long>(grouped.rows[0][1]) == 2);
  CHECK(std::get<long long>(grouped.rows[0][2]) == 70);
  CHECK(std::get<double>(grouped.rows[0][3]) == doctest::Approx(35.0));
  CHECK(std::get<std::string>(grouped.rows[0][4]) == "cyd");
  CHECK(std::get<std::string>(grouped.rows[0][5]) == "dee");

  // aggregates over an empty selection still produce one row
  auto empty = run_ok(e,
                      "SELECT COUNT(*) AS n, SUM(score) AS s FROM people "
                      "WHERE score > 1000");
  REQUIRE(empty.rows.size() == 1);
  CHECK(std::get<long long>(empty.rows[0][0]) == 0);
  CHECK(std::holds_alternative<std::monostate>(empty.rows[0][1]));

  // bare columns must be grouped
  auto err = run_err(e, "SELECT name, COUNT(*) FROM people GROUP BY team");
  CHECK(err.message.find("GROUP BY") != std::string::npos);
}

TEST_CASE("inner join on equality") {
  Engine e = tiny_engine();
  auto joined = run_ok(
      e,
      "SELECT p.name, t.city FROM people p JOIN teams t ON p.team = t.team "
      "WHERE t.city = 'Lyon' ORDER BY p.name");
  REQUIRE(joined.rows.size() == 2);
  CHECK(std::get<std::string>(joined.rows[0][0]) == "ana");
  CHECK(std::get<std::string>(joined.rows[0][1]) == "Lyon");

  // equality is required
  auto err = run_err(
      e, "SELECT p.name FROM people p JOIN teams t ON p.team > t.team");
  CHECK(err.message.find("equality") != std::string::npos);

  // bare ambiguous column names are rejected
  auto ambiguous = run_err(
      e, "SELECT team FROM people p JOIN teams t ON p.team = t.team");
  CHECK(ambiguous.message.find("ambiguous") != std::string::npos);
}

TEST_CASE("statement faults come back as errors, not exceptions") {
  Engine e = tiny_engine();

  auto readonly = run_err(e, "DROP TABLE people");
  CHECK(readonly.message.find("read-only") != std::string::npos);
  CHECK(run_err(e, "INSERT INTO people VALUES (1)").message.find("read-only") !=
        std::string::npos);
  CHECK(run_err(e, "UPDATE people SET score = 1").message.find("read-only") !=
        std::string::npos);

  auto syntax = run_err(e, "SELECT name FROM people WHERE");
  CHECK(syntax.position.has_value());

  auto unknown_col = run_err(e, "SELECT nope FROM people");
  CHECK(unknown_col.message.find("no such column: 'nope'") !=
        std::string::npos);

  auto unknown_table = run_err(e, "SELECT * FROM nope");
  CHECK(unknown_table.message.find("no such table: 'nope'") !=
        std::string::npos);
  CHECK(unknown_table.message.find("people") != std::string::npos);

  auto trailing = run_err(e, "SELECT name FROM people; SELECT 1");
  CHECK(trailing.message.find("trailing") != std::string::npos);

  CHECK(run_err(e, "SELECT name FROM people WHERE name = 'unterminated")
            .position.has_value());

  // overflowing literals are statement faults too
  auto huge = run_err(
      e, "SELECT name FROM people WHERE score > 99999999999999999999999");
  CHECK(huge.message.find("out of range") != std::string::npos);
  CHECK(run_err(e, "SELECT name FROM people LIMIT 99999999999999999999999")
            .message.find("out of range") != std::string::npos);
  CHECK(run_err(e, "SELECT name FROM people LIMIT 1.5")
            .message.find("integer") != std::string::npos);
}

TEST_CASE("table and column names resolve case-insensitively") {
  Engine e = tiny_engine();
  auto r = run_ok(e, "select NAME from PEOPLE where TEAM = 'red' order by name");
  CHECK(r.rows.size() == 2);
}

TEST_CASE("truncated flag holds exactly when rows were dropped") {
  Environment env = test::small_environment(13, 10);
  test::TempDir dir("trunc");
  write_environment(env, dir.path());
  Datastore store = Datastore::load(dir.path());

  auto rng = RngStream::derive(13, "trunc");
  const std::vector<std::string> queries = {
      "SELECT * FROM fleet_registry",
      "SELECT date FROM signal_odometer WHERE km_traveled > 180",
      "SELECT System, Subsystem FROM service_catalog ORDER BY System",
      "SELECT COUNT(*) FROM signal_odometer",
  };
  for (int iter = 0; iter < 120; ++iter) {
    const std::string& base = rng.pick(queries);
    int limit = static_cast<int>(rng.uniform_int(1, 200));
    bool with_query_limit = rng.below(2) == 0;
    std::string query = base;
    long long query_limit = 0;
    if (with_query_limit) {
      query_limit = rng.uniform_int(1, 250);
      query += " LIMIT " + std::to_string(query_limit);
    }

    auto full = store.run_sql(base, 200);
    REQUIRE(full.result.has_value());
    std::size_t full_count = full.result->rows.size();
    bool full_itself_truncated = full.result->truncated;
    if (full_itself_truncated) continue;  // base result larger than the cap

    auto capped = store.run_sql(query, limit);
    REQUIRE(capped.result.has_value());
    std::size_t expect =
        std::min<std::size_t>(full_count, static_cast<std::size_t>(limit));
    if (with_query_limit) {
      expect = std::min<std::size_t>(expect,
                                     static_cast<std::size_t>(query_limit));
    }
    CHECK(capped.result->rows.size() == expect);
    CHECK(capped.result->truncated == (full_count > expect));
  }
}

TEST_CASE("parser survives malformed input without crashing") {
  Engine e = tiny_engine();
  const std::string fragments[] = {
      "SELECT", "FROM",  "WHERE", "people", "name",  "'x",   "(",  ")",
      ",",      "LIKE",  "IN",    "JOIN",   "ON",    "=",    "<>", "GROUP",
      "BY",     "LIMIT", "*",     ";",      "123",   "1.5",  ".",  "\"q",
      "NOT",    "AND",   "OR",    "ORDER",  "COUNT", "--",   "!",
      "99999999999999999999999999",
  };
  auto rng = RngStream::derive(99, "fuzz");
  for (int iter = 0; iter < 2000; ++iter) {
    std::string query;
    int parts = static_cast<int>(rng.uniform_int(0, 12));
    for (int p = 0; p < parts; ++p) {
      query += fragments[rng.below(std::size(fragments))];
      query += ' ';
    }
    // must never throw; any outcome is acceptable, crashes are not
    auto outcome = e.execute(query, 50);
    (void)outcome;
  }
}

TEST_CASE("differential: 50 conforming queries match sqlite on a generated "
          "environment") {
  Environment env = test::small_environment(77, 12);
  test::TempDir dir("sqldiff");
  write_environment(env, dir.path());
  Datastore store = Datastore::load(dir.path());

  test::SqliteMirror mirror(store.engine());
  test::ConformingQueryGenerator generator(store.engine(), 2024);

  for (int i = 0; i < 50; ++i) {
    auto q = generator.next();
    // Every generated query stays under the 200-row cap, so the cap never
    // perturbs the comparison.
    auto outcome = store.engine().execute(q.text, 200);
    REQUIRE_MESSAGE(std::holds_alternative<QueryResult>(outcome),
                    ("query failed: " + q.text));
    const auto& mine = std::get<QueryResult>(outcome);
    auto ref = mirror.query(q.text);

    std::string why;
    bool ok = test::results_agree(mine.rows, ref, q.ordered, &why);
    CHECK_MESSAGE(ok, (why + " for: " + q.text));
  }
}
