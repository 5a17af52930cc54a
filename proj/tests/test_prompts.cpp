#include <doctest.h>

#include "fleetlog/prompts.hpp"
#include "helpers.hpp"

using namespace fleetlog;

TEST_CASE("shipped prompts carry the curator texts verbatim") {
  const PromptBundle& bundle = PromptBundle::shipped();
  CHECK(bundle.system_prompt.rfind(
            "You are a meticulous data curator focused on workshop "
            "maintenance logs.",
            0) == 0);
  CHECK(bundle.system_prompt.find("fleet_registry") != std::string::npos);
  CHECK(bundle.system_prompt.find("service_catalog") != std::string::npos);
  CHECK(bundle.system_prompt.find("signal_odometer") != std::string::npos);
  CHECK(bundle.instructions ==
        "Spot inconsistencies, check DB tables and propose corrections when "
        "needed.");
  CHECK(bundle.user_template.find("accept(work_order_number)") !=
        std::string::npos);
  CHECK(bundle.user_template.find("update(work_order_number, field, value)") !=
        std::string::npos);
  CHECK(bundle.user_template.find(
            "Select exactly one action and invoke the corresponding output "
            "function") != std::string::npos);
}

TEST_CASE("the user template holds exactly one record placeholder") {
  PromptBundle ok = PromptBundle::shipped();
  CHECK_NOTHROW(ok.validate());

  PromptBundle none = ok;
  none.user_template = "no placeholder here";
  CHECK_THROWS_AS(none.validate(), std::invalid_argument);

  PromptBundle twice = ok;
  twice.user_template = "{record} and {record}";
  CHECK_THROWS_AS(twice.validate(), std::invalid_argument);
}

TEST_CASE("record serialization lists columns in schema order, label-free") {
  auto world = test::FigureWorld::make();
  const MaintenanceRecord& noisy = world.env.noisy_log[1];  // WO827, typo

  std::string text = serialize_record(noisy);
  CHECK(text.find("wo_num: WO827") == 0);
  CHECK(text.find("Brake Sysem") != std::string::npos);
  CHECK(text.find("label") == std::string::npos);

  // column order is the schema order
  std::vector<std::string> expected_order = {
      "wo_num:",    "start_date:", "end_date:",  "license_plate:",
      "system:",    "subsystem:",  "component:", "activity:",
      "work_description:", "work_order_type:"};
  std::size_t pos = 0;
  for (const auto& key : expected_order) {
    std::size_t found = text.find(key, pos);
    REQUIRE(found != std::string::npos);
    pos = found;
  }
}

TEST_CASE("build_prompt yields system+user and nothing else") {
  auto world = test::FigureWorld::make();
  const MaintenanceRecord& record = world.env.noisy_log[0];

  auto messages = build_prompt(PromptBundle::shipped(), record);
  REQUIRE(messages.size() == 2);
  CHECK(messages[0].role == "system");
  CHECK(messages[1].role == "user");
  CHECK(messages[0].content.find(PromptBundle::shipped().instructions) !=
        std::string::npos);
  CHECK(messages[1].content.find(serialize_record(record)) !=
        std::string::npos);
  CHECK(messages[1].content.find("{record}") == std::string::npos);
}

TEST_CASE("zero-shot guarantee: only the record under review appears") {
  auto world = test::FigureWorld::make();
  for (const auto& record : world.env.noisy_log) {
    auto messages = build_prompt(PromptBundle::shipped(), record);
    std::string all = messages[0].content + "\n" + messages[1].content;
    // the only work-order id in the prompt is this record's
    for (const auto& other : world.env.noisy_log) {
      if (other.wo_num == record.wo_num) continue;
      CHECK(all.find(other.wo_num) == std::string::npos);
    }
    CHECK(all.find("label") == std::string::npos);
  }
}
