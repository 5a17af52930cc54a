#include "fleetlog/prompts.hpp"

#include <stdexcept>

namespace fleetlog {

namespace {

constexpr const char* kSystemPrompt =
    R"(You are a meticulous data curator focused on workshop maintenance logs.

When correcting records, you access the following resources in the database:
- fleet_registry — contains all vehicles belonging to the target fleet.
- service_catalog — defines valid categories and their hierarchical structure for maintenance records.
- signal_odometer — tracks odometer readings for all vehicles in the fleet.

Use these resources to validate and correct incoming maintenance records.)";

constexpr const char* kInstructions =
    "Spot inconsistencies, check DB tables and propose corrections when "
    "needed.";

constexpr const char* kUserTemplate =
    R"(You are given the next maintenance record:

{record}

Select exactly one action and invoke the corresponding output function:
- accept(work_order_number) — the record is valid and requires no changes.
- reject(work_order_number) — the record is invalid or out of scope for this fleet.
- update(work_order_number, field, value) — the record contains a correctable error; apply a single-field fix.

Use the appropriate function to classify the record.)";

}  // namespace

const PromptBundle& PromptBundle::shipped() {
  static const PromptBundle bundle = [] {
    PromptBundle b{kSystemPrompt, kInstructions, kUserTemplate};
    b.validate();
    return b;
  }();
  return bundle;
}

void PromptBundle::validate() const {
  std::size_t first = user_template.find(kRecordPlaceholder);
  if (first == std::string::npos) {
    throw std::invalid_argument("user_template lacks the " +
                                std::string(kRecordPlaceholder) +
                                " placeholder");
  }
  if (user_template.find(kRecordPlaceholder, first + 1) != std::string::npos) {
    throw std::invalid_argument("user_template has more than one placeholder");
  }
}

std::string serialize_record(const MaintenanceRecord& record) {
  std::string out;
  auto line = [&](const char* column, const std::string& value) {
    out += column;
    out += ": ";
    out += value;
    out += '\n';
  };
  line("wo_num", record.wo_num);
  line("start_date", record.start_date.to_string());
  line("end_date", record.end_date.to_string());
  line("license_plate", record.license_plate);
  line("system", record.system);
  line("subsystem", record.subsystem);
  line("component", record.component);
  line("activity", record.activity);
  line("work_description", record.work_description);
  out += "work_order_type: ";
  out += record.work_order_type;
  return out;
}

std::vector<ChatMessage> build_prompt(const PromptBundle& bundle,
                                      const MaintenanceRecord& record) {
  bundle.validate();
  std::string user = bundle.user_template;
  user.replace(user.find(kRecordPlaceholder), std::string(kRecordPlaceholder).size(),
               serialize_record(record));
  std::vector<ChatMessage> messages;
  messages.push_back(
      {"system", bundle.system_prompt + "\n\n" + bundle.instructions});
  messages.push_back({"user", std::move(user)});
  return messages;
}

}  // namespace fleetlog
