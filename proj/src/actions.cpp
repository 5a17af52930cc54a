#include "fleetlog/actions.hpp"

#include <array>

namespace fleetlog {

namespace {
using Json = nlohmann::ordered_json;

constexpr std::array<const char*, 9> kMutableFields = {
    "start_date", "end_date",  "license_plate",
    "system",     "subsystem", "component",
    "activity",   "work_description", "work_order_type"};
}  // namespace

const char* action_variant_name(ActionVariant v) {
  switch (v) {
    case ActionVariant::kAccept: return "accept";
    case ActionVariant::kReject: return "reject";
    case ActionVariant::kUpdate: return "update";
  }
  return "accept";
}

const char* episode_status_name(EpisodeStatus s) {
  switch (s) {
    case EpisodeStatus::kAccepted: return "accepted";
    case EpisodeStatus::kRejected: return "rejected";
    case EpisodeStatus::kUpdated: return "updated";
    case EpisodeStatus::kFailed: return "failed";
  }
  return "failed";
}

Action Action::accept(std::string wo_num) {
  return {ActionVariant::kAccept, std::move(wo_num), std::nullopt,
          std::nullopt};
}

Action Action::reject(std::string wo_num) {
  return {ActionVariant::kReject, std::move(wo_num), std::nullopt,
          std::nullopt};
}

Action Action::update(std::string wo_num, std::string field,
                      std::string value) {
  return {ActionVariant::kUpdate, std::move(wo_num), std::move(field),
          std::move(value)};
}

bool is_mutable_record_field(const std::string& field) {
  for (const char* f : kMutableFields) {
    if (field == f) return true;
  }
  return false;
}

EpisodeOutcome apply_action(const MaintenanceRecord& record,
                            const Action& action) {
  if (action.wo_num != record.wo_num) {
    throw ActionContractError("action targets work order " + action.wo_num +
                              " but the record under review is " +
                              record.wo_num);
  }
  switch (action.variant) {
    case ActionVariant::kAccept:
      return {EpisodeStatus::kAccepted, record};
    case ActionVariant::kReject:
      return {EpisodeStatus::kRejected, std::nullopt};
    case ActionVariant::kUpdate:
      break;
  }

  const std::string& field = *action.field;
  if (field == "wo_num") {
    throw ActionContractError("wo_num is immutable");
  }
  if (!is_mutable_record_field(field)) {
    throw ActionContractError("unknown record field: '" + field + "'");
  }
  MaintenanceRecord updated = record;
  const std::string& value = *action.value;
  if (field == "start_date") {
    updated.start_date = Date::parse(value);
  } else if (field == "end_date") {
    updated.end_date = Date::parse(value);
  } else if (field == "license_plate") {
    updated.license_plate = value;
  } else if (field == "system") {
    updated.system = value;
  } else if (field == "subsystem") {
    updated.subsystem = value;
  } else if (field == "component") {
    updated.component = value;
  } else if (field == "activity") {
    updated.activity = value;
  } else if (field == "work_description") {
    updated.work_description = value;
  } else if (field == "work_order_type") {
    updated.work_order_type = value;
  }
  return {EpisodeStatus::kUpdated, std::move(updated)};
}

bool is_output_function(const std::string& name) {
  return name == "accept" || name == "reject" || name == "update";
}

Action validate_action_payload(const Json& payload) {
  if (!payload.is_object() || !payload.contains("name") ||
      !payload.at("name").is_string()) {
    throw InvalidActionPayload("payload must name one output function");
  }
  std::string name = payload.at("name").get<std::string>();
  if (!is_output_function(name)) {
    throw InvalidActionPayload("'" + name +
                               "' is not one of accept/reject/update");
  }
  Json args = payload.value("arguments", Json::object());
  if (args.is_string()) {
    // Function-calling providers ship arguments as a JSON-encoded string.
    try {
      args = Json::parse(args.get<std::string>());
    } catch (const nlohmann::json::exception&) {
      throw InvalidActionPayload("arguments are not valid JSON");
    }
  }
  if (!args.is_object()) {
    throw InvalidActionPayload("arguments must be a JSON object");
  }

  auto require_string = [&](const char* key) {
    if (!args.contains(key) || !args.at(key).is_string() ||
        args.at(key).get<std::string>().empty()) {
      throw InvalidActionPayload(std::string("missing required argument '") +
                                 key + "'");
    }
    return args.at(key).get<std::string>();
  };

  std::vector<std::string> allowed = {"work_order_number"};
  if (name == "update") {
    allowed.push_back("field");
    allowed.push_back("value");
  }
  for (const auto& [key, _] : args.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw InvalidActionPayload("unknown argument '" + key + "' for " + name);
    }
  }

  std::string wo_num = require_string("work_order_number");
  if (name == "accept") return Action::accept(wo_num);
  if (name == "reject") return Action::reject(wo_num);

  std::string field = require_string("field");
  if (!args.contains("value") || !args.at("value").is_string()) {
    throw InvalidActionPayload("missing required argument 'value'");
  }
  std::string value = args.at("value").get<std::string>();
  if (field == "wo_num" || !is_mutable_record_field(field)) {
    throw InvalidActionPayload(
        "'" + field +
        "' is not an updatable field (wo_num is immutable; valid fields are "
        "the remaining maintenance-log columns)");
  }
  return Action::update(wo_num, field, value);
}

Json output_function_schemas() {
  Json tools = Json::array();
  tools.push_back(
      {{"type", "function"},
       {"function",
        {{"name", "accept"},
         {"description", "The record is valid and requires no changes."},
         {"parameters",
          {{"type", "object"},
           {"properties",
            {{"work_order_number", {{"type", "string"}}}}},
           {"required", Json::array({"work_order_number"})}}}}}});
  tools.push_back(
      {{"type", "function"},
       {"function",
        {{"name", "reject"},
         {"description",
          "The record is invalid or out of scope for this fleet."},
         {"parameters",
          {{"type", "object"},
           {"properties",
            {{"work_order_number", {{"type", "string"}}}}},
           {"required", Json::array({"work_order_number"})}}}}}});
  Json field_enum = Json::array();
  for (const char* f : kMutableFields) field_enum.push_back(f);
  tools.push_back(
      {{"type", "function"},
       {"function",
        {{"name", "update"},
         {"description",
          "The record contains a correctable error; apply a single-field "
          "fix."},
         {"parameters",
          {{"type", "object"},
           {"properties",
            {{"work_order_number", {{"type", "string"}}},
             {"field", {{"type", "string"}, {"enum", field_enum}}},
             {"value", {{"type", "string"}}}}},
           {"required",
            Json::array({"work_order_number", "field", "value"})}}}}}});
  return tools;
}

Json action_to_payload(const Action& action) {
  Json args{{"work_order_number", action.wo_num}};
  if (action.variant == ActionVariant::kUpdate) {
    args["field"] = *action.field;
    args["value"] = *action.value;
  }
  return Json{{"name", action_variant_name(action.variant)},
              {"arguments", args}};
}

}  // namespace fleetlog
