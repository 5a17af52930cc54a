#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "fleetlog/datagen.hpp"

namespace fleetlog {

/// The record violated the action contract (wo_num mismatch, immutable
/// field); such episodes count as failed.
struct ActionContractError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// The structured payload did not conform to the Log Cleaning API schema;
/// consumes one structured-output attempt.
struct InvalidActionPayload : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class ActionVariant { kAccept, kReject, kUpdate };

const char* action_variant_name(ActionVariant v);

struct Action {
  ActionVariant variant = ActionVariant::kAccept;
  std::string wo_num;
  std::optional<std::string> field;  // update only
  std::optional<std::string> value;  // update only

  static Action accept(std::string wo_num);
  static Action reject(std::string wo_num);
  static Action update(std::string wo_num, std::string field,
                       std::string value);

  bool operator==(const Action&) const = default;
};

enum class EpisodeStatus { kAccepted, kRejected, kUpdated, kFailed };

const char* episode_status_name(EpisodeStatus s);

struct EpisodeOutcome {
  EpisodeStatus status = EpisodeStatus::kFailed;
  std::optional<MaintenanceRecord> final_record;  // absent for reject/failed
};

/// Mutable maintenance-log fields (every column except wo_num).
bool is_mutable_record_field(const std::string& field);

/// Applies one committed action to a record. Throws ActionContractError on
/// wo_num mismatch or an update targeting wo_num.
EpisodeOutcome apply_action(const MaintenanceRecord& record,
                            const Action& action);

/// Parses one function-call payload {"name": ..., "arguments": {...}} against
/// the Log Cleaning API schema. Unknown functions, unknown argument fields,
/// and missing arguments all throw InvalidActionPayload. The wire parameter
/// name is work_order_number; it maps onto the record column wo_num.
Action validate_action_payload(const nlohmann::ordered_json& payload);

bool is_output_function(const std::string& name);

/// JSON schemas for the three output functions (function-calling wire format).
nlohmann::ordered_json output_function_schemas();

nlohmann::ordered_json action_to_payload(const Action& action);

}  // namespace fleetlog
