#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fleetlog/datagen.hpp"

namespace fleetlog {

/// One turn of the conversation. Tool-call metadata uses the de-facto
/// chat-completions wire shapes so a transcript can be replayed verbatim.
struct ChatMessage {
  std::string role;  // system | user | assistant | tool
  std::string content;
  nlohmann::ordered_json tool_calls = nlohmann::ordered_json::array();
  std::string tool_call_id;  // role=tool only
  std::string tool_name;     // role=tool only
};

/// The prompt texts driving every episode. The shipped defaults are the
/// canonical curator prompts; user_template carries exactly one {record}
/// placeholder.
struct PromptBundle {
  std::string system_prompt;
  std::string instructions;
  std::string user_template;

  static const PromptBundle& shipped();
  void validate() const;
};

inline constexpr const char* kRecordPlaceholder = "{record}";

/// "column: value" lines in schema order; the label never appears.
std::string serialize_record(const MaintenanceRecord& record);

/// [system: system_prompt + instructions, user: template with the record
/// serialization]. Zero-shot: the only record in the prompt is this one.
std::vector<ChatMessage> build_prompt(const PromptBundle& bundle,
                                      const MaintenanceRecord& record);

}  // namespace fleetlog
