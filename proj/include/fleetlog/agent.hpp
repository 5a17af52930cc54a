#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fleetlog/actions.hpp"
#include "fleetlog/datastore.hpp"
#include "fleetlog/noise.hpp"
#include "fleetlog/params.hpp"
#include "fleetlog/prompts.hpp"

namespace fleetlog {

/// Connectivity or protocol failure talking to a model endpoint; retryable.
struct TransportError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct FunctionCall {
  std::string name;
  nlohmann::ordered_json arguments;  // object, or raw string when unparsable
  std::string id;
};

struct TokenUsage {
  long long request_tokens = 0;
  long long response_tokens = 0;
  bool estimated = false;
};

struct AgentReply {
  std::string content;
  std::vector<FunctionCall> calls;
  TokenUsage usage;
};

struct EpisodeContext {
  const MaintenanceRecord* record = nullptr;
};

/// A cleaning agent: given the conversation so far it produces the next
/// assistant turn (tool calls, an output-function call, or plain text).
class Agent {
 public:
  virtual ~Agent() = default;
  virtual std::string name() const = 0;
  virtual void begin_pass(const EpisodeContext& ctx) { (void)ctx; }
  virtual AgentReply respond(const std::vector<ChatMessage>& conversation,
                             const nlohmann::ordered_json& tools,
                             const DecodingParams& params,
                             const EpisodeContext& ctx) = 0;
};

struct ToolCallRecord {
  std::string tool;
  nlohmann::ordered_json arguments;
  nlohmann::ordered_json result;
  bool failed = false;
};

struct AttemptsUsed {
  int output_attempts = 0;  // across all passes
  int record_passes = 0;
  int tool_calls = 0;
  std::map<std::string, int> tool_failures;
};

struct EpisodeTranscript {
  std::vector<ChatMessage> messages;      // all passes, in order
  std::vector<ToolCallRecord> tool_calls;  // every datastore call, in order
  long long request_tokens = 0;
  long long response_tokens = 0;
  bool usage_estimated = false;
  double wall_time_seconds = 0.0;
  AttemptsUsed attempts;
};

struct EpisodeResult {
  EpisodeOutcome outcome;
  std::optional<Action> action;  // committed action; absent when failed
  std::optional<std::string> failure_reason;
  EpisodeTranscript transcript;
};

/// The full tools array advertised to agents: 3 database tools + 3 output
/// functions.
nlohmann::ordered_json full_tool_schemas();

/// Runs one cleaning episode: prompt build, agent turns, datastore routing,
/// the 50/3/3 retry policy, and usage accounting across every attempt.
/// Budget exhaustion yields a failed outcome, never an exception.
EpisodeResult run_episode(const MaintenanceRecord& record, Agent& agent,
                          const Datastore& store, const RetryPolicy& policy,
                          const DecodingParams& params,
                          const PromptBundle& bundle = PromptBundle::shipped(),
                          bool measure_time = false);

/// Emits the ground-truth action for every labeled record through the normal
/// function-call path. Only valid on generated environments.
std::unique_ptr<Agent> make_oracle_agent(const std::vector<NoiseLabel>& labels,
                                         const NoiseTaxonomy& taxonomy);

/// Deterministic rule-based cleaner: pre/post-validates entity linkage,
/// vocabulary membership, and the repair timeline against the odometer
/// signal through ordinary database tool calls.
std::unique_ptr<Agent> make_rule_baseline_agent(std::string plate_pattern);

}  // namespace fleetlog
