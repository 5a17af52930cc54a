#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fleetlog/agent.hpp"
#include "fleetlog/params.hpp"
#include "fleetlog/prompts.hpp"

namespace fleetlog {

struct LlmChatResponse {
  std::string content;
  std::vector<FunctionCall> calls;
  TokenUsage usage;
};

/// One round-trip to a JSON-over-HTTP chat-completions endpoint with
/// function calling. temperature/top_p are forwarded; token usage is read
/// from the response or estimated (length/4, flagged) when the provider
/// omits it. HTTP and protocol failures raise TransportError; the caller's
/// retry policy decides what happens next.
LlmChatResponse llm_chat(const ModelSpec& model,
                         const std::vector<ChatMessage>& messages,
                         const nlohmann::ordered_json& tools,
                         const DecodingParams& params,
                         const std::string& api_key,
                         int timeout_seconds = 120);

/// Builds the request body (exposed for tests).
nlohmann::ordered_json build_chat_request(
    const ModelSpec& model, const std::vector<ChatMessage>& messages,
    const nlohmann::ordered_json& tools, const DecodingParams& params);

/// First non-empty of FLEETLOG_API_KEY, OPENROUTER_API_KEY, OPENAI_API_KEY.
std::optional<std::string> resolve_api_key();

std::unique_ptr<Agent> make_llm_agent(ModelSpec model, std::string api_key,
                                      int timeout_seconds = 120);

}  // namespace fleetlog
