#include "fleetlog/llm_client.hpp"

#include <cstdlib>

#ifdef FLEETLOG_HAVE_OPENSSL
#define CPPHTTPLIB_OPENSSL_SUPPORT
#endif
#include <httplib.h>

namespace fleetlog {

namespace {

using Json = nlohmann::ordered_json;

struct ParsedEndpoint {
  std::string origin;  // scheme://host[:port]
  std::string base_path;
};

ParsedEndpoint parse_endpoint(const std::string& endpoint) {
  auto scheme_end = endpoint.find("://");
  if (scheme_end == std::string::npos) {
    throw TransportError("endpoint must include a scheme: " + endpoint);
  }
  auto path_start = endpoint.find('/', scheme_end + 3);
  ParsedEndpoint parsed;
  if (path_start == std::string::npos) {
    parsed.origin = endpoint;
  } else {
    parsed.origin = endpoint.substr(0, path_start);
    parsed.base_path = endpoint.substr(path_start);
  }
  while (!parsed.base_path.empty() && parsed.base_path.back() == '/') {
    parsed.base_path.pop_back();
  }
  return parsed;
}

Json message_to_wire(const ChatMessage& msg) {
  Json wire{{"role", msg.role}, {"content", msg.content}};
  if (!msg.tool_calls.empty()) wire["tool_calls"] = msg.tool_calls;
  if (!msg.tool_call_id.empty()) wire["tool_call_id"] = msg.tool_call_id;
  if (!msg.tool_name.empty()) wire["name"] = msg.tool_name;
  return wire;
}

long long estimate_tokens(const std::string& content) {
  return static_cast<long long>((content.size() + 3) / 4);
}

}  // namespace

Json build_chat_request(const ModelSpec& model,
                        const std::vector<ChatMessage>& messages,
                        const Json& tools, const DecodingParams& params) {
  Json body{{"model", model.model_name},
            {"messages", Json::array()},
            {"tools", tools},
            {"tool_choice", "auto"},
            {"temperature", params.temperature},
            {"top_p", params.top_p}};
  for (const auto& msg : messages) {
    body["messages"].push_back(message_to_wire(msg));
  }
  return body;
}

LlmChatResponse llm_chat(const ModelSpec& model,
                         const std::vector<ChatMessage>& messages,
                         const Json& tools, const DecodingParams& params,
                         const std::string& api_key, int timeout_seconds) {
  ParsedEndpoint endpoint = parse_endpoint(model.endpoint);
  httplib::Client client(endpoint.origin);
  client.set_connection_timeout(10, 0);
  client.set_read_timeout(timeout_seconds, 0);
  client.set_write_timeout(timeout_seconds, 0);

  Json body = build_chat_request(model, messages, tools, params);
  httplib::Headers headers;
  if (!api_key.empty()) {
    headers.emplace("Authorization", "Bearer " + api_key);
  }
  auto res = client.Post(endpoint.base_path + "/chat/completions", headers,
                         body.dump(), "application/json");
  if (!res) {
    throw TransportError("request to " + model.endpoint + " failed: " +
                         httplib::to_string(res.error()));
  }
  if (res->status < 200 || res->status >= 300) {
    throw TransportError("endpoint returned HTTP " +
                         std::to_string(res->status) + ": " +
                         res->body.substr(0, 500));
  }

  Json payload = Json::parse(res->body, nullptr, false);
  if (payload.is_discarded() || !payload.contains("choices") ||
      !payload.at("choices").is_array() || payload.at("choices").empty()) {
    throw TransportError("malformed chat-completions response body");
  }

  try {
    const Json message = payload.at("choices").at(0).value("message", Json());
    LlmChatResponse out;
    if (message.is_object() && message.contains("content") &&
        message.at("content").is_string()) {
      out.content = message.at("content").get<std::string>();
    }
    std::string calls_text;
    if (message.is_object() && message.contains("tool_calls") &&
        message.at("tool_calls").is_array()) {
      calls_text = message.at("tool_calls").dump();
      for (const auto& call : message.at("tool_calls")) {
        FunctionCall fc;
        fc.id = call.value("id", "");
        const Json fn = call.value("function", Json());
        if (fn.is_object()) {
          fc.name = fn.value("name", "");
          Json raw_args = fn.value("arguments", Json());
          if (raw_args.is_string()) {
            Json parsed =
                Json::parse(raw_args.get<std::string>(), nullptr, false);
            fc.arguments = parsed.is_discarded() ? raw_args : parsed;
          } else {
            fc.arguments = raw_args;
          }
        }
        out.calls.push_back(std::move(fc));
      }
    }

    if (payload.contains("usage") && payload.at("usage").is_object() &&
        payload.at("usage").contains("prompt_tokens")) {
      const Json& usage = payload.at("usage");
      out.usage.request_tokens = usage.value("prompt_tokens", 0LL);
      out.usage.response_tokens = usage.value("completion_tokens", 0LL);
      out.usage.estimated = false;
    } else {
      // Provider omitted usage: fall back to a length/4 estimate, flagged so
      // downstream cost figures are never silently wrong.
      long long request = 0;
      for (const auto& msg : messages) request += estimate_tokens(msg.content);
      out.usage.request_tokens = request;
      out.usage.response_tokens =
          estimate_tokens(out.content) + estimate_tokens(calls_text);
      out.usage.estimated = true;
    }
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw TransportError(std::string("unexpected response shape: ") +
                         e.what());
  }
}

std::optional<std::string> resolve_api_key() {
  for (const char* var :
       {"FLEETLOG_API_KEY", "OPENROUTER_API_KEY", "OPENAI_API_KEY"}) {
    const char* value = std::getenv(var);
    if (value && *value) return std::string(value);
  }
  return std::nullopt;
}

namespace {

class LlmAgent : public Agent {
 public:
  LlmAgent(ModelSpec model, std::string api_key, int timeout_seconds)
      : model_(std::move(model)),
        api_key_(std::move(api_key)),
        timeout_seconds_(timeout_seconds) {}

  std::string name() const override { return model_.model_name; }

  AgentReply respond(const std::vector<ChatMessage>& conversation,
                     const Json& tools, const DecodingParams& params,
                     const EpisodeContext&) override {
    LlmChatResponse response =
        llm_chat(model_, conversation, tools, params, api_key_,
                 timeout_seconds_);
    AgentReply reply;
    reply.content = std::move(response.content);
    reply.calls = std::move(response.calls);
    reply.usage = response.usage;
    return reply;
  }

 private:
  ModelSpec model_;
  std::string api_key_;
  int timeout_seconds_;
};

}  // namespace

std::unique_ptr<Agent> make_llm_agent(ModelSpec model, std::string api_key,
                                      int timeout_seconds) {
  return std::make_unique<LlmAgent>(std::move(model), std::move(api_key),
                                    timeout_seconds);
}

}  // namespace fleetlog
