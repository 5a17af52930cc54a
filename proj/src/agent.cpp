#include "fleetlog/agent.hpp"

#include <chrono>

namespace fleetlog {

namespace {
using Json = nlohmann::ordered_json;

ChatMessage assistant_message(const AgentReply& reply) {
  ChatMessage msg;
  msg.role = "assistant";
  msg.content = reply.content;
  for (const auto& call : reply.calls) {
    msg.tool_calls.push_back(
        {{"id", call.id},
         {"type", "function"},
         {"function",
          {{"name", call.name}, {"arguments", call.arguments.dump()}}}});
  }
  return msg;
}

ChatMessage tool_message(const FunctionCall& call, const Json& result) {
  ChatMessage msg;
  msg.role = "tool";
  msg.content = result.dump();
  msg.tool_call_id = call.id;
  msg.tool_name = call.name;
  return msg;
}

ChatMessage correction_message(const std::string& detail) {
  ChatMessage msg;
  msg.role = "user";
  msg.content = "Invalid response: " + detail +
                " Invoke exactly one output function (accept, reject, or "
                "update) for the record under review, or a database tool.";
  return msg;
}

}  // namespace

Json full_tool_schemas() {
  Json tools = database_tool_schemas();
  for (auto& fn : output_function_schemas()) {
    tools.push_back(std::move(fn));
  }
  return tools;
}

EpisodeResult run_episode(const MaintenanceRecord& record, Agent& agent,
                          const Datastore& store, const RetryPolicy& policy,
                          const DecodingParams& params,
                          const PromptBundle& bundle, bool measure_time) {
  EpisodeResult result;
  EpisodeContext ctx{&record};
  const Json tools = full_tool_schemas();

  auto started = std::chrono::steady_clock::now();
  std::string last_failure;

  for (int pass = 1; pass <= policy.record_retries; ++pass) {
    result.transcript.attempts.record_passes = pass;
    std::vector<ChatMessage> conversation = build_prompt(bundle, record);
    for (const auto& msg : conversation) {
      result.transcript.messages.push_back(msg);
    }
    agent.begin_pass(ctx);

    int output_attempts = 0;
    int tool_calls = 0;
    std::map<std::string, int> tool_failures;
    bool pass_failed = false;
    bool episode_fatal = false;

    auto record_message = [&](const ChatMessage& msg) {
      conversation.push_back(msg);
      result.transcript.messages.push_back(msg);
    };

    auto invalid_output = [&](const std::string& detail) {
      ++output_attempts;
      ++result.transcript.attempts.output_attempts;
      if (output_attempts >= policy.output_retries) {
        last_failure = "structured-output budget exhausted (" +
                       std::to_string(policy.output_retries) +
                       " attempts): " + detail;
        pass_failed = true;
        return;
      }
      record_message(correction_message(detail));
    };

    while (!pass_failed && !episode_fatal) {
      AgentReply reply;
      try {
        reply = agent.respond(conversation, tools, params, ctx);
      } catch (const TransportError& e) {
        invalid_output(std::string("transport failure: ") + e.what());
        continue;
      }
      result.transcript.request_tokens += reply.usage.request_tokens;
      result.transcript.response_tokens += reply.usage.response_tokens;
      result.transcript.usage_estimated |= reply.usage.estimated;
      record_message(assistant_message(reply));

      if (reply.calls.empty()) {
        invalid_output("no function was invoked.");
        continue;
      }

      bool has_output_call = false;
      for (const auto& call : reply.calls) {
        if (is_output_function(call.name)) has_output_call = true;
      }

      if (has_output_call) {
        ++output_attempts;
        ++result.transcript.attempts.output_attempts;
        if (reply.calls.size() > 1) {
          if (output_attempts >= policy.output_retries) {
            last_failure = "structured-output budget exhausted";
            pass_failed = true;
          } else {
            record_message(correction_message(
                "more than one function was invoked in a single action "
                "message."));
          }
          continue;
        }
        const FunctionCall& call = reply.calls.front();
        try {
          Action action = validate_action_payload(
              Json{{"name", call.name}, {"arguments", call.arguments}});
          result.outcome = apply_action(record, action);
          result.action = action;
          if (measure_time) {
            result.transcript.wall_time_seconds =
                std::chrono::duration<double>(
                    std::chrono::steady_clock::now() - started)
                    .count();
          }
          return result;
        } catch (const InvalidActionPayload& e) {
          --output_attempts;  // invalid_output() recounts this attempt
          --result.transcript.attempts.output_attempts;
          invalid_output(std::string(e.what()) + ".");
          continue;
        } catch (const ActionContractError& e) {
          // A committed action that violates the record contract fails the
          // episode outright.
          result.outcome = {EpisodeStatus::kFailed, std::nullopt};
          result.failure_reason = std::string("contract violation: ") + e.what();
          last_failure = *result.failure_reason;
          episode_fatal = true;
          continue;
        }
      }

      // Database tool calls only.
      for (const auto& call : reply.calls) {
        if (++tool_calls > policy.tool_call_depth) {
          last_failure = "tool-call depth cap (" +
                         std::to_string(policy.tool_call_depth) +
                         ") exceeded";
          pass_failed = true;
          break;
        }
        ++result.transcript.attempts.tool_calls;
        Json tool_result;
        bool failed = false;
        try {
          tool_result = dispatch_database_tool(store, call.name,
                                               call.arguments);
        } catch (const ToolInvocationError& e) {
          failed = true;
          tool_result = Json{{"error", e.what()}};
          int failures = ++tool_failures[call.name];
          result.transcript.attempts.tool_failures[call.name] += 1;
          if (failures >= policy.tool_retries) {
            last_failure = "tool '" + call.name + "' failed " +
                           std::to_string(failures) + " times";
            pass_failed = true;
          }
        }
        result.transcript.tool_calls.push_back(
            {call.name, call.arguments, tool_result, failed});
        record_message(tool_message(call, tool_result));
        if (pass_failed) break;
      }
    }

    if (episode_fatal) break;
  }

  result.outcome = {EpisodeStatus::kFailed, std::nullopt};
  result.action = std::nullopt;
  if (!result.failure_reason) {
    result.failure_reason = last_failure.empty()
                                ? std::string("retry budgets exhausted")
                                : last_failure;
  }
  if (measure_time) {
    result.transcript.wall_time_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                      started)
            .count();
  }
  return result;
}

}  // namespace fleetlog
