#include <doctest.h>

#include <map>

#include "fleetlog/agent.hpp"
#include "helpers.hpp"

using namespace fleetlog;
using Json = nlohmann::ordered_json;

namespace {

AgentReply output_call(const std::string& name, Json args) {
  AgentReply reply;
  reply.calls.push_back({name, std::move(args), "t0"});
  return reply;
}

AgentReply accept_call(const std::string& wo) {
  return output_call("accept", Json{{"work_order_number", wo}});
}

/// Emits `failures` schema-invalid outputs per pass, then a valid accept.
class FlakyOutputAgent : public Agent {
 public:
  explicit FlakyOutputAgent(int failures) : failures_(failures) {}
  std::string name() const override { return "flaky"; }
  void begin_pass(const EpisodeContext&) override { attempt_ = 0; }
  AgentReply respond(const std::vector<ChatMessage>&, const Json&,
                     const DecodingParams&, const EpisodeContext& ctx) override {
    if (attempt_++ < failures_) {
      return output_call("accept", Json::object());  // missing wo number
    }
    return accept_call(ctx.record->wo_num);
  }

 private:
  int failures_;
  int attempt_ = 0;
};

/// Fails the named tool `failures` times per pass, then accepts.
class FlakyToolAgent : public Agent {
 public:
  explicit FlakyToolAgent(int failures) : failures_(failures) {}
  std::string name() const override { return "flaky-tool"; }
  void begin_pass(const EpisodeContext&) override { attempt_ = 0; }
  AgentReply respond(const std::vector<ChatMessage>&, const Json&,
                     const DecodingParams&, const EpisodeContext& ctx) override {
    if (attempt_++ < failures_) {
      AgentReply reply;
      reply.calls.push_back(
          {"describe_table", Json{{"wrong_arg", 1}}, "t0"});
      return reply;
    }
    return accept_call(ctx.record->wo_num);
  }

 private:
  int failures_;
  int attempt_ = 0;
};

/// Throws TransportError `failures` times per episode, then accepts.
class FlakyTransportAgent : public Agent {
 public:
  explicit FlakyTransportAgent(int failures) : failures_(failures) {}
  std::string name() const override { return "flaky-transport"; }
  AgentReply respond(const std::vector<ChatMessage>&, const Json&,
                     const DecodingParams&, const EpisodeContext& ctx) override {
    if (attempt_++ < failures_) throw TransportError("connection reset");
    AgentReply reply = accept_call(ctx.record->wo_num);
    reply.usage = {100, 10, false};
    return reply;
  }

 private:
  int failures_;
  int attempt_ = 0;
};

/// Endlessly queries list_tables; never commits an action.
class RunawayAgent : public Agent {
 public:
  std::string name() const override { return "runaway"; }
  AgentReply respond(const std::vector<ChatMessage>&, const Json&,
                     const DecodingParams&, const EpisodeContext&) override {
    AgentReply reply;
    reply.calls.push_back({"list_tables", Json::object(), "t0"});
    reply.usage = {7, 3, false};
    return reply;
  }
};

/// Invokes two output functions in one message, then behaves.
class DoubleCallAgent : public Agent {
 public:
  std::string name() const override { return "double"; }
  AgentReply respond(const std::vector<ChatMessage>&, const Json&,
                     const DecodingParams&, const EpisodeContext& ctx) override {
    if (first_) {
      first_ = false;
      AgentReply reply;
      reply.calls.push_back(
          {"accept", Json{{"work_order_number", ctx.record->wo_num}}, "a"});
      reply.calls.push_back(
          {"reject", Json{{"work_order_number", ctx.record->wo_num}}, "b"});
      return reply;
    }
    return accept_call(ctx.record->wo_num);
  }

 private:
  bool first_ = true;
};

struct StoreFixture {
  test::FigureWorld world = test::FigureWorld::make();
  test::TempDir dir{"agent"};
  Datastore store = [this] {
    write_environment(world.env, dir.path());
    return Datastore::load(dir.path());
  }();
  RetryPolicy policy;
  DecodingParams theta{0.1, 0.9};
};

}  // namespace

TEST_CASE("structured-output budget: success on the 50th attempt") {
  StoreFixture f;
  const auto& record = f.world.env.noisy_log[4];  // WO888, clean

  FlakyOutputAgent ok(49);
  auto result = run_episode(record, ok, f.store, f.policy, f.theta);
  CHECK(result.outcome.status == EpisodeStatus::kAccepted);
  CHECK(result.transcript.attempts.output_attempts == 50);
  CHECK(result.transcript.attempts.record_passes == 1);
}

TEST_CASE("structured-output budget: the 51st attempt never happens") {
  StoreFixture f;
  const auto& record = f.world.env.noisy_log[4];

  FlakyOutputAgent late(50);  // would succeed on attempt 51
  auto result = run_episode(record, late, f.store, f.policy, f.theta);
  CHECK(result.outcome.status == EpisodeStatus::kFailed);
  CHECK(result.transcript.attempts.record_passes == 3);
  CHECK(result.transcript.attempts.output_attempts == 150);
  REQUIRE(result.failure_reason.has_value());
  CHECK(result.failure_reason->find("structured-output") != std::string::npos);
}

TEST_CASE("tool budget: two failures survive, three kill the pass") {
  StoreFixture f;
  const auto& record = f.world.env.noisy_log[4];

  FlakyToolAgent ok(2);
  auto fine = run_episode(record, ok, f.store, f.policy, f.theta);
  CHECK(fine.outcome.status == EpisodeStatus::kAccepted);
  CHECK(fine.transcript.attempts.tool_failures.at("describe_table") == 2);

  FlakyToolAgent broken(3);
  auto failed = run_episode(record, broken, f.store, f.policy, f.theta);
  CHECK(failed.outcome.status == EpisodeStatus::kFailed);
  CHECK(failed.transcript.attempts.record_passes == 3);
  CHECK(failed.transcript.attempts.tool_failures.at("describe_table") == 9);
}

TEST_CASE("record budget: failing twice then succeeding uses three passes") {
  StoreFixture f;
  const auto& record = f.world.env.noisy_log[4];

  // Two full passes exhaust their output budget; the third pass commits.
  class TwoBadPasses : public Agent {
   public:
    std::string name() const override { return "two-bad"; }
    void begin_pass(const EpisodeContext&) override {
      ++pass_;
      attempt_ = 0;
    }
    AgentReply respond(const std::vector<ChatMessage>&, const Json&,
                       const DecodingParams&,
                       const EpisodeContext& ctx) override {
      if (pass_ <= 2) {
        ++attempt_;
        return output_call("accept", Json::object());
      }
      return accept_call(ctx.record->wo_num);
    }

   private:
    int pass_ = 0;
    int attempt_ = 0;
  };

  TwoBadPasses agent;
  auto result = run_episode(record, agent, f.store, f.policy, f.theta);
  CHECK(result.outcome.status == EpisodeStatus::kAccepted);
  CHECK(result.transcript.attempts.record_passes == 3);
  CHECK(result.transcript.attempts.output_attempts == 101);
}

TEST_CASE("transport failures consume output attempts and accumulate usage") {
  StoreFixture f;
  const auto& record = f.world.env.noisy_log[4];

  FlakyTransportAgent agent(3);
  auto result = run_episode(record, agent, f.store, f.policy, f.theta);
  CHECK(result.outcome.status == EpisodeStatus::kAccepted);
  CHECK(result.transcript.attempts.output_attempts == 4);
  CHECK(result.transcript.request_tokens == 100);
  CHECK(result.transcript.response_tokens == 10);
}

TEST_CASE("tool-call depth cap stops runaway agents") {
  StoreFixture f;
  const auto& record = f.world.env.noisy_log[4];

  RunawayAgent agent;
  auto result = run_episode(record, agent, f.store, f.policy, f.theta);
  CHECK(result.outcome.status == EpisodeStatus::kFailed);
  // 25 tool calls per pass, three passes, all recorded with usage
  CHECK(result.transcript.attempts.tool_calls == 3 * f.policy.tool_call_depth);
  CHECK(result.transcript.request_tokens > 0);
  REQUIRE(result.failure_reason.has_value());
  CHECK(result.failure_reason->find("depth") != std::string::npos);
}

TEST_CASE("invoking two output functions in one message is one bad attempt") {
  StoreFixture f;
  const auto& record = f.world.env.noisy_log[4];

  DoubleCallAgent agent;
  auto result = run_episode(record, agent, f.store, f.policy, f.theta);
  CHECK(result.outcome.status == EpisodeStatus::kAccepted);
  CHECK(result.transcript.attempts.output_attempts == 2);
}

TEST_CASE("a committed action for the wrong record fails the episode") {
  StoreFixture f;
  const auto& record = f.world.env.noisy_log[4];

  class WrongRecordAgent : public Agent {
   public:
    std::string name() const override { return "wrong"; }
    AgentReply respond(const std::vector<ChatMessage>&, const Json&,
                       const DecodingParams&, const EpisodeContext&) override {
      return accept_call("WO000");
    }
  };
  WrongRecordAgent agent;
  auto result = run_episode(record, agent, f.store, f.policy, f.theta);
  CHECK(result.outcome.status == EpisodeStatus::kFailed);
  REQUIRE(result.failure_reason.has_value());
  CHECK(result.failure_reason->find("contract") != std::string::npos);
  // terminal: no second pass after a contract violation
  CHECK(result.transcript.attempts.record_passes == 1);
}

TEST_CASE("the advertised tools are exactly 3 database + 3 output functions") {
  Json tools = full_tool_schemas();
  REQUIRE(tools.size() == 6);
  std::vector<std::string> names;
  for (const auto& t : tools) {
    names.push_back(t.at("function").at("name").get<std::string>());
  }
  CHECK(names == std::vector<std::string>{"list_tables", "describe_table",
                                          "run_sql", "accept", "reject",
                                          "update"});
}

TEST_CASE("oracle agent walks the full path with zero retries") {
  StoreFixture f;
  auto taxonomy = NoiseTaxonomy::standard();
  auto oracle = make_oracle_agent(f.world.env.labels, taxonomy);

  std::map<std::string, EpisodeStatus> expected = {
      {"WO129", EpisodeStatus::kUpdated},  {"WO827", EpisodeStatus::kUpdated},
      {"WO329", EpisodeStatus::kUpdated},  {"WO679", EpisodeStatus::kUpdated},
      {"WO888", EpisodeStatus::kAccepted}, {"WO333", EpisodeStatus::kRejected},
      {"WO429", EpisodeStatus::kRejected},
  };
  for (const auto& record : f.world.env.noisy_log) {
    auto result = run_episode(record, *oracle, f.store, f.policy, f.theta);
    CHECK(result.outcome.status == expected.at(record.wo_num));
    CHECK(result.transcript.attempts.output_attempts == 1);
    CHECK(result.transcript.attempts.record_passes == 1);
    CHECK(result.transcript.attempts.tool_calls == 0);
  }

  // unlabeled record: the oracle is a harness-level error, not a failed
  // episode
  MaintenanceRecord stranger = f.world.env.noisy_log[0];
  stranger.wo_num = "WO777";
  CHECK_THROWS_AS(run_episode(stranger, *oracle, f.store, f.policy, f.theta),
                  std::runtime_error);
}

TEST_CASE("rule baseline repairs the reference rows") {
  StoreFixture f;
  auto baseline = make_rule_baseline_agent("AA9999");

  std::map<std::string, Action> expected = {
      {"WO129", Action::update("WO129", "license_plate", "AH4657")},
      {"WO827", Action::update("WO827", "system", "Brake System")},
      {"WO329", Action::update("WO329", "component", "Compressor")},
      {"WO679", Action::update("WO679", "end_date", "2022-06-21")},
      {"WO888", Action::accept("WO888")},
      {"WO333", Action::reject("WO333")},
      {"WO429", Action::reject("WO429")},
  };
  for (const auto& record : f.world.env.noisy_log) {
    auto result = run_episode(record, *baseline, f.store, f.policy, f.theta);
    REQUIRE_MESSAGE(result.action.has_value(), (record.wo_num));
    CHECK_MESSAGE(*result.action == expected.at(record.wo_num),
                  (record.wo_num + ": got " +
                   action_to_payload(*result.action).dump()));
  }
}

TEST_CASE("baseline transcripts record every datastore call in order") {
  StoreFixture f;
  auto baseline = make_rule_baseline_agent("AA9999");
  const auto& record = f.world.env.noisy_log[4];  // WO888, clean

  auto result = run_episode(record, *baseline, f.store, f.policy, f.theta);
  // plate lookup, catalog fetch, odometer scan
  REQUIRE(result.transcript.tool_calls.size() == 3);
  for (const auto& call : result.transcript.tool_calls) {
    CHECK(call.tool == "run_sql");
    CHECK_FALSE(call.failed);
  }
  CHECK(result.transcript.tool_calls[0].arguments.at("query").get<std::string>()
            .find("fleet_registry") != std::string::npos);
  CHECK(result.transcript.tool_calls[1].arguments.at("query").get<std::string>()
            .find("service_catalog") != std::string::npos);
  CHECK(result.transcript.tool_calls[2].arguments.at("query").get<std::string>()
            .find("signal_odometer") != std::string::npos);

  // conversation protocol: system, user, then alternating assistant/tool,
  // final assistant commits the action
  const auto& msgs = result.transcript.messages;
  REQUIRE(msgs.size() == 9);
  CHECK(msgs[0].role == "system");
  CHECK(msgs[1].role == "user");
  for (std::size_t i = 2; i + 1 < msgs.size(); i += 2) {
    CHECK(msgs[i].role == "assistant");
    CHECK(msgs[i + 1].role == "tool");
  }
  CHECK(msgs.back().role == "assistant");
}

TEST_CASE("baseline on generated environments never fails and stays exact on "
          "entity noise") {
  Environment env = test::small_environment(404, 21);
  test::TempDir dir("baseline_env");
  write_environment(env, dir.path());
  Datastore store = Datastore::load(dir.path());
  auto baseline = make_rule_baseline_agent(env.config.plate_pattern);
  auto taxonomy = NoiseTaxonomy::standard();
  RetryPolicy policy;

  for (std::size_t i = 0; i < env.noisy_log.size(); ++i) {
    auto result = run_episode(env.noisy_log[i], *baseline, store, policy,
                              DecodingParams{});
    REQUIRE(result.action.has_value());
    const NoiseLabel& label = env.labels[i];
    Action truth = ground_truth_action(label, taxonomy);
    if (label.noise_type == "M0" || label.noise_type == "M1" ||
        label.noise_type == "M2" || label.noise_type == "M5" ||
        label.noise_type == "M6" || label.noise_type == "M4") {
      CHECK_MESSAGE(*result.action == truth,
                    (label.noise_type + " " + label.wo_num + ": got " +
                     action_to_payload(*result.action).dump()));
    }
  }
}
