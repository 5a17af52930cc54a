#include <doctest.h>

#include <fstream>

#include "fleetlog/llm_client.hpp"
#include "fleetlog/orchestrator.hpp"
#include "helpers.hpp"

using namespace fleetlog;
using Json = nlohmann::ordered_json;

namespace {

ExperimentPlan small_plan(int replications, std::uint64_t master_seed) {
  ExperimentPlan plan;
  plan.generation = test::small_config(0, 14);
  plan.mix = NoiseMix::uniform(NoiseTaxonomy::standard());
  plan.replications = replications;
  plan.master_seed = master_seed;
  plan.parallelism = 2;
  return plan;
}

AgentFactory oracle_factory(const NoiseTaxonomy& taxonomy) {
  return [&taxonomy](const std::string&, const LoadedEnvironment& env,
                     const std::filesystem::path&) {
    return make_oracle_agent(env.labels, taxonomy);
  };
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

}  // namespace

TEST_CASE("plan generates R+1 environments and reserves the last") {
  auto taxonomy = NoiseTaxonomy::standard();
  test::TempDir dir("plan");
  auto manifest = plan_experiment(small_plan(2, 11), {"oracle"}, taxonomy,
                                  dir.path());

  REQUIRE(manifest.environments.size() == 3);
  CHECK_FALSE(manifest.environments[0].reserved);
  CHECK_FALSE(manifest.environments[1].reserved);
  CHECK(manifest.environments[2].reserved);
  // pairs exist only for evaluation environments
  REQUIRE(manifest.pairs.size() == 2);
  for (const auto& pair : manifest.pairs) {
    CHECK(pair.status == PairStatus::kPending);
    CHECK(pair.env_name != manifest.environments[2].name);
  }
  // every environment is on disk, the reserved one included
  for (const auto& env : manifest.environments) {
    CHECK(std::filesystem::exists(dir.path() / env.name / envfile::kMeta));
  }
  // theta stays inside the sampled space
  for (const auto& env : manifest.environments) {
    CHECK(env.theta.temperature > 0.0);
    CHECK(env.theta.temperature < 0.2);
    CHECK(env.theta.top_p > 0.7);
    CHECK(env.theta.top_p < 1.0);
  }
}

TEST_CASE("planning refuses to clobber an existing manifest") {
  auto taxonomy = NoiseTaxonomy::standard();
  test::TempDir dir("clobber");
  plan_experiment(small_plan(1, 4), {"oracle"}, taxonomy, dir.path());
  CHECK_THROWS_AS(
      plan_experiment(small_plan(1, 4), {"oracle"}, taxonomy, dir.path()),
      OrchestratorError);
}

TEST_CASE("replanning from one master seed is deterministic") {
  auto taxonomy = NoiseTaxonomy::standard();
  test::TempDir a("plan_a"), b("plan_b");
  auto ma = plan_experiment(small_plan(2, 77), {"oracle"}, taxonomy, a.path());
  auto mb = plan_experiment(small_plan(2, 77), {"oracle"}, taxonomy, b.path());

  REQUIRE(ma.environments.size() == mb.environments.size());
  for (std::size_t i = 0; i < ma.environments.size(); ++i) {
    CHECK(ma.environments[i].seed == mb.environments[i].seed);
    CHECK(ma.environments[i].theta.temperature ==
          mb.environments[i].theta.temperature);
  }
  for (const auto& env : ma.environments) {
    CHECK(slurp(a.path() / env.name / envfile::kNoisyLog) ==
          slurp(b.path() / env.name / envfile::kNoisyLog));
  }
}

TEST_CASE("oracle execution yields an all-100 report with zero failures") {
  auto taxonomy = NoiseTaxonomy::standard();
  test::TempDir dir("exec");
  ExperimentPlan plan = small_plan(2, 5);
  auto manifest = plan_experiment(plan, {"oracle"}, taxonomy, dir.path());

  ExecuteOptions options;
  options.parallelism = 2;
  execute(manifest, plan, taxonomy, oracle_factory(taxonomy), dir.path(),
          options);

  for (const auto& pair : manifest.pairs) {
    CHECK(pair.status == PairStatus::kDone);
    // episode count per pair equals the noisy log size
    std::ifstream in(dir.path() / pair.episodes_file);
    int lines = 0;
    std::string line;
    while (std::getline(in, line)) lines += !line.empty();
    CHECK(lines == 14);
  }

  LoadedEnvironment env =
      load_environment(dir.path() / manifest.pairs[0].env_name);
  auto report = evaluate_episode_file(
      dir.path() / manifest.pairs[0].episodes_file, env, taxonomy, 0, 0);
  for (const auto& row : report.per_type) {
    CHECK(row.edr == doctest::Approx(1.0));
    if (row.ecr) CHECK(*row.ecr == doctest::Approx(1.0));
    CHECK(row.failed == 0);
  }

  CHECK(std::filesystem::exists(dir.path() / "reports/report_oracle.txt"));
  std::string text = slurp(dir.path() / "reports/report_oracle.txt");
  CHECK(text.find("100.0%") != std::string::npos);
}

TEST_CASE("an always-invalid agent fails every episode but the run completes") {
  auto taxonomy = NoiseTaxonomy::standard();
  test::TempDir dir("invalid");
  ExperimentPlan plan = small_plan(1, 6);
  plan.retry.output_retries = 3;  // keep the log small
  auto manifest = plan_experiment(plan, {"mockbad"}, taxonomy, dir.path());

  class AlwaysInvalid : public Agent {
   public:
    std::string name() const override { return "mockbad"; }
    AgentReply respond(const std::vector<ChatMessage>&, const Json&,
                       const DecodingParams&, const EpisodeContext&) override {
      AgentReply reply;
      reply.content = "I refuse to call functions.";
      return reply;
    }
  };

  AgentFactory factory = [](const std::string&, const LoadedEnvironment&,
                            const std::filesystem::path&) {
    return std::make_unique<AlwaysInvalid>();
  };
  execute(manifest, plan, taxonomy, factory, dir.path(), {});

  REQUIRE(manifest.pairs.size() == 1);
  CHECK(manifest.pairs[0].status == PairStatus::kDone);

  LoadedEnvironment env =
      load_environment(dir.path() / manifest.pairs[0].env_name);
  auto report = evaluate_episode_file(
      dir.path() / manifest.pairs[0].episodes_file, env, taxonomy, 0, 0);
  int failed = 0, n = 0;
  for (const auto& row : report.per_type) {
    failed += row.failed;
    n += row.n;
    CHECK(row.edr == doctest::Approx(0.0));
  }
  CHECK(n == 14);
  CHECK(failed == 14);
}

TEST_CASE("interrupted runs resume to the same final report") {
  auto taxonomy = NoiseTaxonomy::standard();
  ExperimentPlan plan = small_plan(3, 9);

  // uninterrupted reference
  test::TempDir full("resume_full");
  auto reference = plan_experiment(plan, {"oracle"}, taxonomy, full.path());
  execute(reference, plan, taxonomy, oracle_factory(taxonomy), full.path(), {});

  // interrupted after the first pair, then resumed from disk
  test::TempDir split("resume_split");
  auto manifest = plan_experiment(plan, {"oracle"}, taxonomy, split.path());
  ExecuteOptions stop_early;
  stop_early.progress = [](const ManifestPair&) { return false; };
  execute(manifest, plan, taxonomy, oracle_factory(taxonomy), split.path(),
          stop_early);

  auto reloaded = load_manifest(split.path());
  int done = 0;
  for (const auto& pair : reloaded.pairs) {
    done += pair.status == PairStatus::kDone;
  }
  CHECK(done == 1);

  execute(reloaded, plan, taxonomy, oracle_factory(taxonomy), split.path(), {});
  for (const auto& pair : reloaded.pairs) {
    CHECK(pair.status == PairStatus::kDone);
  }

  CHECK(slurp(full.path() / "reports/report_oracle.txt") ==
        slurp(split.path() / "reports/report_oracle.txt"));
  CHECK(slurp(full.path() / "reports/report_oracle.csv") ==
        slurp(split.path() / "reports/report_oracle.csv"));
}

TEST_CASE("agent label order never changes the datasets") {
  auto taxonomy = NoiseTaxonomy::standard();
  test::TempDir a("order_a"), b("order_b");
  plan_experiment(small_plan(1, 33), {"x", "y"}, taxonomy, a.path());
  plan_experiment(small_plan(1, 33), {"y", "x"}, taxonomy, b.path());
  auto ma = load_manifest(a.path());
  for (const auto& env : ma.environments) {
    CHECK(slurp(a.path() / env.name / envfile::kNoisyLog) ==
          slurp(b.path() / env.name / envfile::kNoisyLog));
    CHECK(slurp(a.path() / env.name / envfile::kOdometer) ==
          slurp(b.path() / env.name / envfile::kOdometer));
  }
}

TEST_CASE("the published replication count plans 32 environments") {
  auto taxonomy = NoiseTaxonomy::standard();
  test::TempDir dir("plan31");
  auto manifest = plan_experiment(small_plan(31, 7), {"oracle"}, taxonomy,
                                  dir.path());
  CHECK(manifest.environments.size() == 32);
  int reserved = 0;
  for (const auto& env : manifest.environments) reserved += env.reserved;
  CHECK(reserved == 1);
  CHECK(manifest.environments.back().reserved);
  CHECK(manifest.pairs.size() == 31);
}

TEST_CASE("an unreachable LLM endpoint fails episodes, not the run") {
  auto taxonomy = NoiseTaxonomy::standard();
  test::TempDir dir("unreachable");
  ExperimentPlan plan = small_plan(1, 8);
  plan.retry.output_retries = 2;  // keep the connection storm short
  plan.retry.record_retries = 2;
  auto manifest = plan_experiment(plan, {"dead-model"}, taxonomy, dir.path());

  AgentFactory factory = [](const std::string&, const LoadedEnvironment&,
                            const std::filesystem::path&) {
    ModelSpec dead{"dead-model", "http://127.0.0.1:1/v1", 0, 0, 0};
    return make_llm_agent(dead, "key");
  };
  execute(manifest, plan, taxonomy, factory, dir.path(), {});

  REQUIRE(manifest.pairs.size() == 1);
  CHECK(manifest.pairs[0].status == PairStatus::kDone);
  LoadedEnvironment env =
      load_environment(dir.path() / manifest.pairs[0].env_name);
  auto report = evaluate_episode_file(
      dir.path() / manifest.pairs[0].episodes_file, env, taxonomy, 0, 0);
  int failed = 0, n = 0;
  for (const auto& row : report.per_type) {
    failed += row.failed;
    n += row.n;
  }
  CHECK(n == 14);
  CHECK(failed == 14);
}

TEST_CASE("episode parallelism never changes deterministic results") {
  auto taxonomy = NoiseTaxonomy::standard();
  ExperimentPlan plan = small_plan(1, 10);
  plan.generation.fleet_size = 30;

  auto run_with = [&](int parallelism, const std::filesystem::path& dir) {
    auto manifest = plan_experiment(plan, {"oracle"}, taxonomy, dir);
    ExecuteOptions options;
    options.parallelism = parallelism;
    execute(manifest, plan, taxonomy, oracle_factory(taxonomy), dir, options);
    return slurp(dir / manifest.pairs[0].episodes_file);
  };

  test::TempDir serial("par1"), wide("par8");
  CHECK(run_with(1, serial.path()) == run_with(8, wide.path()));
}

TEST_CASE("plans serialize and reload bit-exactly") {
  ExperimentPlan plan = small_plan(4, 123);
  plan.models.push_back({"gpt-5", "https://example.invalid/v1", 1.25, 10.0,
                         400000});
  Json j = plan.to_json();
  ExperimentPlan back = ExperimentPlan::from_json(j);
  CHECK(back.to_json() == j);
  CHECK(back.models.size() == 1);
  CHECK(back.models[0].price_out_per_mtok == 10.0);
  CHECK(back.replications == 4);
  CHECK(back.master_seed == 123);
}

TEST_CASE("episode files round-trip through evaluation") {
  // wall-time and token fields survive persistence
  auto world = test::FigureWorld::make();
  test::TempDir dir("roundtrip");
  write_environment(world.env, dir.path());
  Datastore store = Datastore::load(dir.path());
  auto taxonomy = NoiseTaxonomy::standard();
  auto oracle = make_oracle_agent(world.env.labels, taxonomy);

  auto episodes_path = dir.path() / "episodes.jsonl";
  std::ofstream out(episodes_path);
  for (const auto& record : world.env.noisy_log) {
    auto result =
        run_episode(record, *oracle, store, RetryPolicy{}, DecodingParams{});
    out << episode_to_json(record, result, "oracle").dump() << "\n";
  }
  out.close();

  LoadedEnvironment env = load_environment(dir.path());
  auto report = evaluate_episode_file(episodes_path, env, taxonomy, 0, 0);
  int n = 0;
  for (const auto& row : report.per_type) {
    n += row.n;
    CHECK(row.edr == doctest::Approx(1.0));
  }
  CHECK(n == 7);
}
