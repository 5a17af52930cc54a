#include "fleetlog/orchestrator.hpp"

#include <atomic>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <thread>

namespace fleetlog {

namespace {

std::string timestamp_now() {
  auto now = std::chrono::system_clock::now();
  std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string env_name(int index) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "env_%03d", index);
  return buf;
}

const char* pair_status_name(PairStatus s) {
  switch (s) {
    case PairStatus::kPending: return "pending";
    case PairStatus::kDone: return "done";
    case PairStatus::kFailed: return "failed";
  }
  return "pending";
}

PairStatus pair_status_from(const std::string& s) {
  if (s == "done") return PairStatus::kDone;
  if (s == "failed") return PairStatus::kFailed;
  return PairStatus::kPending;
}

}  // namespace

void ExperimentPlan::validate(const NoiseTaxonomy& taxonomy) const {
  if (replications < 1) {
    throw OrchestratorError("replications must be >= 1");
  }
  if (parallelism < 1) {
    throw OrchestratorError("parallelism must be >= 1");
  }
  generation.validate();
  mix.validate(taxonomy);
}

ExperimentPlan ExperimentPlan::from_json(const Json& j) {
  ExperimentPlan plan;
  if (j.contains("generation")) {
    plan.generation = generation_config_from_json(j.at("generation"));
  }
  if (j.contains("fleet_size")) {
    plan.generation.fleet_size = j.at("fleet_size").get<int>();
  }
  if (j.contains("mix")) {
    plan.mix = noise_mix_from_json(j.at("mix"));
  } else {
    plan.mix = NoiseMix::uniform(NoiseTaxonomy::standard());
  }
  plan.replications = j.value("replications", 1);
  if (j.contains("theta_space")) {
    plan.theta_space = theta_space_from_json(j.at("theta_space"));
  }
  if (j.contains("retry")) {
    plan.retry = retry_policy_from_json(j.at("retry"));
  }
  if (j.contains("models")) {
    for (const auto& m : j.at("models")) {
      plan.models.push_back(model_spec_from_json(m));
    }
  }
  plan.master_seed = j.value("master_seed", 1ULL);
  plan.parallelism = j.value("parallelism", 1);
  return plan;
}

Json ExperimentPlan::to_json() const {
  Json models = Json::array();
  for (const auto& m : this->models) models.push_back(model_spec_to_json(m));
  return Json{{"fleet_size", generation.fleet_size},
              {"mix", noise_mix_to_json(mix)},
              {"replications", replications},
              {"master_seed", master_seed},
              {"parallelism", parallelism},
              {"theta_space", theta_space_to_json(theta_space)},
              {"retry", retry_policy_to_json(retry)},
              {"models", models},
              {"generation", generation_config_to_json(generation)}};
}

Json RunManifest::to_json() const {
  Json envs = Json::array();
  for (const auto& e : environments) {
    envs.push_back({{"name", e.name},
                    {"seed", e.seed},
                    {"theta", decoding_params_to_json(e.theta)},
                    {"reserved", e.reserved}});
  }
  Json pairs_json = Json::array();
  for (const auto& p : pairs) {
    pairs_json.push_back({{"agent", p.agent_label},
                          {"env", p.env_name},
                          {"status", pair_status_name(p.status)},
                          {"episodes_file", p.episodes_file},
                          {"finished_at", p.finished_at}});
  }
  return Json{{"environments", envs}, {"pairs", pairs_json}};
}

RunManifest RunManifest::from_json(const Json& j) {
  RunManifest m;
  for (const auto& e : j.at("environments")) {
    ManifestEnvironment env;
    env.name = e.at("name").get<std::string>();
    env.seed = e.at("seed").get<std::uint64_t>();
    env.theta = decoding_params_from_json(e.at("theta"));
    env.reserved = e.value("reserved", false);
    m.environments.push_back(std::move(env));
  }
  for (const auto& p : j.at("pairs")) {
    ManifestPair pair;
    pair.agent_label = p.at("agent").get<std::string>();
    pair.env_name = p.at("env").get<std::string>();
    pair.status = pair_status_from(p.at("status").get<std::string>());
    pair.episodes_file = p.value("episodes_file", "");
    pair.finished_at = p.value("finished_at", "");
    m.pairs.push_back(std::move(pair));
  }
  return m;
}

void save_manifest(const RunManifest& manifest,
                   const std::filesystem::path& run_dir) {
  write_json_file(run_dir / "manifest.json", manifest.to_json());
}

RunManifest load_manifest(const std::filesystem::path& run_dir) {
  return RunManifest::from_json(load_json_file(run_dir / "manifest.json"));
}

RunManifest plan_experiment(const ExperimentPlan& plan,
                            const std::vector<std::string>& agent_labels,
                            const NoiseTaxonomy& taxonomy,
                            const std::filesystem::path& run_dir) {
  plan.validate(taxonomy);
  if (agent_labels.empty()) {
    throw OrchestratorError("at least one agent label is required");
  }
  if (std::filesystem::exists(run_dir / "manifest.json")) {
    throw OrchestratorError("run directory " + run_dir.string() +
                            " already holds a manifest; resume it or remove "
                            "it first");
  }
  std::filesystem::create_directories(run_dir);

  auto seed_rng = RngStream::derive(plan.master_seed, "environment-seeds");
  auto theta_rng = RngStream::derive(plan.master_seed, "theta");

  RunManifest manifest;
  // R+1 environments; the final one is reserved for the prompt-template step
  // (the shipped template stands in for it) and never evaluated.
  for (int r = 1; r <= plan.replications + 1; ++r) {
    ManifestEnvironment env;
    env.name = env_name(r);
    env.seed = seed_rng.next_u64();
    env.theta = plan.theta_space.sample(theta_rng);
    env.reserved = (r == plan.replications + 1);

    GenerationConfig config = plan.generation;
    config.seed = env.seed;
    Environment generated = generate_environment(
        config, plan.mix, taxonomy, Catalog::standard(), env.theta);
    write_environment(generated, run_dir / env.name);
    manifest.environments.push_back(std::move(env));
  }

  for (const auto& label : agent_labels) {
    for (const auto& env : manifest.environments) {
      if (env.reserved) continue;
      ManifestPair pair;
      pair.agent_label = label;
      pair.env_name = env.name;
      pair.episodes_file = "runs/" + label + "/" + env.name + "/episodes.jsonl";
      manifest.pairs.push_back(std::move(pair));
    }
  }
  save_manifest(manifest, run_dir);
  return manifest;
}

Json episode_to_json(const MaintenanceRecord& record,
                     const EpisodeResult& result, const std::string& label) {
  Json action = nullptr;
  if (result.action) {
    action = action_to_payload(*result.action);
  }
  Json messages = Json::array();
  for (const auto& msg : result.transcript.messages) {
    Json m{{"role", msg.role}, {"content", msg.content}};
    if (!msg.tool_calls.empty()) m["tool_calls"] = msg.tool_calls;
    if (!msg.tool_name.empty()) m["name"] = msg.tool_name;
    messages.push_back(std::move(m));
  }
  Json tool_calls = Json::array();
  for (const auto& call : result.transcript.tool_calls) {
    tool_calls.push_back({{"tool", call.tool},
                          {"arguments", call.arguments},
                          {"result", call.result},
                          {"failed", call.failed}});
  }
  Json j{{"wo_num", record.wo_num},
         {"agent", label},
         {"status", episode_status_name(result.outcome.status)},
         {"action", action},
         {"usage",
          {{"request_tokens", result.transcript.request_tokens},
           {"response_tokens", result.transcript.response_tokens},
           {"estimated", result.transcript.usage_estimated},
           {"wall_time_seconds", result.transcript.wall_time_seconds}}},
         {"attempts",
          {{"output", result.transcript.attempts.output_attempts},
           {"passes", result.transcript.attempts.record_passes},
           {"tool_calls", result.transcript.attempts.tool_calls}}},
         {"tool_calls", tool_calls},
         {"messages", messages}};
  if (result.failure_reason) j["failure_reason"] = *result.failure_reason;
  return j;
}

namespace {

/// Runs all episodes of one (agent, environment) pair; results keep noisy-log
/// order regardless of the thread count.
std::vector<EpisodeResult> run_pair_episodes(const LoadedEnvironment& env,
                                             Agent& agent,
                                             const Datastore& store,
                                             const RetryPolicy& retry,
                                             int parallelism,
                                             bool measure_time) {
  const auto& records = env.noisy_log;
  std::vector<EpisodeResult> results(records.size());
  std::atomic<std::size_t> next{0};
  int threads = std::max(1, std::min<int>(parallelism,
                                          static_cast<int>(records.size())));
  auto worker = [&] {
    while (true) {
      std::size_t i = next.fetch_add(1);
      if (i >= records.size()) break;
      results[i] = run_episode(records[i], agent, store, retry, env.theta,
                               PromptBundle::shipped(), measure_time);
    }
  };
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  return results;
}

}  // namespace

void execute(RunManifest& manifest, const ExperimentPlan& plan,
             const NoiseTaxonomy& taxonomy, const AgentFactory& factory,
             const std::filesystem::path& run_dir,
             const ExecuteOptions& options) {
  for (auto& pair : manifest.pairs) {
    if (pair.status == PairStatus::kDone) continue;

    try {
      auto env_dir = run_dir / pair.env_name;
      LoadedEnvironment env = load_environment(env_dir);
      Datastore store = Datastore::load(env_dir);
      std::unique_ptr<Agent> agent = factory(pair.agent_label, env, env_dir);

      int parallelism =
          options.parallelism >= 1 ? options.parallelism : plan.parallelism;
      auto results = run_pair_episodes(env, *agent, store, plan.retry,
                                       parallelism, options.measure_time);

      auto episodes_path = run_dir / pair.episodes_file;
      std::filesystem::create_directories(episodes_path.parent_path());
      std::ofstream out(episodes_path, std::ios::binary);
      if (!out) {
        throw OrchestratorError("cannot write " + episodes_path.string());
      }
      for (std::size_t i = 0; i < results.size(); ++i) {
        out << episode_to_json(env.noisy_log[i], results[i], pair.agent_label)
                   .dump()
            << "\n";
      }
      pair.status = PairStatus::kDone;
      pair.finished_at = timestamp_now();
    } catch (const std::exception& e) {
      // Environment-level faults mark the pair failed; the run continues.
      pair.status = PairStatus::kFailed;
      pair.finished_at = timestamp_now();
      std::fprintf(stderr, "[fleetlog] pair (%s, %s) failed: %s\n",
                   pair.agent_label.c_str(), pair.env_name.c_str(), e.what());
    }
    save_manifest(manifest, run_dir);
    if (options.progress && !options.progress(pair)) {
      return;  // interrupted; resumable from the manifest
    }
  }
  write_reports(manifest, plan, taxonomy, run_dir);
}

EvaluationReport evaluate_episode_file(const std::filesystem::path& episodes,
                                       const LoadedEnvironment& env,
                                       const NoiseTaxonomy& taxonomy,
                                       double price_in_per_mtok,
                                       double price_out_per_mtok) {
  std::map<std::string, const NoiseLabel*> labels;
  for (const auto& label : env.labels) labels[label.wo_num] = &label;
  std::map<std::string, const MaintenanceRecord*> clean;
  for (const auto& rec : env.clean_log) clean[rec.wo_num] = &rec;

  std::ifstream in(episodes);
  if (!in) {
    throw OrchestratorError("cannot open " + episodes.string());
  }
  std::vector<EpisodeScore> scores;
  std::vector<UsageSample> usage;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    Json j = Json::parse(line);
    std::string wo_num = j.at("wo_num").get<std::string>();
    auto label_it = labels.find(wo_num);
    if (label_it == labels.end()) {
      throw OrchestratorError("episode references unlabeled record " + wo_num);
    }
    const NoiseLabel& label = *label_it->second;

    std::string status = j.at("status").get<std::string>();
    EpisodeOutcome outcome;
    outcome.status = status == "accepted"
                         ? EpisodeStatus::kAccepted
                         : status == "rejected"
                               ? EpisodeStatus::kRejected
                               : status == "updated" ? EpisodeStatus::kUpdated
                                                     : EpisodeStatus::kFailed;
    std::optional<Action> action;
    if (!j.at("action").is_null()) {
      action = validate_action_payload(j.at("action"));
    }
    std::optional<MaintenanceRecord> clean_record;
    if (taxonomy.type(label.noise_type).kind != NoiseKind::kGenerative) {
      auto it = clean.find(wo_num);
      if (it == clean.end()) {
        throw OrchestratorError("no clean twin for record " + wo_num);
      }
      clean_record = *it->second;
    }
    scores.push_back(
        score_episode(label, clean_record, outcome, action, taxonomy));

    const Json& u = j.at("usage");
    usage.push_back({u.value("request_tokens", 0LL),
                     u.value("response_tokens", 0LL),
                     u.value("wall_time_seconds", 0.0),
                     u.value("estimated", false)});
  }
  return aggregate(scores, usage, price_in_per_mtok, price_out_per_mtok,
                   taxonomy);
}

std::vector<std::string> write_reports(const RunManifest& manifest,
                                       const ExperimentPlan& plan,
                                       const NoiseTaxonomy& taxonomy,
                                       const std::filesystem::path& run_dir) {
  std::map<std::string, std::pair<double, double>> prices;
  for (const auto& m : plan.models) {
    prices[m.model_name] = {m.price_in_per_mtok, m.price_out_per_mtok};
  }

  std::map<std::string, std::vector<EvaluationReport>> per_label;
  std::vector<std::string> order;
  for (const auto& pair : manifest.pairs) {
    if (pair.status != PairStatus::kDone) continue;
    LoadedEnvironment env = load_environment(run_dir / pair.env_name);
    auto [price_in, price_out] =
        prices.count(pair.agent_label) ? prices[pair.agent_label]
                                       : std::make_pair(0.0, 0.0);
    auto report = evaluate_episode_file(run_dir / pair.episodes_file, env,
                                        taxonomy, price_in, price_out);
    auto [it, inserted] = per_label.try_emplace(pair.agent_label);
    if (inserted) order.push_back(pair.agent_label);
    it->second.push_back(std::move(report));
  }

  auto reports_dir = run_dir / "reports";
  std::filesystem::create_directories(reports_dir);
  for (const auto& label : order) {
    AggregatedReport aggregated = aggregate_runs(per_label[label], taxonomy);
    std::ofstream txt(reports_dir / ("report_" + label + ".txt"),
                      std::ios::binary);
    txt << render_report_text(aggregated);
    std::ofstream csv(reports_dir / ("report_" + label + ".csv"),
                      std::ios::binary);
    csv << render_report_csv(aggregated);
    std::ofstream usage(reports_dir / ("usage_" + label + ".csv"),
                        std::ios::binary);
    usage << render_usage_csv(aggregated, label);
  }
  return order;
}

}  // namespace fleetlog
