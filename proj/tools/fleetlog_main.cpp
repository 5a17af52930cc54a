#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fleetlog/config.hpp"
#include "fleetlog/environment.hpp"
#include "fleetlog/llm_client.hpp"
#include "fleetlog/orchestrator.hpp"
#include "fleetlog/prompts.hpp"

namespace fs = std::filesystem;
using namespace fleetlog;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitHarness = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

NoiseMix parse_mix_option(const std::string& text,
                          const NoiseTaxonomy& taxonomy) {
  if (text == "uniform") return NoiseMix::uniform(taxonomy);
  NoiseMix mix;
  std::size_t begin = 0;
  while (begin < text.size()) {
    std::size_t end = text.find(',', begin);
    std::string part = text.substr(begin, end - begin);
    auto eq = part.find('=');
    if (eq == std::string::npos) {
      throw UsageError("--mix expects 'uniform' or 'M0=0.5,M3=0.5', got '" +
                       text + "'");
    }
    mix.proportions[part.substr(0, eq)] = std::stod(part.substr(eq + 1));
    if (end == std::string::npos) break;
    begin = end + 1;
  }
  return mix;
}

/// Work descriptions in llm mode come from the chat client; the config names
/// the model under "description_model".
DescriptionWriter make_description_writer(const Json& doc) {
  if (!doc.contains("description_model")) {
    throw UsageError(
        "description_mode=llm needs a 'description_model' entry "
        "({name, endpoint, ...}) in the config");
  }
  ModelSpec model = model_spec_from_json(doc.at("description_model"));
  auto key = resolve_api_key();
  if (!key) {
    throw UsageError(
        "description_mode=llm needs an API key; set FLEETLOG_API_KEY (or "
        "OPENROUTER_API_KEY / OPENAI_API_KEY)");
  }
  return [model, key](const MaintenanceRecord& rec) {
    std::vector<ChatMessage> messages = {
        {"system",
         "You write one-line maintenance work descriptions for workshop "
         "logs."},
        {"user", "Write a concise, technician-style note documenting this "
                 "intervention. Mention the component \"" +
                     rec.component + "\" and the activity \"" + rec.activity +
                     "\". Reply with the note only."}};
    auto response = llm_chat(model, messages, Json::array(), DecodingParams{},
                             *key);
    std::string note = response.content;
    while (!note.empty() && (note.back() == '\n' || note.back() == ' ')) {
      note.pop_back();
    }
    return note;
  };
}

int cmd_gen(const std::string& config_path,
            const std::vector<std::string>& overrides,
            const std::string& mix_option, int fleet_size_option,
            long long seed_option, const std::string& out_dir, bool force) {
  Json doc = Json::object();
  if (!config_path.empty()) doc = load_json_file(config_path);
  for (const auto& ov : overrides) apply_override(doc, ov);
  if (fleet_size_option > 0) doc["fleet_size"] = fleet_size_option;
  if (seed_option >= 0) doc["seed"] = seed_option;

  const NoiseTaxonomy taxonomy = NoiseTaxonomy::standard();
  GenerationConfig config = generation_config_from_json(doc);
  NoiseMix mix = doc.contains("mix") ? noise_mix_from_json(doc.at("mix"))
                                     : NoiseMix::uniform(taxonomy);
  if (!mix_option.empty()) mix = parse_mix_option(mix_option, taxonomy);

  // Validate everything before any I/O.
  config.validate();
  mix.validate(taxonomy);
  ThetaSpace theta_space;
  if (doc.contains("theta_space")) {
    theta_space = theta_space_from_json(doc.at("theta_space"));
  }
  DecodingParams theta;
  if (doc.contains("theta")) {
    theta = decoding_params_from_json(doc.at("theta"));
    if (!theta_space.conforms(theta)) {
      std::fprintf(stderr,
                   "[fleetlog] warning: pinned theta (temperature=%g, "
                   "top_p=%g) lies outside the sampling space "
                   "(non-conformant)\n",
                   theta.temperature, theta.top_p);
    }
  } else {
    auto theta_rng = RngStream::derive(config.seed, "theta");
    theta = theta_space.sample(theta_rng);
  }
  std::optional<DescriptionWriter> writer;
  if (config.description_mode == DescriptionMode::kLlm) {
    writer = make_description_writer(doc);
  }

  fs::path dir = out_dir;
  if (fs::exists(dir / envfile::kMeta) && !force) {
    throw UsageError("output directory " + dir.string() +
                     " already holds an environment; pass --force to "
                     "overwrite");
  }

  Environment env =
      generate_environment(config, mix, taxonomy, Catalog::standard(), theta,
                           writer ? &*writer : nullptr);
  write_environment(env, dir);

  std::map<std::string, int> counts;
  for (const auto& label : env.labels) counts[label.noise_type]++;
  std::printf("environment written to %s\n", dir.string().c_str());
  std::printf("noisy records: %zu (", env.noisy_log.size());
  bool first = true;
  for (const auto& [id, count] : counts) {
    std::printf("%s%s=%d", first ? "" : ", ", id.c_str(), count);
    first = false;
  }
  std::printf(")\n");
  return kExitOk;
}

int cmd_run(const std::string& plan_path, const std::string& agent_mode,
            const std::string& model_filter, const std::string& out_dir,
            bool resume, bool force, int parallelism_option) {
  const NoiseTaxonomy taxonomy = NoiseTaxonomy::standard();
  fs::path run_dir = out_dir;

  ExperimentPlan plan;
  RunManifest manifest;
  bool planned = false;

  if (fs::exists(run_dir / "manifest.json")) {
    if (force) {
      fs::remove_all(run_dir);
    } else if (resume) {
      plan = ExperimentPlan::from_json(load_json_file(run_dir / "plan.json"));
      manifest = load_manifest(run_dir);
      planned = true;
    } else {
      throw UsageError("run directory " + run_dir.string() +
                       " already holds a manifest; pass --resume to continue "
                       "it or --force to start over");
    }
  }

  if (!planned && plan_path.empty()) {
    throw UsageError("--plan is required for a fresh run");
  }
  if (!planned) {
    plan = ExperimentPlan::from_json(load_json_file(plan_path));
  }

  std::vector<std::string> labels;
  std::string api_key;
  if (agent_mode == "oracle") {
    labels = {"oracle"};
  } else if (agent_mode == "baseline") {
    labels = {"baseline"};
  } else if (agent_mode == "llm") {
    auto key = resolve_api_key();
    if (!key) {
      throw UsageError(
          "--agent llm needs an API key; set FLEETLOG_API_KEY (or "
          "OPENROUTER_API_KEY / OPENAI_API_KEY)");
    }
    api_key = *key;
    for (const auto& m : plan.models) {
      if (model_filter.empty() || m.model_name == model_filter) {
        if (m.endpoint.empty()) {
          throw UsageError("model '" + m.model_name +
                           "' has no endpoint configured");
        }
        labels.push_back(m.model_name);
      }
    }
    if (labels.empty()) {
      throw UsageError(model_filter.empty()
                           ? "plan has no models configured"
                           : "plan has no model named '" + model_filter + "'");
    }
  } else {
    throw UsageError("--agent must be one of llm, oracle, baseline");
  }

  if (!planned) {
    manifest = plan_experiment(plan, labels, taxonomy, run_dir);
    write_json_file(run_dir / "plan.json", plan.to_json());
  }

  AgentFactory factory = [&](const std::string& label,
                             const LoadedEnvironment& env,
                             const fs::path&) -> std::unique_ptr<Agent> {
    if (label == "oracle") return make_oracle_agent(env.labels, taxonomy);
    if (label == "baseline") {
      return make_rule_baseline_agent(env.config.plate_pattern);
    }
    for (const auto& m : plan.models) {
      if (m.model_name == label) return make_llm_agent(m, api_key);
    }
    throw OrchestratorError("no model spec for agent label " + label);
  };

  ExecuteOptions options;
  options.parallelism =
      parallelism_option >= 1 ? parallelism_option : plan.parallelism;
  options.measure_time = agent_mode == "llm";
  options.progress = [](const ManifestPair& pair) {
    std::printf("[fleetlog] %s / %s: %s\n", pair.agent_label.c_str(),
                pair.env_name.c_str(),
                pair.status == PairStatus::kDone ? "done" : "failed");
    return true;
  };

  execute(manifest, plan, taxonomy, factory, run_dir, options);

  int done = 0, failed = 0;
  for (const auto& pair : manifest.pairs) {
    done += pair.status == PairStatus::kDone;
    failed += pair.status == PairStatus::kFailed;
  }
  std::printf("run complete: %d pairs done, %d failed; reports in %s\n", done,
              failed, (run_dir / "reports").string().c_str());
  return kExitOk;
}

int cmd_report(const std::string& run_dir_option, const std::string& format) {
  fs::path run_dir = run_dir_option;
  if (!fs::exists(run_dir / "manifest.json")) {
    throw UsageError("no manifest.json under " + run_dir.string() +
                     "; not a run directory");
  }
  const NoiseTaxonomy taxonomy = NoiseTaxonomy::standard();
  ExperimentPlan plan =
      ExperimentPlan::from_json(load_json_file(run_dir / "plan.json"));
  RunManifest manifest = load_manifest(run_dir);

  int done = 0;
  for (const auto& pair : manifest.pairs) {
    done += pair.status == PairStatus::kDone;
  }
  if (done == 0) {
    throw UsageError("run directory has no finished pairs to report");
  }
  if (done < static_cast<int>(manifest.pairs.size())) {
    std::printf("[partial] %d of %zu pairs finished\n", done,
                manifest.pairs.size());
  }

  auto labels = write_reports(manifest, plan, taxonomy, run_dir);
  for (const auto& label : labels) {
    fs::path file = run_dir / "reports" /
                    ("report_" + label + (format == "csv" ? ".csv" : ".txt"));
    std::ifstream in(file);
    std::cout << "== " << label << " ==\n" << in.rdbuf() << "\n";
  }
  return kExitOk;
}

int cmd_catalog_validate(const std::string& path) {
  Catalog catalog = Catalog::load(path);
  std::printf(
      "catalog OK: %zu systems, %zu subsystems, %zu components, %zu entries\n",
      catalog.systems().size(), catalog.subsystems().size(),
      catalog.components().size(), catalog.rows().size());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "fleetlog: synthetic fleet-maintenance environments, log-cleaning "
      "agents, and their evaluation"};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand(
      "gen", "Generate one environment (clean + noisy + labels + meta)");
  std::string gen_config, gen_mix, gen_out = "env";
  std::vector<std::string> gen_sets;
  int gen_fleet_size = 0;
  long long gen_seed = -1;
  bool gen_force = false;
  gen->add_option("--config", gen_config, "JSON config file");
  gen->add_option("--set", gen_sets,
                  "config override, key.path=value (repeatable)");
  gen->add_option("--mix", gen_mix, "'uniform' or 'M0=0.5,M3=0.5'");
  gen->add_option("--fleet-size", gen_fleet_size, "number of vehicles");
  gen->add_option("--seed", gen_seed, "generation seed");
  gen->add_option("-o,--out", gen_out, "output directory (default: env)");
  gen->add_flag("--force", gen_force, "overwrite an existing environment");

  // run
  auto* run = app.add_subcommand(
      "run", "Execute cleaning episodes for a plan (Algorithm-style loop)");
  std::string run_plan, run_agent = "oracle", run_model, run_out = "run";
  bool run_resume = false, run_force = false;
  int run_parallelism = 0;
  run->add_option("--plan", run_plan, "experiment plan JSON");
  run->add_option("--agent", run_agent, "llm | oracle | baseline");
  run->add_option("--model", run_model, "restrict llm runs to one model");
  run->add_option("-o,--out", run_out, "run directory (default: run)");
  run->add_flag("--resume", run_resume, "continue a previous run");
  run->add_flag("--force", run_force, "discard a previous run directory");
  run->add_option("--parallelism", run_parallelism,
                  "episodes processed concurrently");

  // report
  auto* report = app.add_subcommand("report", "Render a run's report tables");
  std::string report_dir, report_format = "txt";
  report->add_option("run_dir", report_dir, "run directory")->required();
  report->add_option("--format", report_format, "txt | csv")
      ->check(CLI::IsMember({"txt", "csv"}));

  // catalog validate
  auto* catalog = app.add_subcommand("catalog", "Catalog utilities");
  auto* validate =
      catalog->add_subcommand("validate", "Validate a service catalog CSV");
  std::string catalog_file;
  validate->add_option("file", catalog_file, "catalog CSV file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (gen->parsed()) {
      return cmd_gen(gen_config, gen_sets, gen_mix, gen_fleet_size, gen_seed,
                     gen_out, gen_force);
    }
    if (run->parsed()) {
      return cmd_run(run_plan, run_agent, run_model, run_out, run_resume,
                     run_force, run_parallelism);
    }
    if (report->parsed()) {
      return cmd_report(report_dir, report_format);
    }
    if (catalog->parsed() && validate->parsed()) {
      return cmd_catalog_validate(catalog_file);
    }
    std::fprintf(stderr, "no subcommand selected\n");
    return kExitUsage;
  } catch (const UsageError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitUsage;
  } catch (const CatalogError& e) {
    std::fprintf(stderr, "catalog error: %s\n", e.what());
    return kExitUsage;
  } catch (const NoiseError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitUsage;
  } catch (const GenerationError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "harness error: %s\n", e.what());
    return kExitHarness;
  }
}
