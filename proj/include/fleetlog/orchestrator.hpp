#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "fleetlog/agent.hpp"
#include "fleetlog/config.hpp"
#include "fleetlog/environment.hpp"
#include "fleetlog/evaluation.hpp"

namespace fleetlog {

struct OrchestratorError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ExperimentPlan {
  GenerationConfig generation;  // seed field is ignored; seeds derive from
                                // master_seed
  NoiseMix mix;
  int replications = 1;  // R evaluation environments (R+1 generated)
  ThetaSpace theta_space;
  RetryPolicy retry;
  std::vector<ModelSpec> models;
  std::uint64_t master_seed = 1;
  int parallelism = 1;

  void validate(const NoiseTaxonomy& taxonomy) const;
  static ExperimentPlan from_json(const Json& j);
  Json to_json() const;
};

struct ManifestEnvironment {
  std::string name;      // env_001 ...
  std::uint64_t seed = 0;
  DecodingParams theta;
  bool reserved = false;  // generated for the prompt-template step, never
                          // evaluated
};

enum class PairStatus { kPending, kDone, kFailed };

struct ManifestPair {
  std::string agent_label;
  std::string env_name;
  PairStatus status = PairStatus::kPending;
  std::string episodes_file;  // relative to the run directory
  std::string finished_at;     // ISO timestamp, empty until done
};

struct RunManifest {
  std::vector<ManifestEnvironment> environments;
  std::vector<ManifestPair> pairs;

  Json to_json() const;
  static RunManifest from_json(const Json& j);
};

/// Generates R+1 environments under run_dir (the last one reserved), samples
/// theta per environment, and lays out one pending pair per
/// (agent label, evaluation environment).
RunManifest plan_experiment(const ExperimentPlan& plan,
                            const std::vector<std::string>& agent_labels,
                            const NoiseTaxonomy& taxonomy,
                            const std::filesystem::path& run_dir);

/// Builds a fresh agent for one (label, environment) pair.
using AgentFactory = std::function<std::unique_ptr<Agent>(
    const std::string& label, const LoadedEnvironment& env,
    const std::filesystem::path& env_dir)>;

struct ExecuteOptions {
  int parallelism = 1;
  bool measure_time = false;  // only LLM-backed runs record wall time
  /// Called after each finished pair; returning false stops the run (it can
  /// be resumed later from the manifest).
  std::function<bool(const ManifestPair&)> progress;
};

/// Runs every pending pair (done pairs are never re-run), persists
/// episodes.jsonl per pair, updates the manifest on disk, and writes
/// aggregated reports per agent label under run_dir/reports/.
void execute(RunManifest& manifest, const ExperimentPlan& plan,
             const NoiseTaxonomy& taxonomy, const AgentFactory& factory,
             const std::filesystem::path& run_dir,
             const ExecuteOptions& options);

Json episode_to_json(const MaintenanceRecord& record,
                     const EpisodeResult& result, const std::string& label);

/// Scores one persisted episode file against its environment's labels.
EvaluationReport evaluate_episode_file(const std::filesystem::path& episodes,
                                       const LoadedEnvironment& env,
                                       const NoiseTaxonomy& taxonomy,
                                       double price_in_per_mtok,
                                       double price_out_per_mtok);

/// Re-aggregates and writes reports/ for every agent label with at least one
/// finished pair; returns the labels written. Safe on partial runs.
std::vector<std::string> write_reports(const RunManifest& manifest,
                                       const ExperimentPlan& plan,
                                       const NoiseTaxonomy& taxonomy,
                                       const std::filesystem::path& run_dir);

void save_manifest(const RunManifest& manifest,
                   const std::filesystem::path& run_dir);
RunManifest load_manifest(const std::filesystem::path& run_dir);

}  // namespace fleetlog
