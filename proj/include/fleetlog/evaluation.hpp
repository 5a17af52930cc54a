#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fleetlog/actions.hpp"
#include "fleetlog/noise.hpp"

namespace fleetlog {

struct ScoringError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct EpisodeScore {
  std::string wo_num;
  std::string noise_type;
  std::string action_taken;  // accept | reject | update | failed
  bool action_correct = false;
  /// Variant and (for updates) field both match ground truth.
  bool strict_action_correct = false;
  std::optional<bool> fix_correct;  // corruptive labels only
};

/// Scores one episode. `clean` must be present exactly for noise-free and
/// corruptive labels. Failed episodes score false everywhere.
EpisodeScore score_episode(const NoiseLabel& label,
                           const std::optional<MaintenanceRecord>& clean,
                           const EpisodeOutcome& outcome,
                           const std::optional<Action>& action,
                           const NoiseTaxonomy& taxonomy);

struct NoiseTypeReport {
  std::string noise_type;
  std::string report_label;
  int n = 0;
  int failed = 0;
  double edr = 0.0;
  double strict_edr = 0.0;
  std::optional<double> ecr;  // corruptive types only
};

struct UsageSample {
  long long request_tokens = 0;
  long long response_tokens = 0;
  double wall_time_seconds = 0.0;
  bool estimated = false;
};

struct UsageReport {
  long long request_tokens = 0;
  long long response_tokens = 0;
  double wall_time_seconds = 0.0;
  double cost_usd = 0.0;
  bool estimated = false;
};

double usage_cost_usd(long long request_tokens, long long response_tokens,
                      double price_in_per_mtok, double price_out_per_mtok);

struct EvaluationReport {
  std::vector<NoiseTypeReport> per_type;
  UsageReport usage;
};

/// Per-type EDR/ECR plus summed usage for one (model, environment) run.
EvaluationReport aggregate(const std::vector<EpisodeScore>& scores,
                           const std::vector<UsageSample>& usage,
                           double price_in_per_mtok, double price_out_per_mtok,
                           const NoiseTaxonomy& taxonomy);

struct CellStat {
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation (n-1)
};

struct AggregatedTypeRow {
  std::string noise_type;
  std::string report_label;
  CellStat edr;
  CellStat strict_edr;
  std::optional<CellStat> ecr;
  int n = 0;       // episodes across environments
  int failed = 0;  // failed episodes across environments
};

struct AggregatedReport {
  int environments = 0;
  std::vector<AggregatedTypeRow> per_type;
  CellStat request_tokens;
  CellStat response_tokens;
  CellStat wall_time_seconds;
  CellStat cost_usd;
  bool usage_estimated = false;
};

CellStat mean_and_sample_std(const std::vector<double>& values);

/// Mean +- sample std per metric cell across environments.
AggregatedReport aggregate_runs(const std::vector<EvaluationReport>& reports,
                                const NoiseTaxonomy& taxonomy);

/// Rendering: aligned text mirroring the per-noise report layout (row order
/// noise free, vehicle id mis., out-of-fleet veh., invalid value, missing
/// value, digital system test, wrong end date), percentages with one decimal.
std::string render_report_text(const AggregatedReport& report);
std::string render_report_csv(const AggregatedReport& report);
std::string render_usage_csv(const AggregatedReport& report,
                             const std::string& model_name);

}  // namespace fleetlog
