#include "fleetlog/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include "fleetlog/text.hpp"

namespace fleetlog {

namespace {

bool values_match(const std::string& field, const std::string& proposed,
                  const std::string& expected) {
  if (field == "start_date" || field == "end_date") {
    try {
      return Date::parse(text::trim(proposed)) ==
             Date::parse(text::trim(expected));
    } catch (const std::invalid_argument&) {
      return false;
    }
  }
  return text::normalize(proposed) == text::normalize(expected);
}

std::string format_percent_pm(const CellStat& cell) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.1f%% ± %.1f", cell.mean * 100.0,
                cell.stddev * 100.0);
  return buf;
}

std::string format_count_pm(const CellStat& cell) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.0f ± %.0f", cell.mean, cell.stddev);
  return buf;
}

std::string format_real_pm(const CellStat& cell, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f ± %.*f", decimals, cell.mean, decimals,
                cell.stddev);
  return buf;
}

}  // namespace

EpisodeScore score_episode(const NoiseLabel& label,
                           const std::optional<MaintenanceRecord>& clean,
                           const EpisodeOutcome& outcome,
                           const std::optional<Action>& action,
                           const NoiseTaxonomy& taxonomy) {
  NoiseKind kind = taxonomy.type(label.noise_type).kind;
  bool needs_clean = kind != NoiseKind::kGenerative;
  if (needs_clean != clean.has_value()) {
    throw ScoringError("label " + label.wo_num + " (" + label.noise_type +
                       ") " +
                       (needs_clean ? "requires" : "must not carry") +
                       " a clean record");
  }

  EpisodeScore score;
  score.wo_num = label.wo_num;
  score.noise_type = label.noise_type;

  if (outcome.status == EpisodeStatus::kFailed || !action) {
    score.action_taken = "failed";
    if (kind == NoiseKind::kCorruptive) score.fix_correct = false;
    return score;
  }

  score.action_taken = action_variant_name(action->variant);
  Action expected = ground_truth_action(label, taxonomy);
  score.action_correct = action->variant == expected.variant;
  score.strict_action_correct =
      score.action_correct &&
      (action->variant != ActionVariant::kUpdate ||
       (action->field && expected.field && *action->field == *expected.field));

  if (kind == NoiseKind::kCorruptive) {
    bool fix = action->variant == ActionVariant::kUpdate && action->field &&
               action->value && *action->field == *expected.field &&
               values_match(*expected.field, *action->value, *expected.value);
    score.fix_correct = fix;
  }
  return score;
}

double usage_cost_usd(long long request_tokens, long long response_tokens,
                      double price_in_per_mtok, double price_out_per_mtok) {
  return static_cast<double>(request_tokens) / 1e6 * price_in_per_mtok +
         static_cast<double>(response_tokens) / 1e6 * price_out_per_mtok;
}

EvaluationReport aggregate(const std::vector<EpisodeScore>& scores,
                           const std::vector<UsageSample>& usage,
                           double price_in_per_mtok, double price_out_per_mtok,
                           const NoiseTaxonomy& taxonomy) {
  struct Tally {
    int n = 0;
    int failed = 0;
    int correct = 0;
    int strict_correct = 0;
    int fixes = 0;
    bool corruptive = false;
  };
  std::map<std::string, Tally> tallies;
  for (const auto& s : scores) {
    Tally& t = tallies[s.noise_type];
    ++t.n;
    if (s.action_taken == "failed") ++t.failed;
    if (s.action_correct) ++t.correct;
    if (s.strict_action_correct) ++t.strict_correct;
    if (s.fix_correct.has_value()) {
      t.corruptive = true;
      if (*s.fix_correct) ++t.fixes;
    }
  }

  EvaluationReport report;
  auto emit = [&](const std::string& id, const Tally& t) {
    NoiseTypeReport row;
    row.noise_type = id;
    row.report_label = taxonomy.has(id) ? taxonomy.type(id).report_label : id;
    row.n = t.n;
    row.failed = t.failed;
    row.edr = t.n ? static_cast<double>(t.correct) / t.n : 0.0;
    row.strict_edr = t.n ? static_cast<double>(t.strict_correct) / t.n : 0.0;
    if (t.corruptive) {
      row.ecr = t.n ? static_cast<double>(t.fixes) / t.n : 0.0;
    }
    report.per_type.push_back(std::move(row));
  };
  // Taxonomy order first, then any unknown types in name order.
  for (const auto& t : taxonomy.types()) {
    auto it = tallies.find(t.id);
    if (it != tallies.end()) {
      emit(it->first, it->second);
      tallies.erase(it);
    }
  }
  for (const auto& [id, tally] : tallies) emit(id, tally);

  for (const auto& u : usage) {
    report.usage.request_tokens += u.request_tokens;
    report.usage.response_tokens += u.response_tokens;
    report.usage.wall_time_seconds += u.wall_time_seconds;
    report.usage.estimated |= u.estimated;
  }
  report.usage.cost_usd =
      usage_cost_usd(report.usage.request_tokens, report.usage.response_tokens,
                     price_in_per_mtok, price_out_per_mtok);
  return report;
}

CellStat mean_and_sample_std(const std::vector<double>& values) {
  CellStat cell;
  if (values.empty()) return cell;
  double sum = 0.0;
  for (double v : values) sum += v;
  cell.mean = sum / static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - cell.mean) * (v - cell.mean);
    cell.stddev = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return cell;
}

AggregatedReport aggregate_runs(const std::vector<EvaluationReport>& reports,
                                const NoiseTaxonomy& taxonomy) {
  if (reports.empty()) {
    throw ScoringError("aggregate_runs needs at least one environment report");
  }
  AggregatedReport out;
  out.environments = static_cast<int>(reports.size());

  struct Series {
    std::vector<double> edr, strict_edr, ecr;
    int n = 0, failed = 0;
    bool has_ecr = false;
    std::string report_label;
  };
  std::map<std::string, Series> series;
  std::vector<std::string> order;
  for (const auto& report : reports) {
    for (const auto& row : report.per_type) {
      auto [it, inserted] = series.try_emplace(row.noise_type);
      if (inserted) order.push_back(row.noise_type);
      Series& s = it->second;
      s.report_label = row.report_label;
      s.edr.push_back(row.edr);
      s.strict_edr.push_back(row.strict_edr);
      if (row.ecr) {
        s.has_ecr = true;
        s.ecr.push_back(*row.ecr);
      }
      s.n += row.n;
      s.failed += row.failed;
    }
  }

  // Keep taxonomy ordering for known types.
  std::stable_sort(order.begin(), order.end(),
                   [&](const std::string& a, const std::string& b) {
                     auto rank = [&](const std::string& id) {
                       const auto& types = taxonomy.types();
                       for (std::size_t i = 0; i < types.size(); ++i) {
                         if (types[i].id == id) return i;
                       }
                       return types.size();
                     };
                     return rank(a) < rank(b);
                   });

  for (const auto& id : order) {
    const Series& s = series.at(id);
    AggregatedTypeRow row;
    row.noise_type = id;
    row.report_label = s.report_label;
    row.edr = mean_and_sample_std(s.edr);
    row.strict_edr = mean_and_sample_std(s.strict_edr);
    if (s.has_ecr) row.ecr = mean_and_sample_std(s.ecr);
    row.n = s.n;
    row.failed = s.failed;
    out.per_type.push_back(std::move(row));
  }

  std::vector<double> request, response, wall, cost;
  for (const auto& r : reports) {
    request.push_back(static_cast<double>(r.usage.request_tokens));
    response.push_back(static_cast<double>(r.usage.response_tokens));
    wall.push_back(r.usage.wall_time_seconds);
    cost.push_back(r.usage.cost_usd);
    out.usage_estimated |= r.usage.estimated;
  }
  out.request_tokens = mean_and_sample_std(request);
  out.response_tokens = mean_and_sample_std(response);
  out.wall_time_seconds = mean_and_sample_std(wall);
  out.cost_usd = mean_and_sample_std(cost);
  return out;
}

std::string render_report_text(const AggregatedReport& report) {
  std::vector<std::vector<std::string>> rows;
  rows.push_back({"Noise", "N", "Failed", "EDR", "EDR (strict)", "ECR"});
  for (const auto& row : report.per_type) {
    rows.push_back({row.report_label, std::to_string(row.n),
                    std::to_string(row.failed), format_percent_pm(row.edr),
                    format_percent_pm(row.strict_edr),
                    row.ecr ? format_percent_pm(*row.ecr) : std::string("--")});
  }
  // Column widths count code points, not bytes (the ± sign is multi-byte).
  auto display_width = [](const std::string& s) {
    std::size_t width = 0;
    for (unsigned char c : s) {
      if ((c & 0xC0) != 0x80) ++width;
    }
    return width;
  };
  std::vector<std::size_t> widths(rows.front().size(), 0);
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      widths[c] = std::max(widths[c], display_width(row[c]));
    }
  }
  std::ostringstream os;
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      os << row[c];
      if (c + 1 < row.size()) {
        os << std::string(widths[c] - display_width(row[c]) + 2, ' ');
      }
    }
    os << "\n";
  }
  os << "\n";
  os << "Environments: " << report.environments << "\n";
  os << "Request tokens:  " << format_count_pm(report.request_tokens) << "\n";
  os << "Response tokens: " << format_count_pm(report.response_tokens) << "\n";
  os << "Time (s):        " << format_real_pm(report.wall_time_seconds, 2)
     << "\n";
  os << "Cost (USD):      " << format_real_pm(report.cost_usd, 2);
  if (report.usage_estimated) os << "  (token counts partly estimated)";
  os << "\n";
  return os.str();
}

std::string render_report_csv(const AggregatedReport& report) {
  std::ostringstream os;
  os << "noise_type,label,n,failed,edr_mean,edr_std,strict_edr_mean,"
        "strict_edr_std,ecr_mean,ecr_std\n";
  auto num = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return std::string(buf);
  };
  for (const auto& row : report.per_type) {
    os << row.noise_type << "," << row.report_label << "," << row.n << ","
       << row.failed << "," << num(row.edr.mean) << "," << num(row.edr.stddev)
       << "," << num(row.strict_edr.mean) << "," << num(row.strict_edr.stddev)
       << ",";
    if (row.ecr) {
      os << num(row.ecr->mean) << "," << num(row.ecr->stddev);
    } else {
      os << "--,--";
    }
    os << "\n";
  }
  return os.str();
}

std::string render_usage_csv(const AggregatedReport& report,
                             const std::string& model_name) {
  std::ostringstream os;
  os << "model,environments,request_tokens_mean,request_tokens_std,"
        "response_tokens_mean,response_tokens_std,time_s_mean,time_s_std,"
        "cost_usd_mean,cost_usd_std,estimated\n";
  auto num = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    return std::string(buf);
  };
  os << model_name << "," << report.environments << ","
     << num(report.request_tokens.mean) << "," << num(report.request_tokens.stddev)
     << "," << num(report.response_tokens.mean) << ","
     << num(report.response_tokens.stddev) << ","
     << num(report.wall_time_seconds.mean) << ","
     << num(report.wall_time_seconds.stddev) << "," << num(report.cost_usd.mean)
     << "," << num(report.cost_usd.stddev) << ","
     << (report.usage_estimated ? "true" : "false") << "\n";
  return os.str();
}

}  // namespace fleetlog
