#include <algorithm>
#include <map>

#include "fleetlog/agent.hpp"
#include "fleetlog/text.hpp"

namespace fleetlog {

namespace {

using Json = nlohmann::ordered_json;

AgentReply single_call_reply(const std::string& name, Json arguments) {
  AgentReply reply;
  reply.calls.push_back({name, std::move(arguments), "call-0"});
  return reply;
}

AgentReply action_reply(const Action& action) {
  Json payload = action_to_payload(action);
  return single_call_reply(payload.at("name").get<std::string>(),
                           payload.at("arguments"));
}

std::string sql_quote(const std::string& value) {
  std::string out = "'";
  for (char c : value) {
    if (c == '\'') out += '\'';
    out += c;
  }
  out += '\'';
  return out;
}

class OracleAgent : public Agent {
 public:
  OracleAgent(const std::vector<NoiseLabel>& labels,
              const NoiseTaxonomy& taxonomy) {
    for (const auto& label : labels) {
      actions_.emplace(label.wo_num, ground_truth_action(label, taxonomy));
    }
  }

  std::string name() const override { return "oracle"; }

  AgentReply respond(const std::vector<ChatMessage>&, const Json&,
                     const DecodingParams&, const EpisodeContext& ctx) override {
    if (!ctx.record) throw std::runtime_error("oracle agent needs a record");
    auto it = actions_.find(ctx.record->wo_num);
    if (it == actions_.end()) {
      throw std::runtime_error(
          "oracle agent has no label for record " + ctx.record->wo_num +
          "; the oracle is only valid on generated environments");
    }
    return action_reply(it->second);
  }

 private:
  std::map<std::string, Action> actions_;
};

// ---------------------------------------------------------------------------

struct SqlResultView {
  std::vector<std::vector<Json>> rows;

  static SqlResultView parse(const ChatMessage& msg) {
    SqlResultView view;
    Json body = Json::parse(msg.content, nullptr, false);
    if (body.is_discarded() || !body.contains("rows")) return view;
    for (const auto& row : body.at("rows")) {
      view.rows.emplace_back(row.begin(), row.end());
    }
    return view;
  }

  std::string text(std::size_t row, std::size_t col) const {
    const Json& v = rows[row][col];
    return v.is_string() ? v.get<std::string>() : v.dump();
  }
  long long integer(std::size_t row, std::size_t col) const {
    const Json& v = rows[row][col];
    return v.is_number_integer() ? v.get<long long>() : 0;
  }
};

/// Decision procedure, in order: digital-test markers, entity linkage via the
/// registry, missing-value imputation, vocabulary repair by edit distance,
/// and a timeline check against the odometer signal. Commits exactly one
/// action per pass and reaches the datastore only through tool calls.
class RuleBaselineAgent : public Agent {
 public:
  explicit RuleBaselineAgent(std::string plate_pattern)
      : plate_pattern_(std::move(plate_pattern)) {}

  std::string name() const override { return "rule-baseline"; }

  AgentReply respond(const std::vector<ChatMessage>& conversation, const Json&,
                     const DecodingParams&, const EpisodeContext& ctx) override {
    if (!ctx.record) {
      throw std::runtime_error("rule baseline needs a record");
    }
    const MaintenanceRecord& rec = *ctx.record;

    std::vector<SqlResultView> results;
    for (const auto& msg : conversation) {
      if (msg.role == "tool") results.push_back(SqlResultView::parse(msg));
    }

    if (rec.license_plate == "TEST" || rec.activity == "Test") {
      return action_reply(Action::reject(rec.wo_num));
    }

    if (results.empty()) {
      return run_sql(
          "SELECT device_id, name, license_plate, VIN FROM fleet_registry "
          "WHERE license_plate = " +
          sql_quote(rec.license_plate));
    }

    const SqlResultView& plate_lookup = results[0];
    if (plate_lookup.rows.empty()) {
      if (results.size() == 1) {
        return run_sql(
            "SELECT license_plate FROM fleet_registry WHERE device_id = " +
            sql_quote(rec.license_plate) +
            " OR name = " + sql_quote(rec.license_plate) +
            " OR VIN = " + sql_quote(rec.license_plate));
      }
      const SqlResultView& id_lookup = results[1];
      if (!id_lookup.rows.empty()) {
        return action_reply(Action::update(rec.wo_num, "license_plate",
                                           id_lookup.text(0, 0)));
      }
      // A well-formed plate that is not ours, or an identifier we do not
      // know: either way the record is out of scope for this fleet.
      return action_reply(Action::reject(rec.wo_num));
    }

    if (results.size() == 1) {
      return run_sql(
          "SELECT System, Subsystem, Component, Activity FROM "
          "service_catalog");
    }
    const SqlResultView& catalog_rows = results[1];
    std::vector<ServiceOperation> ops;
    ops.reserve(catalog_rows.rows.size());
    for (std::size_t r = 0; r < catalog_rows.rows.size(); ++r) {
      ops.push_back({catalog_rows.text(r, 0), catalog_rows.text(r, 1),
                     catalog_rows.text(r, 2), catalog_rows.text(r, 3)});
    }

    if (auto action = repair_missing_value(rec, ops)) {
      return action_reply(*action);
    }
    if (auto action = repair_invalid_value(rec, ops)) {
      return action_reply(*action);
    }

    if (results.size() == 2) {
      std::string device_id = plate_lookup.text(0, 0);
      return run_sql(
          "SELECT date, km_traveled FROM signal_odometer WHERE device_id = " +
          sql_quote(device_id) + " AND date >= " +
          sql_quote(rec.start_date.to_string()) + " AND date <= " +
          sql_quote(rec.end_date.plus_days(7).to_string()) +
          " ORDER BY date");
    }
    if (auto action = repair_end_date(rec, results[2])) {
      return action_reply(*action);
    }
    return action_reply(Action::accept(rec.wo_num));
  }

 private:
  AgentReply run_sql(const std::string& query) {
    return single_call_reply("run_sql", Json{{"query", query}, {"limit", 200}});
  }

  static const std::string& field_value(const MaintenanceRecord& rec,
                                        const std::string& field) {
    if (field == "system") return rec.system;
    if (field == "subsystem") return rec.subsystem;
    if (field == "component") return rec.component;
    return rec.activity;
  }

  static std::vector<std::string> consistent_values(
      const MaintenanceRecord& rec, const std::vector<ServiceOperation>& ops,
      const std::string& field) {
    std::vector<std::string> out;
    for (const auto& op : ops) {
      ServiceOperation probe = rec.operation();
      const std::string* candidate = nullptr;
      if (field == "system") {
        probe.system = op.system;
        candidate = &op.system;
      } else if (field == "subsystem") {
        probe.subsystem = op.subsystem;
        candidate = &op.subsystem;
      } else if (field == "component") {
        probe.component = op.component;
        candidate = &op.component;
      } else {
        probe.activity = op.activity;
        candidate = &op.activity;
      }
      if (probe == op &&
          std::find(out.begin(), out.end(), *candidate) == out.end()) {
        out.push_back(*candidate);
      }
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  /// Imputes an emptied categorical field: the unique catalog value
  /// consistent with the other three fields, with the work description
  /// breaking ties.
  std::optional<Action> repair_missing_value(
      const MaintenanceRecord& rec, const std::vector<ServiceOperation>& ops) {
    for (const char* field : {"system", "subsystem", "component", "activity"}) {
      if (!field_value(rec, field).empty()) continue;
      auto candidates = consistent_values(rec, ops, field);
      if (candidates.empty()) continue;
      if (candidates.size() > 1) {
        std::vector<std::string> mentioned;
        for (const auto& c : candidates) {
          if (text::contains_ci(rec.work_description, c)) mentioned.push_back(c);
        }
        if (!mentioned.empty()) candidates = std::move(mentioned);
      }
      return Action::update(rec.wo_num, field, candidates.front());
    }
    return std::nullopt;
  }

  static std::vector<std::string> tier_values(
      const std::vector<ServiceOperation>& ops, const std::string& field) {
    std::vector<std::string> values;
    for (const auto& op : ops) {
      const std::string& v = field == "system"
                                 ? op.system
                                 : field == "subsystem"
                                       ? op.subsystem
                                       : field == "component" ? op.component
                                                              : op.activity;
      if (std::find(values.begin(), values.end(), v) == values.end()) {
        values.push_back(v);
      }
    }
    std::sort(values.begin(), values.end());
    return values;
  }

  /// Replaces a token outside its tier's vocabulary by the minimum-edit-
  /// distance catalog value consistent with the rest of the row.
  std::optional<Action> repair_invalid_value(
      const MaintenanceRecord& rec, const std::vector<ServiceOperation>& ops) {
    for (const char* field : {"system", "subsystem", "component", "activity"}) {
      const std::string& value = field_value(rec, field);
      auto tier = tier_values(ops, field);
      if (std::binary_search(tier.begin(), tier.end(), value)) continue;

      auto candidates = consistent_values(rec, ops, field);
      if (candidates.empty()) candidates = std::move(tier);
      std::string best = candidates.front();
      std::size_t best_distance = text::edit_distance(value, best);
      for (const auto& c : candidates) {
        std::size_t d = text::edit_distance(value, c);
        if (d < best_distance) {
          best = c;
          best_distance = d;
        }
      }
      return Action::update(rec.wo_num, field, best);
    }
    return std::nullopt;
  }

  /// Flags an end date contradicted by the odometer: travel on a day strictly
  /// inside the claimed interval means the repair actually ended earlier. The
  /// corrected end is the day after the last zero-travel day (boundary days
  /// record half distances).
  std::optional<Action> repair_end_date(const MaintenanceRecord& rec,
                                        const SqlResultView& odometer) {
    static constexpr long long kTravelThresholdKm = 50;
    std::map<std::string, long long> km_by_date;
    for (std::size_t r = 0; r < odometer.rows.size(); ++r) {
      km_by_date[odometer.text(r, 0)] = odometer.integer(r, 1);
    }
    const std::string start = rec.start_date.to_string();
    const std::string end = rec.end_date.to_string();
    bool interior_travel = false;
    for (const auto& [date, km] : km_by_date) {
      if (date > start && date < end && km > kTravelThresholdKm) {
        interior_travel = true;
        break;
      }
    }
    if (!interior_travel) return std::nullopt;

    Date last_zero = rec.start_date;
    for (Date d = rec.start_date.plus_days(1); d < rec.end_date;
         d = d.plus_days(1)) {
      auto it = km_by_date.find(d.to_string());
      if (it == km_by_date.end() || it->second != 0) break;
      last_zero = d;
    }
    if (last_zero == rec.start_date) return std::nullopt;
    Date corrected = last_zero.plus_days(1);
    if (corrected >= rec.end_date) return std::nullopt;
    return Action::update(rec.wo_num, "end_date", corrected.to_string());
  }

  std::string plate_pattern_;
};

}  // namespace

std::unique_ptr<Agent> make_oracle_agent(const std::vector<NoiseLabel>& labels,
                                         const NoiseTaxonomy& taxonomy) {
  return std::make_unique<OracleAgent>(labels, taxonomy);
}

std::unique_ptr<Agent> make_rule_baseline_agent(std::string plate_pattern) {
  return std::make_unique<RuleBaselineAgent>(std::move(plate_pattern));
}

}  // namespace fleetlog
