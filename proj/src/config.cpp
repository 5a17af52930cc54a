#include "fleetlog/config.hpp"

#include <fstream>

namespace fleetlog {

namespace {

template <typename T>
T get_or(const Json& j, const std::string& key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("bad value for '" + key + "': " + e.what());
  }
}

}  // namespace

Json generation_config_to_json(const GenerationConfig& c) {
  return Json{
      {"fleet_size", c.fleet_size},
      {"monitoring_window",
       {{"start", c.monitoring_window.start.to_string()},
        {"end", c.monitoring_window.end.to_string()}}},
      {"plate_pattern", c.plate_pattern},
      {"seed", c.seed},
      {"daily_km_mean", c.daily_km_mean},
      {"daily_km_std", c.daily_km_std},
      {"odometer_init_range", {c.odometer_init_min_km, c.odometer_init_max_km}},
      {"repair_duration_range",
       {c.repair_duration_min_days, c.repair_duration_max_days}},
      {"description_mode",
       c.description_mode == DescriptionMode::kLlm ? "llm" : "template"},
  };
}

GenerationConfig generation_config_from_json(const Json& j) {
  GenerationConfig c;
  c.fleet_size = get_or(j, "fleet_size", c.fleet_size);
  if (j.contains("monitoring_window")) {
    const auto& w = j.at("monitoring_window");
    c.monitoring_window.start = Date::parse(w.at("start").get<std::string>());
    c.monitoring_window.end = Date::parse(w.at("end").get<std::string>());
  }
  c.plate_pattern = get_or(j, "plate_pattern", c.plate_pattern);
  c.seed = get_or(j, "seed", c.seed);
  c.daily_km_mean = get_or(j, "daily_km_mean", c.daily_km_mean);
  c.daily_km_std = get_or(j, "daily_km_std", c.daily_km_std);
  if (j.contains("odometer_init_range")) {
    const auto& r = j.at("odometer_init_range");
    c.odometer_init_min_km = r.at(0).get<long long>();
    c.odometer_init_max_km = r.at(1).get<long long>();
  }
  if (j.contains("repair_duration_range")) {
    const auto& r = j.at("repair_duration_range");
    c.repair_duration_min_days = r.at(0).get<int>();
    c.repair_duration_max_days = r.at(1).get<int>();
  }
  std::string mode = get_or<std::string>(j, "description_mode", "template");
  if (mode == "template") {
    c.description_mode = DescriptionMode::kTemplate;
  } else if (mode == "llm") {
    c.description_mode = DescriptionMode::kLlm;
  } else {
    throw ConfigError("description_mode must be 'template' or 'llm', got '" +
                      mode + "'");
  }
  return c;
}

Json noise_mix_to_json(const NoiseMix& mix) {
  Json j = Json::object();
  for (const auto& [id, p] : mix.proportions) j[id] = p;
  return j;
}

NoiseMix noise_mix_from_json(const Json& j) {
  NoiseMix mix;
  for (const auto& [key, value] : j.items()) {
    mix.proportions[key] = value.get<double>();
  }
  return mix;
}

Json decoding_params_to_json(const DecodingParams& p) {
  return Json{{"temperature", p.temperature}, {"top_p", p.top_p}};
}

DecodingParams decoding_params_from_json(const Json& j) {
  DecodingParams p;
  p.temperature = get_or(j, "temperature", p.temperature);
  p.top_p = get_or(j, "top_p", p.top_p);
  return p;
}

Json theta_space_to_json(const ThetaSpace& s) {
  return Json{{"temperature", {s.temperature_min, s.temperature_max}},
              {"top_p", {s.top_p_min, s.top_p_max}}};
}

ThetaSpace theta_space_from_json(const Json& j) {
  ThetaSpace s;
  if (j.contains("temperature")) {
    s.temperature_min = j.at("temperature").at(0).get<double>();
    s.temperature_max = j.at("temperature").at(1).get<double>();
  }
  if (j.contains("top_p")) {
    s.top_p_min = j.at("top_p").at(0).get<double>();
    s.top_p_max = j.at("top_p").at(1).get<double>();
  }
  return s;
}

Json retry_policy_to_json(const RetryPolicy& p) {
  return Json{{"output", p.output_retries},
              {"tool", p.tool_retries},
              {"record", p.record_retries},
              {"tool_call_depth", p.tool_call_depth}};
}

RetryPolicy retry_policy_from_json(const Json& j) {
  RetryPolicy p;
  p.output_retries = get_or(j, "output", p.output_retries);
  p.tool_retries = get_or(j, "tool", p.tool_retries);
  p.record_retries = get_or(j, "record", p.record_retries);
  p.tool_call_depth = get_or(j, "tool_call_depth", p.tool_call_depth);
  if (p.output_retries < 0 || p.tool_retries < 0 || p.record_retries < 0) {
    throw ConfigError("retry budgets must be >= 0");
  }
  return p;
}

Json model_spec_to_json(const ModelSpec& m) {
  return Json{{"name", m.model_name},
              {"endpoint", m.endpoint},
              {"price_in", m.price_in_per_mtok},
              {"price_out", m.price_out_per_mtok},
              {"context_window", m.context_window}};
}

ModelSpec model_spec_from_json(const Json& j) {
  ModelSpec m;
  m.model_name = j.at("name").get<std::string>();
  m.endpoint = get_or<std::string>(j, "endpoint", "");
  m.price_in_per_mtok = get_or(j, "price_in", 0.0);
  m.price_out_per_mtok = get_or(j, "price_out", 0.0);
  m.context_window = get_or<long long>(j, "context_window", 0);
  if (m.price_in_per_mtok < 0 || m.price_out_per_mtok < 0) {
    throw ConfigError("model prices must be >= 0");
  }
  return m;
}

void apply_override(Json& doc, const std::string& assignment) {
  auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError("override must look like key.path=value: '" +
                      assignment + "'");
  }
  std::string path = assignment.substr(0, eq);
  std::string raw = assignment.substr(eq + 1);

  Json value;
  try {
    value = Json::parse(raw);
  } catch (const nlohmann::json::exception&) {
    value = raw;  // plain string
  }

  Json* node = &doc;
  std::size_t begin = 0;
  while (true) {
    std::size_t dot = path.find('.', begin);
    std::string key = path.substr(begin, dot - begin);
    if (key.empty()) throw ConfigError("empty key in override: " + assignment);
    if (dot == std::string::npos) {
      (*node)[key] = value;
      break;
    }
    node = &(*node)[key];
    begin = dot + 1;
  }
}

Json load_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("invalid JSON in " + path.string() + ": " + e.what());
  }
}

void write_json_file(const std::filesystem::path& path, const Json& doc) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << doc.dump(2) << "\n";
}

}  // namespace fleetlog
