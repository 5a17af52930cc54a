#include "fleetlog/environment.hpp"

#include <fstream>

#include "fleetlog/config.hpp"

namespace fleetlog {

namespace {

const std::vector<std::string> kLogColumns = {
    "wo_num",    "start_date", "end_date", "license_plate",
    "system",    "subsystem",  "component", "activity",
    "work_description", "work_order_type"};

std::vector<std::string> log_row(const MaintenanceRecord& r) {
  return {r.wo_num,    r.start_date.to_string(), r.end_date.to_string(),
          r.license_plate, r.system,             r.subsystem,
          r.component, r.activity,               r.work_description,
          r.work_order_type};
}

Json label_to_json(const NoiseLabel& label) {
  Json j{{"wo_num", label.wo_num}, {"noise_type", label.noise_type}};
  if (label.corrupted_field) j["corrupted_field"] = *label.corrupted_field;
  if (label.clean_value) j["clean_value"] = *label.clean_value;
  if (label.noisy_value) j["noisy_value"] = *label.noisy_value;
  return j;
}

NoiseLabel label_from_json(const Json& j) {
  NoiseLabel label;
  label.wo_num = j.at("wo_num").get<std::string>();
  label.noise_type = j.at("noise_type").get<std::string>();
  if (j.contains("corrupted_field")) {
    label.corrupted_field = j.at("corrupted_field").get<std::string>();
  }
  if (j.contains("clean_value")) {
    label.clean_value = j.at("clean_value").get<std::string>();
  }
  if (j.contains("noisy_value")) {
    label.noisy_value = j.at("noisy_value").get<std::string>();
  }
  return label;
}

}  // namespace

Environment generate_environment(const GenerationConfig& config,
                                 const NoiseMix& mix,
                                 const NoiseTaxonomy& taxonomy,
                                 const Catalog& catalog, DecodingParams theta,
                                 const DescriptionWriter* llm_writer) {
  config.validate();
  mix.validate(taxonomy);

  Environment env;
  env.config = config;
  env.mix = mix;
  env.theta = theta;
  env.catalog = catalog;
  env.registry = generate_registry(config, config.fleet_size);
  env.clean_log = generate_maintenance_log(config, env.registry, catalog,
                                           config.fleet_size, llm_writer);
  env.sensor = generate_sensor_series(config, env.registry, env.clean_log);

  NoiseContext ctx{&env.config, &env.registry, &env.catalog};
  auto noise_rng = RngStream::derive(config.seed, "noise");
  auto injected = inject(env.clean_log, mix, taxonomy, ctx, config.fleet_size,
                         noise_rng);
  env.noisy_log = std::move(injected.noisy_log);
  env.labels = std::move(injected.labels);
  return env;
}

void write_environment(const Environment& env,
                       const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);

  csv::Table registry;
  registry.header = {"device_id", "name", "license_plate", "VIN"};
  for (const auto& d : env.registry) {
    registry.rows.push_back({d.device_id, d.name, d.license_plate, d.vin});
  }
  csv::write_file(dir / envfile::kRegistry, registry);

  csv::Table catalog;
  catalog.header = {"System", "Subsystem", "Component", "Activity"};
  for (const auto& op : env.catalog.rows()) {
    catalog.rows.push_back({op.system, op.subsystem, op.component, op.activity});
  }
  csv::write_file(dir / envfile::kCatalog, catalog);

  csv::Table sensor;
  sensor.header = {"device_id", "date", "odometer", "km_traveled"};
  for (const auto& s : env.sensor) {
    sensor.rows.push_back({s.device_id, s.date.to_string(),
                           std::to_string(s.odometer_km),
                           std::to_string(s.km_traveled)});
  }
  csv::write_file(dir / envfile::kOdometer, sensor);

  csv::Table clean;
  clean.header = kLogColumns;
  for (const auto& r : env.clean_log) clean.rows.push_back(log_row(r));
  csv::write_file(dir / envfile::kCleanLog, clean);

  // Ground-truth variant of the noisy log: trailing label column. The
  // datastore never loads this file and record serialization drops the label.
  csv::Table noisy;
  noisy.header = kLogColumns;
  noisy.header.push_back("label");
  for (std::size_t i = 0; i < env.noisy_log.size(); ++i) {
    auto row = log_row(env.noisy_log[i]);
    row.push_back(env.labels[i].noise_type);
    noisy.rows.push_back(std::move(row));
  }
  csv::write_file(dir / envfile::kNoisyLog, noisy);

  std::ofstream labels(dir / envfile::kLabels, std::ios::binary);
  for (const auto& label : env.labels) {
    labels << label_to_json(label).dump() << "\n";
  }

  Json meta{{"seed", env.config.seed},
            {"theta", decoding_params_to_json(env.theta)},
            {"mix", noise_mix_to_json(env.mix)},
            {"config", generation_config_to_json(env.config)}};
  write_json_file(dir / envfile::kMeta, meta);
}

std::vector<MaintenanceRecord> maintenance_log_from_csv(
    const csv::Table& table) {
  for (const auto& col : kLogColumns) {
    if (table.column_index(col) < 0) {
      throw std::runtime_error("maintenance log is missing column '" + col +
                               "'");
    }
  }
  std::vector<MaintenanceRecord> log;
  log.reserve(table.rows.size());
  for (const auto& row : table.rows) {
    MaintenanceRecord r;
    r.wo_num = row[table.column_index("wo_num")];
    r.start_date = Date::parse(row[table.column_index("start_date")]);
    r.end_date = Date::parse(row[table.column_index("end_date")]);
    r.license_plate = row[table.column_index("license_plate")];
    r.system = row[table.column_index("system")];
    r.subsystem = row[table.column_index("subsystem")];
    r.component = row[table.column_index("component")];
    r.activity = row[table.column_index("activity")];
    r.work_description = row[table.column_index("work_description")];
    r.work_order_type = row[table.column_index("work_order_type")];
    log.push_back(std::move(r));
  }
  return log;
}

LoadedEnvironment load_environment(const std::filesystem::path& dir) {
  LoadedEnvironment env;
  Json meta = load_json_file(dir / envfile::kMeta);
  env.config = generation_config_from_json(meta.at("config"));
  env.theta = decoding_params_from_json(meta.at("theta"));
  env.mix = noise_mix_from_json(meta.at("mix"));
  env.clean_log =
      maintenance_log_from_csv(csv::read_file(dir / envfile::kCleanLog));
  env.noisy_log =
      maintenance_log_from_csv(csv::read_file(dir / envfile::kNoisyLog));

  std::ifstream labels_in(dir / envfile::kLabels);
  if (!labels_in) {
    throw std::runtime_error("cannot open " +
                             (dir / envfile::kLabels).string());
  }
  std::string line;
  while (std::getline(labels_in, line)) {
    if (line.empty()) continue;
    env.labels.push_back(label_from_json(Json::parse(line)));
  }
  if (env.labels.size() != env.noisy_log.size()) {
    throw std::runtime_error("label count does not match noisy log size");
  }
  return env;
}

}  // namespace fleetlog
