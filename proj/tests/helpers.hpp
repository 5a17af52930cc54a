#pragma once

#include <atomic>
#include <filesystem>
#include <string>

#include "fleetlog/environment.hpp"

namespace fleetlog::test {

/// Unique scratch directory, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("fleetlog_" + tag + "_" + std::to_string(::getpid()) + "_" +
             std::to_string(counter.fetch_add(1)));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline GenerationConfig small_config(std::uint64_t seed, int fleet_size = 14) {
  GenerationConfig config;
  config.fleet_size = fleet_size;
  config.seed = seed;
  return config;
}

inline Environment small_environment(std::uint64_t seed, int fleet_size = 14) {
  const NoiseTaxonomy taxonomy = NoiseTaxonomy::standard();
  return generate_environment(small_config(seed, fleet_size),
                              NoiseMix::uniform(taxonomy), taxonomy,
                              Catalog::standard(), DecodingParams{});
}

/// A five-vehicle environment mirroring the reference tables' excerpts,
/// with one noisy record per noise type. Hand-assembled so tests can pin
/// exact expected repairs.
struct FigureWorld {
  Environment env;

  static FigureWorld make() {
    FigureWorld w;
    Environment& env = w.env;
    env.config = small_config(7, 5);
    env.mix = NoiseMix::uniform(NoiseTaxonomy::standard());
    env.theta = {0.1, 0.9};
    env.catalog = Catalog::standard();
    env.registry = {
        {"b754A", "(b754A)", "AH4657", "KT6HA8KW6LWZD5747"},
        {"b242F", "(b242F)", "CT9935", "0T1UNZHC09032KBLY"},
        {"b189E", "(b189E)", "KA4582", "RKR3PC0K6HVW3ZSWA"},
        {"b338E", "(b338E)", "PO9928", "N6NGFAHS53H7R4C44"},
        {"b500B", "(b500B)", "ZZ1111", "5YJ3E1EA7KF000316"},
    };

    auto rec = [](std::string wo, std::string start, std::string end,
                  std::string plate, std::string system, std::string subsystem,
                  std::string component, std::string activity,
                  std::string description) {
      MaintenanceRecord r;
      r.wo_num = std::move(wo);
      r.start_date = Date::parse(start);
      r.end_date = Date::parse(end);
      r.license_plate = std::move(plate);
      r.system = std::move(system);
      r.subsystem = std::move(subsystem);
      r.component = std::move(component);
      r.activity = std::move(activity);
      r.work_description = std::move(description);
      return r;
    };

    env.clean_log = {
        rec("WO129", "2021-05-03", "2021-05-07", "AH4657", "Powertrain",
            "Engine", "Cylinder Head", "Repair", "Repaired cylinder head."),
        rec("WO827", "2021-01-02", "2021-01-06", "CT9935", "Brake System",
            "Hydraulic Brake", "Brake Pads", "Replace",
            "Replaced brake pads."),
        rec("WO329", "2021-08-31", "2021-09-04", "KA4582", "HVAC",
            "Air Conditioning", "Compressor", "Repair",
            "Repaired air conditioning compressor."),
        rec("WO679", "2022-06-16", "2022-06-21", "PO9928", "Steering",
            "Rack and Pinion", "Steering Rack", "Replace",
            "Replaced steering rack."),
        rec("WO888", "2021-11-05", "2021-11-10", "ZZ1111", "HVAC", "Cooling",
            "Coolant Pump", "Replace", "Replaced coolant pump."),
    };
    env.sensor = generate_sensor_series(env.config, env.registry, env.clean_log);

    auto noisy = env.clean_log;
    noisy[0].license_plate = "(b754A)";                    // M1
    noisy[1].system = "Brake Sysem";                       // M3 (typo)
    noisy[2].component = "";                               // M4
    noisy[3].end_date = Date::parse("2022-06-26");         // M6
    MaintenanceRecord test_row =
        rec("WO333", "2022-06-16", "2022-06-21", "TEST", "-", "-", "-", "Test",
            "Testing the IT system.");
    MaintenanceRecord out_of_fleet =
        rec("WO429", "2021-08-31", "2021-09-04", "WI0000", "HVAC", "Cooling",
            "Coolant Pump", "Replace", "Replaced worn-out coolant pump.");

    env.noisy_log = {noisy[0], noisy[1], noisy[2], noisy[3],
                     noisy[4],  // WO888 stays clean (M0)
                     test_row, out_of_fleet};
    env.labels = {
        {"WO129", "M1", "license_plate", "AH4657", "(b754A)"},
        {"WO827", "M3", "system", "Brake System", "Brake Sysem"},
        {"WO329", "M4", "component", "Compressor", ""},
        {"WO679", "M6", "end_date", "2022-06-21", "2022-06-26"},
        {"WO888", "M0", std::nullopt, std::nullopt, std::nullopt},
        {"WO333", "M5", std::nullopt, std::nullopt, std::nullopt},
        {"WO429", "M2", std::nullopt, std::nullopt, std::nullopt},
    };
    return w;
  }
};

}  // namespace fleetlog::test
