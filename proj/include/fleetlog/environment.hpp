#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include "fleetlog/catalog.hpp"
#include "fleetlog/datagen.hpp"
#include "fleetlog/noise.hpp"
#include "fleetlog/params.hpp"

namespace fleetlog {

/// One generated world: clean sources, the noisy maintenance log with labels,
/// and the decoding parameters paired with it.
struct Environment {
  GenerationConfig config;
  NoiseMix mix;
  DecodingParams theta;
  std::vector<DeviceRecord> registry;
  Catalog catalog;
  std::vector<MaintenanceRecord> clean_log;
  std::vector<SensorReading> sensor;
  std::vector<MaintenanceRecord> noisy_log;
  std::vector<NoiseLabel> labels;
};

Environment generate_environment(const GenerationConfig& config,
                                 const NoiseMix& mix,
                                 const NoiseTaxonomy& taxonomy,
                                 const Catalog& catalog, DecodingParams theta,
                                 const DescriptionWriter* llm_writer = nullptr);

/// File names inside an environment directory.
namespace envfile {
inline constexpr const char* kRegistry = "fleet_registry.csv";
inline constexpr const char* kCatalog = "service_catalog.csv";
inline constexpr const char* kOdometer = "signal_odometer.csv";
inline constexpr const char* kCleanLog = "maintenance_log_clean.csv";
inline constexpr const char* kNoisyLog = "maintenance_log_noisy.csv";
inline constexpr const char* kLabels = "labels.jsonl";
inline constexpr const char* kMeta = "meta.json";
}  // namespace envfile

void write_environment(const Environment& env,
                       const std::filesystem::path& dir);

/// What a run needs back from disk (the reference tables are served by the
/// datastore; the label file never reaches agents).
struct LoadedEnvironment {
  GenerationConfig config;
  NoiseMix mix;
  DecodingParams theta;
  std::vector<MaintenanceRecord> clean_log;
  std::vector<MaintenanceRecord> noisy_log;
  std::vector<NoiseLabel> labels;
};

LoadedEnvironment load_environment(const std::filesystem::path& dir);

std::vector<MaintenanceRecord> maintenance_log_from_csv(
    const csv::Table& table);

}  // namespace fleetlog
