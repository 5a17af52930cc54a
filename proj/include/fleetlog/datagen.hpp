#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fleetlog/catalog.hpp"
#include "fleetlog/date.hpp"
#include "fleetlog/rng.hpp"

namespace fleetlog {

struct GenerationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class DescriptionMode { kTemplate, kLlm };

/// Everything the clean-data generators need. Plate patterns use 'A' for an
/// uppercase letter and '9' for a digit; any other character is literal.
struct GenerationConfig {
  int fleet_size = 210;
  DateInterval monitoring_window{Date(2021, 1, 1), Date(2022, 12, 31)};
  std::string plate_pattern = "AA9999";
  std::uint64_t seed = 1;
  double daily_km_mean = 200.0;
  double daily_km_std = 20.0;
  long long odometer_init_min_km = 0;
  long long odometer_init_max_km = 300000;
  int repair_duration_min_days = 4;
  int repair_duration_max_days = 7;
  DescriptionMode description_mode = DescriptionMode::kTemplate;

  void validate() const;
};

struct DeviceRecord {
  std::string device_id;
  std::string name;  // device_id wrapped in parentheses
  std::string license_plate;
  std::string vin;

  bool operator==(const DeviceRecord&) const = default;
};

struct MaintenanceRecord {
  std::string wo_num;
  Date start_date;
  Date end_date;
  std::string license_plate;
  std::string system;
  std::string subsystem;
  std::string component;
  std::string activity;
  std::string work_description;
  std::string work_order_type = "corrective";

  ServiceOperation operation() const {
    return {system, subsystem, component, activity};
  }
  bool operator==(const MaintenanceRecord&) const = default;
};

struct SensorReading {
  std::string device_id;
  Date date;
  long long odometer_km = 0;
  long long km_traveled = 0;

  bool operator==(const SensorReading&) const = default;
};

/// Hook for DescriptionMode::kLlm; receives the record with all fields except
/// work_description filled in. Must include the component and activity terms.
using DescriptionWriter = std::function<std::string(const MaintenanceRecord&)>;

/// Number of distinct plates a pattern can produce ("TEST" is excluded from
/// the valid plate space).
std::uint64_t plate_pattern_space(const std::string& pattern);
bool matches_plate_pattern(const std::string& plate, const std::string& pattern);
std::string random_plate(const std::string& pattern, RngStream& rng);

std::string activity_past_tense(const std::string& activity);
std::string template_description(const std::string& component,
                                 const std::string& activity);

std::vector<DeviceRecord> generate_registry(const GenerationConfig& config,
                                            int count);

Catalog load_catalog(const std::filesystem::path& path);

std::vector<MaintenanceRecord> generate_maintenance_log(
    const GenerationConfig& config, const std::vector<DeviceRecord>& registry,
    const Catalog& catalog, int count,
    const DescriptionWriter* llm_writer = nullptr);

std::vector<SensorReading> generate_sensor_series(
    const GenerationConfig& config, const std::vector<DeviceRecord>& registry,
    const std::vector<MaintenanceRecord>& clean_log);

}  // namespace fleetlog
