#include "fleetlog/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include "fleetlog/text.hpp"

namespace fleetlog {

namespace {

constexpr const char* kVinAlphabet = "ABCDEFGHJKLMNPRSTUVWXYZ0123456789";
constexpr std::size_t kVinLength = 17;
constexpr std::uint64_t kMaxDrawAttempts = 1'000'000;

std::string draw_device_id(RngStream& rng) {
  std::string id;
  id += static_cast<char>('a' + rng.below(26));
  for (int i = 0; i < 3; ++i) id += static_cast<char>('0' + rng.below(10));
  id += static_cast<char>('A' + rng.below(26));
  return id;
}

std::string draw_vin(RngStream& rng) {
  const std::string_view alphabet = kVinAlphabet;
  std::string vin;
  vin.reserve(kVinLength);
  for (std::size_t i = 0; i < kVinLength; ++i) {
    vin += alphabet[rng.below(alphabet.size())];
  }
  return vin;
}

/// Draws values until `count` distinct ones are collected.
std::vector<std::string> draw_unique(
    int count, const std::function<std::string(RngStream&)>& draw,
    RngStream& rng, const std::string& what) {
  std::set<std::string> seen;
  std::vector<std::string> out;
  std::uint64_t attempts = 0;
  while (out.size() < static_cast<std::size_t>(count)) {
    if (++attempts > kMaxDrawAttempts) {
      throw GenerationError("could not draw " + std::to_string(count) +
                            " unique " + what);
    }
    std::string v = draw(rng);
    if (seen.insert(v).second) out.push_back(std::move(v));
  }
  return out;
}

}  // namespace

void GenerationConfig::validate() const {
  if (fleet_size < 1) throw GenerationError("fleet_size must be >= 1");
  if (monitoring_window.end < monitoring_window.start) {
    throw GenerationError("monitoring_window end precedes start");
  }
  if (monitoring_window.length_days() < repair_duration_max_days + 2) {
    throw GenerationError(
        "monitoring_window must span at least repair_duration_max + 2 days");
  }
  if (daily_km_std <= 0) throw GenerationError("daily_km_std must be > 0");
  if (odometer_init_min_km < 0) {
    throw GenerationError("odometer_init_range minimum must be >= 0");
  }
  if (odometer_init_max_km < odometer_init_min_km) {
    throw GenerationError("odometer_init_range is inverted");
  }
  if (repair_duration_min_days < 1 ||
      repair_duration_max_days < repair_duration_min_days) {
    throw GenerationError("repair_duration_range is invalid");
  }
  if (plate_pattern.empty()) throw GenerationError("plate_pattern is empty");
}

std::uint64_t plate_pattern_space(const std::string& pattern) {
  std::uint64_t space = 1;
  for (char c : pattern) {
    std::uint64_t factor = (c == 'A') ? 26 : (c == '9') ? 10 : 1;
    if (space > UINT64_MAX / factor) return UINT64_MAX;
    space *= factor;
  }
  if (matches_plate_pattern("TEST", pattern) && space > 0) --space;
  return space;
}

bool matches_plate_pattern(const std::string& plate,
                           const std::string& pattern) {
  if (plate.size() != pattern.size()) return false;
  for (std::size_t i = 0; i < plate.size(); ++i) {
    char p = pattern[i], c = plate[i];
    if (p == 'A') {
      if (c < 'A' || c > 'Z') return false;
    } else if (p == '9') {
      if (c < '0' || c > '9') return false;
    } else if (c != p) {
      return false;
    }
  }
  return true;
}

std::string random_plate(const std::string& pattern, RngStream& rng) {
  // "TEST" is reserved for digital-system-test records.
  for (std::uint64_t attempt = 0; attempt < kMaxDrawAttempts; ++attempt) {
    std::string plate;
    plate.reserve(pattern.size());
    for (char p : pattern) {
      if (p == 'A') {
        plate += static_cast<char>('A' + rng.below(26));
      } else if (p == '9') {
        plate += static_cast<char>('0' + rng.below(10));
      } else {
        plate += p;
      }
    }
    if (plate != "TEST") return plate;
  }
  throw GenerationError("plate pattern '" + pattern +
                        "' only produces the reserved plate TEST");
}

std::string activity_past_tense(const std::string& activity) {
  static const std::map<std::string, std::string> kPastTense = {
      {"Replace", "Replaced"},   {"Repair", "Repaired"},
      {"Inspect", "Inspected"},  {"Overhaul", "Overhauled"},
      {"Adjust", "Adjusted"},    {"Lubricate", "Lubricated"},
      {"Align", "Aligned"},      {"Clean", "Cleaned"},
      {"Calibrate", "Calibrated"}, {"Recharge", "Recharged"},
      {"Seal", "Sealed"},        {"Flush", "Flushed"},
      {"Tighten", "Tightened"},
  };
  auto it = kPastTense.find(activity);
  if (it != kPastTense.end()) return it->second;
  // Regular-verb fallback for user-supplied catalogs.
  if (!activity.empty() && activity.back() == 'e') return activity + "d";
  return activity + "ed";
}

std::string template_description(const std::string& component,
                                 const std::string& activity) {
  return activity_past_tense(activity) + " " + text::to_lower(component) + ".";
}

std::vector<DeviceRecord> generate_registry(const GenerationConfig& config,
                                            int count) {
  config.validate();
  if (count < 1) throw GenerationError("registry count must be >= 1");

  constexpr std::uint64_t kDeviceIdSpace = 26ULL * 1000 * 26;
  if (static_cast<std::uint64_t>(count) > kDeviceIdSpace) {
    throw GenerationError(
        "device id pattern exhausted: pattern 'a999A' allows " +
        std::to_string(kDeviceIdSpace) + " ids, requested " +
        std::to_string(count));
  }
  std::uint64_t plates_available = plate_pattern_space(config.plate_pattern);
  if (static_cast<std::uint64_t>(count) > plates_available) {
    throw GenerationError("license plate pattern exhausted: pattern '" +
                          config.plate_pattern + "' allows " +
                          std::to_string(plates_available) +
                          " plates, requested " + std::to_string(count));
  }

  auto id_rng = RngStream::derive(config.seed, "registry/device_ids");
  auto plate_rng = RngStream::derive(config.seed, "registry/plates");
  auto vin_rng = RngStream::derive(config.seed, "registry/vins");

  auto ids = draw_unique(count, draw_device_id, id_rng, "device ids");
  auto plates = draw_unique(
      count,
      [&](RngStream& r) { return random_plate(config.plate_pattern, r); },
      plate_rng, "license plates");
  auto vins = draw_unique(count, draw_vin, vin_rng, "VINs");

  std::vector<DeviceRecord> registry;
  registry.reserve(count);
  for (int i = 0; i < count; ++i) {
    registry.push_back(
        {ids[i], "(" + ids[i] + ")", plates[i], vins[i]});
  }
  return registry;
}

Catalog load_catalog(const std::filesystem::path& path) {
  return Catalog::load(path);
}

std::vector<MaintenanceRecord> generate_maintenance_log(
    const GenerationConfig& config, const std::vector<DeviceRecord>& registry,
    const Catalog& catalog, int count, const DescriptionWriter* llm_writer) {
  config.validate();
  if (count < 0) throw GenerationError("maintenance log count must be >= 0");
  if (static_cast<std::size_t>(count) > registry.size()) {
    throw GenerationError(
        "requested " + std::to_string(count) + " maintenance records for " +
        std::to_string(registry.size()) +
        " vehicles; at most one maintenance event per vehicle is assumed");
  }
  if (config.description_mode == DescriptionMode::kLlm && !llm_writer) {
    throw GenerationError(
        "description_mode=llm requires a configured chat client");
  }

  auto rng = RngStream::derive(config.seed, "maintenance_log");

  // Pick `count` distinct vehicles, keeping registry order for the output.
  std::vector<std::size_t> indices(registry.size());
  std::iota(indices.begin(), indices.end(), 0);
  rng.shuffle(indices);
  indices.resize(count);
  std::sort(indices.begin(), indices.end());

  // Work-order numbers: zero-padded sequence starting at a seeded offset. The
  // width leaves room for the noise injector to extend the sequence.
  long long wo_offset = rng.uniform_int(101, 9999);
  int wo_width = static_cast<int>(
      std::to_string(wo_offset + 2LL * std::max(count, 1)).size());

  const auto& window = config.monitoring_window;
  std::vector<MaintenanceRecord> log;
  log.reserve(count);
  for (int i = 0; i < count; ++i) {
    const DeviceRecord& vehicle = registry[indices[i]];
    int duration = static_cast<int>(rng.uniform_int(
        config.repair_duration_min_days, config.repair_duration_max_days));
    int latest_start = window.start.days_until(window.end) - duration;
    Date start = window.start.plus_days(
        static_cast<int>(rng.uniform_int(0, latest_start)));

    const ServiceOperation& op = rng.pick(catalog.rows());

    MaintenanceRecord rec;
    std::string num = std::to_string(wo_offset + i);
    rec.wo_num =
        "WO" + std::string(std::max<int>(0, wo_width - int(num.size())), '0') +
        num;
    rec.start_date = start;
    rec.end_date = start.plus_days(duration);
    rec.license_plate = vehicle.license_plate;
    rec.system = op.system;
    rec.subsystem = op.subsystem;
    rec.component = op.component;
    rec.activity = op.activity;
    rec.work_order_type = "corrective";
    if (config.description_mode == DescriptionMode::kLlm) {
      rec.work_description = (*llm_writer)(rec);
      // Clean records must mention both terms; fall back when the model
      // drops one.
      if (!text::contains_ci(rec.work_description, rec.component) ||
          !text::contains_ci(rec.work_description, rec.activity)) {
        rec.work_description = template_description(op.component, op.activity);
      }
    } else {
      rec.work_description = template_description(op.component, op.activity);
    }
    log.push_back(std::move(rec));
  }
  return log;
}

std::vector<SensorReading> generate_sensor_series(
    const GenerationConfig& config, const std::vector<DeviceRecord>& registry,
    const std::vector<MaintenanceRecord>& clean_log) {
  // The series is total over any window, even one too short to host a
  // repair, so only the signal parameters are validated here.
  if (config.monitoring_window.end < config.monitoring_window.start) {
    throw GenerationError("monitoring_window end precedes start");
  }
  if (config.daily_km_std <= 0) {
    throw GenerationError("daily_km_std must be > 0");
  }
  if (config.odometer_init_min_km < 0 ||
      config.odometer_init_max_km < config.odometer_init_min_km) {
    throw GenerationError("odometer_init_range is invalid");
  }

  std::map<std::string, const MaintenanceRecord*> maintenance_by_plate;
  for (const auto& rec : clean_log) {
    maintenance_by_plate[rec.license_plate] = &rec;
  }
  for (const auto& rec : clean_log) {
    bool known = std::any_of(registry.begin(), registry.end(),
                             [&](const DeviceRecord& d) {
                               return d.license_plate == rec.license_plate;
                             });
    if (!known) {
      throw GenerationError("maintenance record " + rec.wo_num +
                            " references unknown plate " + rec.license_plate);
    }
  }

  auto base = RngStream::derive(config.seed, "sensor");
  const auto& window = config.monitoring_window;
  int days = window.length_days();

  std::vector<SensorReading> series;
  series.reserve(static_cast<std::size_t>(days) * registry.size());
  for (std::size_t v = 0; v < registry.size(); ++v) {
    const DeviceRecord& vehicle = registry[v];
    auto rng = base.derive_indexed("device", v);

    const MaintenanceRecord* maint = nullptr;
    if (auto it = maintenance_by_plate.find(vehicle.license_plate);
        it != maintenance_by_plate.end()) {
      maint = it->second;
    }

    long long odometer = rng.uniform_int(config.odometer_init_min_km,
                                         config.odometer_init_max_km);
    for (int d = 0; d < days; ++d) {
      Date date = window.start.plus_days(d);
      long long km = 0;
      if (d > 0) {
        double sampled =
            std::max(0.0, rng.normal(config.daily_km_mean, config.daily_km_std));
        if (maint && maint->start_date < date && date < maint->end_date) {
          km = 0;  // fully inside the repair interval
        } else if (maint &&
                   (date == maint->start_date || date == maint->end_date)) {
          km = std::llround(sampled / 2.0);
        } else {
          km = std::llround(sampled);
        }
      }
      odometer += km;
      series.push_back({vehicle.device_id, date, odometer, km});
    }
  }
  return series;
}

}  // namespace fleetlog
