#include "fleetlog/noise.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "fleetlog/text.hpp"

namespace fleetlog {

namespace {

const std::vector<std::string> kCategoricalFields = {"system", "subsystem",
                                                     "component", "activity"};
const std::vector<std::string> kFixedInvalidLabels = {"UNKNOWN", "N/A", "Misc"};
const std::vector<std::string> kTestDescriptions = {
    "Testing the IT system.",
    "Installed the fleet monitoring unit.",
    "Calibrated the telematics device.",
    "Monitoring system connectivity check.",
};

std::string& categorical_field(MaintenanceRecord& rec,
                               const std::string& field) {
  if (field == "system") return rec.system;
  if (field == "subsystem") return rec.subsystem;
  if (field == "component") return rec.component;
  if (field == "activity") return rec.activity;
  throw NoiseError("not a categorical field: '" + field + "'");
}

std::string apply_typo(const std::string& token, RngStream& rng) {
  enum { kDelete, kSubstitute, kTranspose };
  int op = static_cast<int>(rng.below(3));
  std::string out = token;
  switch (op) {
    case kDelete: {
      if (out.size() < 2) break;
      out.erase(rng.below(out.size()), 1);
      break;
    }
    case kSubstitute: {
      std::size_t pos = rng.below(out.size());
      char replacement =
          std::islower(static_cast<unsigned char>(out[pos]))
              ? static_cast<char>('a' + rng.below(26))
              : static_cast<char>('A' + rng.below(26));
      out[pos] = replacement;
      break;
    }
    case kTranspose: {
      if (out.size() < 2) break;
      std::size_t pos = rng.below(out.size() - 1);
      std::swap(out[pos], out[pos + 1]);
      break;
    }
  }
  return out;
}

MaintenanceRecord random_clean_shaped_record(const NoiseContext& ctx,
                                             WoNumberAllocator& wo,
                                             RngStream& rng,
                                             std::string license_plate) {
  const GenerationConfig& config = *ctx.config;
  const auto& window = config.monitoring_window;
  int duration = static_cast<int>(rng.uniform_int(
      config.repair_duration_min_days, config.repair_duration_max_days));
  int latest_start = window.start.days_until(window.end) - duration;
  Date start =
      window.start.plus_days(static_cast<int>(rng.uniform_int(0, latest_start)));

  MaintenanceRecord rec;
  rec.wo_num = wo.next();
  rec.start_date = start;
  rec.end_date = start.plus_days(duration);
  rec.license_plate = std::move(license_plate);
  rec.work_order_type = "corrective";
  return rec;
}

}  // namespace

WoNumberAllocator::WoNumberAllocator(
    const std::vector<MaintenanceRecord>& existing) {
  for (const auto& rec : existing) {
    if (rec.wo_num.rfind("WO", 0) != 0) continue;
    std::string digits = rec.wo_num.substr(2);
    if (digits.empty() ||
        digits.find_first_not_of("0123456789") != std::string::npos) {
      continue;
    }
    width_ = std::max(width_, static_cast<int>(digits.size()));
    next_value_ = std::max(next_value_, std::stoll(digits) + 1);
  }
}

std::string WoNumberAllocator::next() {
  std::string num = std::to_string(next_value_++);
  int pad = std::max(0, width_ - static_cast<int>(num.size()));
  return "WO" + std::string(pad, '0') + num;
}

void NoiseTaxonomy::add(NoiseTypeInfo info) {
  if (has(info.id)) {
    throw NoiseError("noise type already registered: " + info.id);
  }
  types_.push_back(std::move(info));
}

void NoiseTaxonomy::register_passthrough(NoiseTypeInfo info) {
  info.kind = NoiseKind::kNone;
  add(std::move(info));
}

void NoiseTaxonomy::register_corruptive(NoiseTypeInfo info,
                                        CorruptiveGenerator generator) {
  info.kind = NoiseKind::kCorruptive;
  corruptive_[info.id] = std::move(generator);
  add(std::move(info));
}

void NoiseTaxonomy::register_generative(NoiseTypeInfo info,
                                        GenerativeGenerator generator) {
  info.kind = NoiseKind::kGenerative;
  generative_[info.id] = std::move(generator);
  add(std::move(info));
}

bool NoiseTaxonomy::has(const std::string& id) const {
  return std::any_of(types_.begin(), types_.end(),
                     [&](const NoiseTypeInfo& t) { return t.id == id; });
}

const NoiseTypeInfo& NoiseTaxonomy::type(const std::string& id) const {
  for (const auto& t : types_) {
    if (t.id == id) return t;
  }
  throw NoiseError("unknown noise type: " + id);
}

const CorruptiveGenerator& NoiseTaxonomy::corruptive_generator(
    const std::string& id) const {
  auto it = corruptive_.find(id);
  if (it == corruptive_.end()) {
    throw NoiseError("no corruptive generator for noise type " + id);
  }
  return it->second;
}

const GenerativeGenerator& NoiseTaxonomy::generative_generator(
    const std::string& id) const {
  auto it = generative_.find(id);
  if (it == generative_.end()) {
    throw NoiseError("no generative generator for noise type " + id);
  }
  return it->second;
}

NoiseTaxonomy NoiseTaxonomy::standard() {
  NoiseTaxonomy t;
  t.register_passthrough({"M0", NoiseKind::kNone, "Noise free", "noise free"});
  t.register_corruptive(
      {"M1", NoiseKind::kCorruptive, "Vehicle Id misalignment",
       "vehicle id mis."},
      [](const MaintenanceRecord& rec, const NoiseContext& ctx,
         RngStream& rng) -> std::optional<NoisyRecord> {
        return corrupt_m1(rec, *ctx.registry, rng);
      });
  t.register_generative(
      {"M2", NoiseKind::kGenerative, "Out-of-fleet vehicles",
       "out-of-fleet veh."},
      [](const NoiseContext& ctx, WoNumberAllocator& wo, RngStream& rng) {
        return generate_m2(ctx, wo, rng);
      });
  t.register_corruptive(
      {"M3", NoiseKind::kCorruptive, "Invalid values", "invalid value"},
      [](const MaintenanceRecord& rec, const NoiseContext& ctx,
         RngStream& rng) -> std::optional<NoisyRecord> {
        return corrupt_m3(rec, *ctx.catalog, rng);
      });
  t.register_corruptive(
      {"M4", NoiseKind::kCorruptive, "Missing values", "missing value"},
      [](const MaintenanceRecord& rec, const NoiseContext&,
         RngStream& rng) -> std::optional<NoisyRecord> {
        return corrupt_m4(rec, rng);
      });
  t.register_generative(
      {"M5", NoiseKind::kGenerative, "Digital system test",
       "digital system test"},
      [](const NoiseContext& ctx, WoNumberAllocator& wo, RngStream& rng) {
        return generate_m5(ctx, wo, rng);
      });
  t.register_corruptive(
      {"M6", NoiseKind::kCorruptive, "Wrong end dates", "wrong end date"},
      [](const MaintenanceRecord& rec, const NoiseContext& ctx,
         RngStream& rng) {
        return corrupt_m6(rec, ctx.config->monitoring_window, rng);
      });
  return t;
}

NoiseMix NoiseMix::uniform(const NoiseTaxonomy& taxonomy) {
  NoiseMix mix;
  double share = 1.0 / static_cast<double>(taxonomy.types().size());
  for (const auto& t : taxonomy.types()) mix.proportions[t.id] = share;
  return mix;
}

NoiseMix NoiseMix::single(const std::string& id) {
  NoiseMix mix;
  mix.proportions[id] = 1.0;
  return mix;
}

void NoiseMix::validate(const NoiseTaxonomy& taxonomy) const {
  double sum = 0.0;
  for (const auto& [id, p] : proportions) {
    if (!taxonomy.has(id)) throw NoiseError("unknown noise type in mix: " + id);
    if (p < 0.0) throw NoiseError("negative proportion for " + id);
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw NoiseError("noise mix proportions sum to " + std::to_string(sum) +
                     ", expected 1");
  }
}

std::map<std::string, int> allocate_counts(int total, const NoiseMix& mix,
                                           const NoiseTaxonomy& taxonomy) {
  mix.validate(taxonomy);
  if (total < 0) throw NoiseError("total must be >= 0");

  struct Entry {
    std::string id;
    int order;
    int base;
    double remainder;
  };
  std::vector<Entry> entries;
  int allocated = 0;
  int order = 0;
  for (const auto& t : taxonomy.types()) {
    auto it = mix.proportions.find(t.id);
    if (it == mix.proportions.end()) {
      ++order;
      continue;
    }
    double exact = it->second * total;
    int base = static_cast<int>(std::floor(exact + 1e-12));
    entries.push_back({t.id, order++, base, exact - base});
    allocated += base;
  }
  int leftover = total - allocated;
  std::stable_sort(entries.begin(), entries.end(),
                   [](const Entry& a, const Entry& b) {
                     if (a.remainder != b.remainder)
                       return a.remainder > b.remainder;
                     return a.order < b.order;
                   });
  std::map<std::string, int> counts;
  for (auto& e : entries) {
    if (leftover > 0) {
      ++e.base;
      --leftover;
    }
    if (e.base > 0) counts[e.id] = e.base;
  }
  return counts;
}

NoisyRecord corrupt_m1(const MaintenanceRecord& record,
                       const std::vector<DeviceRecord>& registry,
                       RngStream& rng) {
  auto it = std::find_if(registry.begin(), registry.end(),
                         [&](const DeviceRecord& d) {
                           return d.license_plate == record.license_plate;
                         });
  if (it == registry.end()) {
    throw NoiseError("record " + record.wo_num + " has plate " +
                     record.license_plate + " not present in the registry");
  }
  // Same vehicle, wrong identifier kind: the record stays uniquely repairable.
  const std::vector<std::string> alternatives = {it->device_id, it->name,
                                                 it->vin};
  NoisyRecord out{record, {}};
  out.record.license_plate = rng.pick(alternatives);
  out.label = {record.wo_num, "M1", "license_plate", record.license_plate,
               out.record.license_plate};
  return out;
}

NoisyRecord generate_m2(const NoiseContext& ctx, WoNumberAllocator& wo,
                        RngStream& rng) {
  std::set<std::string> fleet_plates;
  for (const auto& d : *ctx.registry) fleet_plates.insert(d.license_plate);

  std::string plate;
  do {
    plate = random_plate(ctx.config->plate_pattern, rng);
  } while (fleet_plates.contains(plate));

  NoisyRecord out{
      random_clean_shaped_record(ctx, wo, rng, plate), {}};
  const ServiceOperation& op = rng.pick(ctx.catalog->rows());
  out.record.system = op.system;
  out.record.subsystem = op.subsystem;
  out.record.component = op.component;
  out.record.activity = op.activity;
  out.record.work_description =
      template_description(op.component, op.activity);
  out.label = {out.record.wo_num, "M2", std::nullopt, std::nullopt,
               std::nullopt};
  return out;
}

NoisyRecord corrupt_m3(const MaintenanceRecord& record, const Catalog& catalog,
                       RngStream& rng) {
  if (!catalog.contains(record.operation())) {
    throw NoiseError("record " + record.wo_num +
                     " is not a catalog row; cannot apply invalid-value noise");
  }
  enum Mechanism { kFixedLabel, kTypo, kSwap, kHierarchy };

  NoisyRecord out{record, {}};
  const std::string& field = rng.pick(kCategoricalFields);
  std::string& slot = categorical_field(out.record, field);
  const std::string clean_value = slot;

  auto draw_typo = [&] {
    std::string token;
    for (int attempt = 0; attempt < 256; ++attempt) {
      token = apply_typo(clean_value, rng);
      if (!token.empty() && token != clean_value &&
          !catalog.vocabulary().contains(token)) {
        return token;
      }
    }
    throw NoiseError("could not produce a typo for token '" + clean_value +
                     "'");
  };

  switch (static_cast<Mechanism>(rng.below(4))) {
    case kFixedLabel:
      slot = rng.pick(kFixedInvalidLabels);
      break;
    case kTypo:
      slot = draw_typo();
      break;
    case kSwap: {
      std::vector<std::string> others;
      for (const auto& f : kCategoricalFields) {
        if (f != field) others.push_back(categorical_field(out.record, f));
      }
      slot = rng.pick(others);
      break;
    }
    case kHierarchy: {
      // A valid same-tier token that is inconsistent with the rest of the row.
      std::vector<std::string> candidates;
      for (const auto& token : catalog.field_vocabulary(field)) {
        if (token == clean_value) continue;
        MaintenanceRecord probe = out.record;
        categorical_field(probe, field) = token;
        if (!catalog.contains(probe.operation())) candidates.push_back(token);
      }
      if (candidates.empty()) {
        slot = draw_typo();  // degenerate catalog
      } else {
        slot = rng.pick(candidates);
      }
      break;
    }
  }

  if (catalog.contains(out.record.operation())) {
    throw NoiseError("invalid-value noise left record " + record.wo_num +
                     " inside the catalog");
  }
  out.label = {record.wo_num, "M3", field, clean_value, slot};
  return out;
}

NoisyRecord corrupt_m4(const MaintenanceRecord& record, RngStream& rng) {
  NoisyRecord out{record, {}};
  const std::string& field = rng.pick(kCategoricalFields);
  std::string& slot = categorical_field(out.record, field);
  out.label = {record.wo_num, "M4", field, slot, std::string()};
  slot.clear();
  return out;
}

NoisyRecord generate_m5(const NoiseContext& ctx, WoNumberAllocator& wo,
                        RngStream& rng) {
  NoisyRecord out{random_clean_shaped_record(ctx, wo, rng, "TEST"), {}};
  out.record.system = "-";
  out.record.subsystem = "-";
  out.record.component = "-";
  out.record.activity = "Test";
  out.record.work_description = rng.pick(kTestDescriptions);
  out.label = {out.record.wo_num, "M5", std::nullopt, std::nullopt,
               std::nullopt};
  return out;
}

std::optional<NoisyRecord> corrupt_m6(const MaintenanceRecord& record,
                                      const DateInterval& window,
                                      RngStream& rng) {
  int room = record.end_date.days_until(window.end);
  // A shift of at least 2 days guarantees one full-travel day inside the
  // claimed interval even with half-day boundaries.
  if (room < 2) return std::nullopt;
  int shift = static_cast<int>(rng.uniform_int(2, std::min(7, room)));
  NoisyRecord out{record, {}};
  out.record.end_date = record.end_date.plus_days(shift);
  out.label = {record.wo_num, "M6", "end_date", record.end_date.to_string(),
               out.record.end_date.to_string()};
  return out;
}

InjectResult inject(const std::vector<MaintenanceRecord>& clean_log,
                    const NoiseMix& mix, const NoiseTaxonomy& taxonomy,
                    const NoiseContext& ctx, int total, RngStream& rng) {
  auto counts = allocate_counts(total, mix, taxonomy);

  int non_generative = 0;
  for (const auto& [id, count] : counts) {
    if (taxonomy.type(id).kind != NoiseKind::kGenerative) {
      non_generative += count;
    }
  }
  if (non_generative > static_cast<int>(clean_log.size())) {
    throw NoiseError("noise allocation needs " +
                     std::to_string(non_generative) +
                     " clean records but only " +
                     std::to_string(clean_log.size()) + " are available");
  }

  // Host assignment: one distinct clean record per non-generative slot.
  std::vector<std::size_t> pool(clean_log.size());
  std::iota(pool.begin(), pool.end(), 0);
  rng.shuffle(pool);

  struct Assignment {
    std::string type_id;
    std::size_t clean_index;
  };
  std::vector<Assignment> assignments;
  std::vector<bool> taken(clean_log.size(), false);

  for (const auto& t : taxonomy.types()) {
    auto it = counts.find(t.id);
    if (it == counts.end() || t.kind == NoiseKind::kGenerative) continue;
    int needed = it->second;
    // M6 needs room to shift the end date; probe the generator on a throwaway
    // stream so unsuitable hosts are skipped deterministically.
    for (std::size_t idx : pool) {
      if (needed == 0) break;
      if (taken[idx]) continue;
      if (t.kind == NoiseKind::kCorruptive) {
        auto probe_rng = rng.derive_indexed("host-probe", idx);
        if (!taxonomy.corruptive_generator(t.id)(clean_log[idx], ctx,
                                                 probe_rng)) {
          continue;
        }
      }
      taken[idx] = true;
      assignments.push_back({t.id, idx});
      --needed;
    }
    if (needed > 0) {
      throw NoiseError("not enough suitable clean records for noise type " +
                       t.id);
    }
  }

  WoNumberAllocator wo(clean_log);
  std::vector<MaintenanceRecord> noisy;
  std::vector<NoiseLabel> labels;
  noisy.reserve(total);
  labels.reserve(total);

  std::size_t record_counter = 0;
  for (const auto& a : assignments) {
    const MaintenanceRecord& host = clean_log[a.clean_index];
    auto rec_rng = rng.derive_indexed("record", record_counter++);
    if (taxonomy.type(a.type_id).kind == NoiseKind::kNone) {
      noisy.push_back(host);
      labels.push_back(
          {host.wo_num, a.type_id, std::nullopt, std::nullopt, std::nullopt});
    } else {
      auto result = taxonomy.corruptive_generator(a.type_id)(host, ctx, rec_rng);
      if (!result) {
        throw NoiseError("generator for " + a.type_id +
                         " rejected a pre-validated host record");
      }
      noisy.push_back(std::move(result->record));
      labels.push_back(std::move(result->label));
    }
  }

  for (const auto& t : taxonomy.types()) {
    auto it = counts.find(t.id);
    if (it == counts.end() || t.kind != NoiseKind::kGenerative) continue;
    for (int i = 0; i < it->second; ++i) {
      auto rec_rng = rng.derive_indexed("record", record_counter++);
      auto result = taxonomy.generative_generator(t.id)(ctx, wo, rec_rng);
      noisy.push_back(std::move(result.record));
      labels.push_back(std::move(result.label));
    }
  }

  // Shuffle so noise type is not inferable from position.
  std::vector<std::size_t> order(noisy.size());
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(order);
  InjectResult out;
  out.noisy_log.reserve(noisy.size());
  out.labels.reserve(labels.size());
  for (std::size_t idx : order) {
    out.noisy_log.push_back(std::move(noisy[idx]));
    out.labels.push_back(std::move(labels[idx]));
  }
  return out;
}

Action ground_truth_action(const NoiseLabel& label,
                           const NoiseTaxonomy& taxonomy) {
  switch (taxonomy.type(label.noise_type).kind) {
    case NoiseKind::kNone:
      return Action::accept(label.wo_num);
    case NoiseKind::kGenerative:
      return Action::reject(label.wo_num);
    case NoiseKind::kCorruptive:
      if (!label.corrupted_field || !label.clean_value) {
        throw NoiseError("corruptive label for " + label.wo_num +
                         " lacks corrupted_field/clean_value");
      }
      return Action::update(label.wo_num, *label.corrupted_field,
                            *label.clean_value);
  }
  throw NoiseError("unreachable noise kind");
}

}  // namespace fleetlog
