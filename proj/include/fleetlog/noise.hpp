#pragma once

#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fleetlog/actions.hpp"
#include "fleetlog/catalog.hpp"
#include "fleetlog/datagen.hpp"
#include "fleetlog/rng.hpp"

namespace fleetlog {

struct NoiseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class NoiseKind { kNone, kCorruptive, kGenerative };

struct NoiseTypeInfo {
  std::string id;            // e.g. "M3"
  NoiseKind kind = NoiseKind::kNone;
  std::string name;          // e.g. "Invalid values"
  std::string report_label;  // report row label, e.g. "invalid value"
};

/// Per-record ground-truth annotation. corrupted_field / clean_value are
/// present exactly when the noise kind is corruptive.
struct NoiseLabel {
  std::string wo_num;
  std::string noise_type;
  std::optional<std::string> corrupted_field;
  std::optional<std::string> clean_value;
  std::optional<std::string> noisy_value;
};

struct NoisyRecord {
  MaintenanceRecord record;
  NoiseLabel label;
};

struct NoiseContext {
  const GenerationConfig* config = nullptr;
  const std::vector<DeviceRecord>* registry = nullptr;
  const Catalog* catalog = nullptr;
};

/// Allocates fresh work-order numbers that extend an existing log's sequence.
class WoNumberAllocator {
 public:
  explicit WoNumberAllocator(const std::vector<MaintenanceRecord>& existing);
  std::string next();

 private:
  long long next_value_ = 1;
  int width_ = 3;
};

/// Returns std::nullopt when the host record cannot carry this noise type
/// (the injector then picks a different host).
using CorruptiveGenerator = std::function<std::optional<NoisyRecord>(
    const MaintenanceRecord&, const NoiseContext&, RngStream&)>;
using GenerativeGenerator = std::function<NoisyRecord(
    const NoiseContext&, WoNumberAllocator&, RngStream&)>;

/// Open registry of noise types. The standard taxonomy covers M0-M6; new
/// types plug in through register_* without touching the injector.
class NoiseTaxonomy {
 public:
  void register_passthrough(NoiseTypeInfo info);
  void register_corruptive(NoiseTypeInfo info, CorruptiveGenerator generator);
  void register_generative(NoiseTypeInfo info, GenerativeGenerator generator);

  static NoiseTaxonomy standard();

  const std::vector<NoiseTypeInfo>& types() const { return types_; }
  const NoiseTypeInfo& type(const std::string& id) const;
  bool has(const std::string& id) const;
  const CorruptiveGenerator& corruptive_generator(const std::string& id) const;
  const GenerativeGenerator& generative_generator(const std::string& id) const;

 private:
  void add(NoiseTypeInfo info);
  std::vector<NoiseTypeInfo> types_;
  std::map<std::string, CorruptiveGenerator> corruptive_;
  std::map<std::string, GenerativeGenerator> generative_;
};

/// Proportions over noise-type ids; must sum to 1.
struct NoiseMix {
  std::map<std::string, double> proportions;

  static NoiseMix uniform(const NoiseTaxonomy& taxonomy);
  static NoiseMix single(const std::string& id);
  void validate(const NoiseTaxonomy& taxonomy) const;
};

/// Largest-remainder apportionment of `total` over the mix; ties broken by
/// taxonomy order.
std::map<std::string, int> allocate_counts(int total, const NoiseMix& mix,
                                           const NoiseTaxonomy& taxonomy);

// The standard generators, also usable stand-alone.
NoisyRecord corrupt_m1(const MaintenanceRecord& record,
                       const std::vector<DeviceRecord>& registry,
                       RngStream& rng);
NoisyRecord generate_m2(const NoiseContext& ctx, WoNumberAllocator& wo,
                        RngStream& rng);
NoisyRecord corrupt_m3(const MaintenanceRecord& record, const Catalog& catalog,
                       RngStream& rng);
NoisyRecord corrupt_m4(const MaintenanceRecord& record, RngStream& rng);
NoisyRecord generate_m5(const NoiseContext& ctx, WoNumberAllocator& wo,
                        RngStream& rng);
std::optional<NoisyRecord> corrupt_m6(const MaintenanceRecord& record,
                                      const DateInterval& window,
                                      RngStream& rng);

struct InjectResult {
  std::vector<MaintenanceRecord> noisy_log;
  std::vector<NoiseLabel> labels;  // aligned with noisy_log
};

InjectResult inject(const std::vector<MaintenanceRecord>& clean_log,
                    const NoiseMix& mix, const NoiseTaxonomy& taxonomy,
                    const NoiseContext& ctx, int total, RngStream& rng);

/// The action the agent is expected to take: noise-free records are accepted,
/// generative noise is rejected, corruptive noise gets the single-field fix
/// back to the clean value.
Action ground_truth_action(const NoiseLabel& label,
                           const NoiseTaxonomy& taxonomy);

}  // namespace fleetlog
