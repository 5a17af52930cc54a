#pragma once

#include <nlohmann/json.hpp>

#include "fleetlog/datagen.hpp"
#include "fleetlog/noise.hpp"
#include "fleetlog/params.hpp"

namespace fleetlog {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

using Json = nlohmann::ordered_json;

Json generation_config_to_json(const GenerationConfig& config);
GenerationConfig generation_config_from_json(const Json& j);

Json noise_mix_to_json(const NoiseMix& mix);
NoiseMix noise_mix_from_json(const Json& j);

Json decoding_params_to_json(const DecodingParams& p);
DecodingParams decoding_params_from_json(const Json& j);

Json theta_space_to_json(const ThetaSpace& s);
ThetaSpace theta_space_from_json(const Json& j);

Json retry_policy_to_json(const RetryPolicy& p);
RetryPolicy retry_policy_from_json(const Json& j);

Json model_spec_to_json(const ModelSpec& m);
ModelSpec model_spec_from_json(const Json& j);

/// Applies "key.path=value" overrides onto a JSON document; values parse as
/// JSON when possible and fall back to strings.
void apply_override(Json& doc, const std::string& assignment);

Json load_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const Json& doc);

}  // namespace fleetlog
