#pragma once

#include <cstdint>
#include <string>

#include "fleetlog/rng.hpp"

namespace fleetlog {

/// LLM decoding parameters (the per-environment theta).
struct DecodingParams {
  double temperature = 0.1;
  double top_p = 0.9;
};

/// The sampling space for DecodingParams; open intervals.
struct ThetaSpace {
  double temperature_min = 0.0;
  double temperature_max = 0.2;
  double top_p_min = 0.7;
  double top_p_max = 1.0;

  DecodingParams sample(RngStream& rng) const {
    DecodingParams p;
    do {
      p.temperature = rng.uniform_real(temperature_min, temperature_max);
    } while (p.temperature <= temperature_min);
    do {
      p.top_p = rng.uniform_real(top_p_min, top_p_max);
    } while (p.top_p <= top_p_min);
    return p;
  }

  bool conforms(const DecodingParams& p) const {
    return p.temperature > temperature_min && p.temperature < temperature_max &&
           p.top_p > top_p_min && p.top_p < top_p_max;
  }
};

/// Episode retry budgets: maximum attempts per category.
struct RetryPolicy {
  int output_retries = 50;  // structured-output attempts per pass
  int tool_retries = 3;     // failed invocations allowed per tool per pass
  int record_retries = 3;   // full episode passes
  int tool_call_depth = 25; // tool calls per pass, bounds runaway agents
};

struct ModelSpec {
  std::string model_name;
  std::string endpoint;  // base URL of a chat-completions service
  double price_in_per_mtok = 0.0;
  double price_out_per_mtok = 0.0;
  long long context_window = 0;
};

}  // namespace fleetlog
