#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "predq/engine/rng.hpp"
#include "predq/llmserve/request.hpp"
#include "predq/workload/prediction.hpp"

namespace predq::llm {

/// Integer token-count distribution.
struct TokenDistribution {
  enum class Kind { kConstant, kUniform, kBimodal };

  Kind kind = Kind::kConstant;
  std::uint64_t a = 0;  // constant value, uniform low, or first mode
  std::uint64_t b = 0;  // uniform high (inclusive) or second mode
  double p_first = 0.5;

  static TokenDistribution constant(std::uint64_t value);
  static TokenDistribution uniform(std::uint64_t lo, std::uint64_t hi);
  static TokenDistribution bimodal(std::uint64_t first, std::uint64_t second, double p_first);

  std::uint64_t sample(engine::RngStream& rng) const;
  double mean() const;
  std::string name() const;
};

struct LlmWorkloadConfig {
  double arrival_rate = 1.0;  // requests per second
  TokenDistribution input = TokenDistribution::constant(128);
  TokenDistribution output = TokenDistribution::bimodal(10, 500, 0.5);
  workload::PredictionModel prediction = workload::PredictionModel::exact();
  // Each request independently carries API calls with this probability.
  double api_probability = 0.0;
  std::size_t api_calls_per_request = 1;
  double api_duration_mean = 1.0;  // exponential
  std::optional<MemoryStrategy> api_strategy;

  void validate() const;
};

/// `count` requests with ids 0..count-1 in arrival order.
std::vector<LlmRequest> generate_llm_workload(const LlmWorkloadConfig& config, std::size_t count, std::uint64_t seed);

/// CSV with header `arrival_time,n_input,n_output[,predicted_output][,api_calls]`.
/// api_calls is `trigger:duration[:strategy];...`. Throws TraceError.
std::vector<LlmRequest> load_llm_trace(const std::filesystem::path& path);

/// Arrival rate that fills a fraction `rho` of the decode slots: each GPU
/// runs min(batch_limit, kv_capacity / mean peak tokens) requests at once,
/// and each request occupies a slot for TTFT plus its decode steps.
double arrival_rate_for_load(double rho, const TokenDistribution& input, const TokenDistribution& output,
                             const GpuConfig& gpu, std::size_t gpus = 1);

}  // namespace predq::llm
