#include "predq/llmserve/request.hpp"

#include <cmath>

#include "predq/error.hpp"

namespace predq::llm {

std::string to_string(MemoryStrategy s) {
  switch (s) {
    case MemoryStrategy::kPreserve:
      return "preserve";
    case MemoryStrategy::kDiscardRecompute:
      return "discard";
    case MemoryStrategy::kSwap:
      return "swap";
  }
  return "?";
}

MemoryStrategy memory_strategy_from_string(const std::string& name) {
  if (name == "preserve") return MemoryStrategy::kPreserve;
  if (name == "discard" || name == "recompute" || name == "discard_recompute") return MemoryStrategy::kDiscardRecompute;
  if (name == "swap") return MemoryStrategy::kSwap;
  throw ConfigError("unknown memory strategy '" + name + "' (expected preserve, discard, swap)");
}

void LlmRequest::validate() const {
  for (std::size_t i = 0; i < api_calls.size(); ++i) {
    if (api_calls[i].trigger >= n_output) {
      throw ConfigError("request " + std::to_string(id) + ": API trigger must be < n_output");
    }
    if (i > 0 && api_calls[i].trigger <= api_calls[i - 1].trigger) {
      throw ConfigError("request " + std::to_string(id) + ": overlapping API calls (triggers must strictly increase)");
    }
    if (!(api_calls[i].duration >= 0.0)) {
      throw ConfigError("request " + std::to_string(id) + ": API duration must be >= 0");
    }
  }
}

std::uint64_t GpuConfig::tokens_for_memory(double gigabytes, double bytes_per_token) {
  if (!(gigabytes > 0.0) || !(bytes_per_token > 0.0)) throw ConfigError("KV memory and bytes/token must be > 0");
  return static_cast<std::uint64_t>(std::floor(gigabytes * 1e9 / bytes_per_token));
}

void GpuConfig::validate() const {
  if (kv_capacity == 0) throw ConfigError("kv_capacity must be > 0");
  if (!(bytes_per_token > 0.0)) throw ConfigError("bytes_per_token must be > 0");
  if (!(tpot > 0.0)) throw ConfigError("tpot must be > 0");
  if (!(ttft_base >= 0.0) || !(ttft_per_token >= 0.0)) throw ConfigError("TTFT parameters must be >= 0");
  if (!(ttft_base > 0.0 || ttft_per_token > 0.0)) throw ConfigError("TTFT must be positive");
  if (prefill_chunk == 0) throw ConfigError("prefill_chunk must be > 0");
  if (batch_limit == 0) throw ConfigError("batch_limit must be > 0");
  if (!(swap_seconds_per_gb >= 0.0)) throw ConfigError("swap_seconds_per_gb must be >= 0");
}

void validate(const ClusterOrg& org) {
  if (const auto* p = std::get_if<Pooled>(&org)) {
    if (p->gpus == 0) throw ConfigError("pooled organization needs at least one GPU");
    p->gpu.validate();
    return;
  }
  const auto& d = std::get<Dedicated>(org);
  if (d.prefill.empty() || d.decode.empty()) {
    throw ConfigError("dedicated organization needs at least one prefill and one decode GPU");
  }
  for (const auto& g : d.prefill) g.validate();
  for (const auto& g : d.decode) g.validate();
  if (!(d.kv_transfer_seconds_per_gb >= 0.0)) throw ConfigError("kv_transfer_seconds_per_gb must be >= 0");
}

}  // namespace predq::llm
