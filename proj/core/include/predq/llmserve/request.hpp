#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace predq::llm {

enum class Phase : std::uint8_t { kQueued, kPrefill, kDecode, kApiWait, kSwapped, kDone };

/// KV-cache handling while a request is preempted or waiting on an API call.
enum class MemoryStrategy : std::uint8_t { kPreserve, kDiscardRecompute, kSwap };

std::string to_string(MemoryStrategy s);
MemoryStrategy memory_strategy_from_string(const std::string& name);

/// Where a request's KV cache currently lives.
enum class Location : std::uint8_t {
  kNone,         // nothing cached
  kGpu,          // resident
  kSwappingOut,  // resident until the transfer to host completes
  kHost,
  kSwappingIn,   // memory reserved, transfer in flight
  kStaged,       // handed over from a prefill GPU, waiting for decode memory
};

/// An external call issued once `trigger` output tokens have been generated.
struct ApiCall {
  std::uint64_t trigger = 0;
  double duration = 0.0;
  std::optional<MemoryStrategy> strategy;
};

struct LlmRequest {
  std::uint64_t id = 0;
  double arrival_time = 0.0;
  std::uint64_t n_input = 0;
  std::uint64_t n_output = 0;  // hidden from the scheduler
  std::optional<double> predicted_output;
  std::vector<ApiCall> api_calls;

  std::uint64_t generated = 0;
  std::uint64_t prefill_done = 0;
  std::uint64_t prefill_target = 0;  // n_input, or n_input + generated after a discard
  std::uint64_t kv_tokens = 0;
  Phase phase = Phase::kQueued;
  Location location = Location::kNone;
  std::size_t next_api = 0;

  std::uint64_t peak_tokens() const { return n_input + n_output; }
  std::uint64_t prefill_remaining() const { return prefill_target - prefill_done; }
  bool prefill_complete() const { return prefill_done >= prefill_target; }
  bool resident() const { return location == Location::kGpu; }

  /// Throws ConfigError if API triggers are not strictly increasing and
  /// below n_output, or a duration is negative.
  void validate() const;
};

/// Per-GPU serving parameters. TTFT(n) = ttft_base + ttft_per_token * n.
struct GpuConfig {
  // 512 tokens of KV for a 175B model take about 2.3 GB.
  static constexpr double kDefaultBytesPerToken = 2.3e9 / 512.0;
  static constexpr double kDefaultTpot = 0.250;
  // 2.3 GB over PCIe 4.0 x16 in about 36 ms.
  static constexpr double kDefaultSwapSecondsPerGb = 0.036 / 2.3;

  std::uint64_t kv_capacity = 8192;  // tokens
  double bytes_per_token = kDefaultBytesPerToken;
  double tpot = kDefaultTpot;
  double ttft_base = 0.0;
  double ttft_per_token = 0.5 / 512.0;
  std::uint64_t prefill_chunk = 512;
  std::size_t batch_limit = 8;
  double swap_seconds_per_gb = kDefaultSwapSecondsPerGb;

  /// Capacity in tokens for a KV budget given in GB.
  static std::uint64_t tokens_for_memory(double gigabytes, double bytes_per_token = kDefaultBytesPerToken);

  double ttft(std::uint64_t n_input) const { return ttft_base + ttft_per_token * static_cast<double>(n_input); }
  double gigabytes(std::uint64_t tokens) const { return static_cast<double>(tokens) * bytes_per_token / 1e9; }
  double swap_seconds(std::uint64_t tokens) const { return gigabytes(tokens) * swap_seconds_per_gb; }

  void validate() const;
};

struct Pooled {
  std::size_t gpus = 1;
  GpuConfig gpu;
};

struct Dedicated {
  std::vector<GpuConfig> prefill;
  std::vector<GpuConfig> decode;
  double kv_transfer_seconds_per_gb = 0.0;
};

using ClusterOrg = std::variant<Pooled, Dedicated>;

void validate(const ClusterOrg& org);

}  // namespace predq::llm
