#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "predq/engine/run_control.hpp"
#include "predq/llmserve/request.hpp"
#include "predq/metrics/summary.hpp"
#include "predq/policies/rank.hpp"

namespace predq::llm {

enum class RankBasis : std::uint8_t { kOutputOnly, kInputPlusOutput };
enum class TrailAge : std::uint8_t { kTokens, kSeconds };

struct LlmPolicy {
  enum class Kind : std::uint8_t { kFifo, kSprpt, kTrail };

  Kind kind = Kind::kFifo;
  double trail_c = 0.5;
  RankBasis basis = RankBasis::kOutputOnly;
  TrailAge trail_age = TrailAge::kTokens;

  static LlmPolicy fifo() { return {}; }
  static LlmPolicy sprpt(RankBasis basis = RankBasis::kOutputOnly);
  static LlmPolicy trail(double c, RankBasis basis = RankBasis::kOutputOnly);
  static LlmPolicy from_name(const std::string& name, double trail_c = 0.5);

  std::string name() const;
  void validate() const;
};

struct Strategies {
  MemoryStrategy preemption = MemoryStrategy::kDiscardRecompute;
  MemoryStrategy api = MemoryStrategy::kPreserve;  // unless the call overrides
};

/// Duration of one iteration: decode-only batches take tpot; prefill work
/// takes TTFT of the tokens processed, and a mixed batch the longer of the two.
double iteration_duration(const GpuConfig& gpu, std::uint64_t prefill_tokens, bool has_decode);

/// Memory a request needs to take part in the next iteration.
struct AdmissionCandidate {
  std::size_t handle = 0;  // caller's index
  policies::Rank rank;
  bool resident = false;
  bool running = false;       // in the previous batch
  bool forced = false;        // Trail gate closed: cannot be evicted
  bool sticky = false;        // keeps its memory even if not selected
  std::uint64_t kv_tokens = 0;
  std::uint64_t growth = 0;  // kv gained by the next iteration
  bool on_host = false;      // must be swapped back in before it can run
};

struct AdmissionPlan {
  std::vector<std::size_t> selected;  // handles, in admission order
  std::vector<std::size_t> evicted;   // running but not selected
  std::vector<std::size_t> swap_ins;  // transfers started; they run later
};

/// Greedy admission in rank order (Trail-gated requests first) under the
/// batch limit and `capacity - held` tokens, skipping requests that do not fit.
/// `held` is memory owned by requests outside the candidate list.
AdmissionPlan admit(std::vector<AdmissionCandidate> candidates, std::uint64_t capacity, std::uint64_t held,
                    std::size_t batch_limit);

/// Effect of preempting a resident request.
struct PreemptionDelta {
  std::uint64_t freed_now = 0;        // tokens released immediately
  std::uint64_t freed_later = 0;      // tokens released after the transfer
  double transfer_seconds = 0.0;      // swap-out delay
  std::uint64_t recompute_tokens = 0; // prefill work owed on resume
};

/// Applies `strategy` to a resident request. Throws LogicError otherwise.
PreemptionDelta preempt(LlmRequest& request, MemoryStrategy strategy, const GpuConfig& gpu);

struct LlmRecord {
  std::uint64_t id = 0;
  double arrival = 0.0;
  double first_scheduled = 0.0;
  double first_token = 0.0;  // end of the first prefill
  double completion = 0.0;
  std::uint64_t n_input = 0;
  std::uint64_t n_output = 0;
  std::uint64_t preemptions = 0;
  bool rejected = false;
};

struct LatencyBreakdown {
  double t_waiting = 0.0;
  double ttft = 0.0;  // from arrival
  double decode_time = 0.0;
  double t_response = 0.0;
};

LatencyBreakdown request_latency(const LlmRecord& record);

struct RecomputeEvent {
  std::uint64_t id = 0;
  double time = 0.0;
  std::uint64_t n_input = 0;
  std::uint64_t generated = 0;
  std::uint64_t tokens = 0;  // prefill work owed
};

struct LlmCounters {
  std::uint64_t iterations = 0;
  std::uint64_t decode_steps = 0;  // tokens generated
  std::uint64_t prefill_tokens = 0;
  std::uint64_t preemptions = 0;
  std::uint64_t discards = 0;
  std::uint64_t swap_outs = 0;
  std::uint64_t swap_ins = 0;
  std::uint64_t api_calls = 0;
  std::uint64_t recompute_tokens = 0;
  std::uint64_t forced_discards = 0;  // memory deadlock broken by discarding
  std::uint64_t kv_transfers = 0;
  std::uint64_t rejected = 0;
};

/// Token-seconds of KV memory held without being computed on.
struct MemoryWaste {
  double api_preserve = 0.0;
  double idle_resident = 0.0;
  double swap = 0.0;
  double recompute = 0.0;

  double total() const { return api_preserve + idle_resident + swap + recompute; }
};

struct LlmResult {
  std::vector<LlmRecord> records;  // measured, completed, sorted by id
  std::vector<std::uint64_t> rejected_ids;
  metrics::Metrics latency;
  metrics::Metrics ttft;
  double token_throughput = 0.0;
  MemoryWaste waste;
  LlmCounters counters;
  std::vector<RecomputeEvent> recompute_events;
  std::uint64_t peak_kv_tokens = 0;
  double end_time = 0.0;
};

struct LlmOptions {
  // Recount resident memory from scratch after every state change.
  bool audit = false;
  bool keep_recompute_events = true;
};

/// Requests must have ids 0..n-1 in nondecreasing arrival order.
LlmResult simulate_llm(std::vector<LlmRequest> workload, const ClusterOrg& org, const LlmPolicy& policy,
                       const Strategies& strategies, const engine::RunControl& control, const LlmOptions& options = {});

}  // namespace predq::llm
