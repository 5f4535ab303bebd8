#include "predq/llmserve/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <variant>

#include "predq/engine/event_queue.hpp"
#include "predq/engine/simulation.hpp"
#include "predq/error.hpp"

namespace predq::llm {

LlmPolicy LlmPolicy::sprpt(RankBasis basis) {
  LlmPolicy p;
  p.kind = Kind::kSprpt;
  p.basis = basis;
  return p;
}

LlmPolicy LlmPolicy::trail(double c, RankBasis basis) {
  LlmPolicy p;
  p.kind = Kind::kTrail;
  p.trail_c = c;
  p.basis = basis;
  p.validate();
  return p;
}

LlmPolicy LlmPolicy::from_name(const std::string& name, double trail_c) {
  if (name == "FIFO" || name == "fifo") return fifo();
  if (name == "SPRPT" || name == "sprpt") return sprpt();
  if (name == "TRAIL" || name == "Trail" || name == "trail") return trail(trail_c);
  throw ConfigError("unknown LLM policy '" + name + "' (expected FIFO, SPRPT, TRAIL)");
}

std::string LlmPolicy::name() const {
  switch (kind) {
    case Kind::kFifo:
      return "FIFO";
    case Kind::kSprpt:
      return "SPRPT";
    case Kind::kTrail:
      return "TRAIL";
  }
  return "?";
}

void LlmPolicy::validate() const {
  if (kind == Kind::kTrail && !(trail_c >= 0.0 && trail_c <= 1.0)) {
    throw ConfigError("Trail c must lie in [0, 1]");
  }
}

double iteration_duration(const GpuConfig& gpu, std::uint64_t prefill_tokens, bool has_decode) {
  if (prefill_tokens == 0) return gpu.tpot;
  const double prefill = gpu.ttft(prefill_tokens);
  return has_decode ? std::max(gpu.tpot, prefill) : prefill;
}

AdmissionPlan admit(std::vector<AdmissionCandidate> candidates, std::uint64_t capacity, std::uint64_t held,
                    std::size_t batch_limit) {
  std::uint64_t committed = held;
  for (const auto& c : candidates) {
    if (c.sticky) committed += c.kv_tokens;
  }
  std::uint64_t avail = committed >= capacity ? 0 : capacity - committed;

  std::stable_sort(candidates.begin(), candidates.end(), [](const AdmissionCandidate& a, const AdmissionCandidate& b) {
    if (a.forced != b.forced) return a.forced;
    return a.rank < b.rank;
  });

  AdmissionPlan plan;
  for (const auto& c : candidates) {
    if (c.on_host) {
      if (c.kv_tokens <= avail) {
        avail -= c.kv_tokens;
        plan.swap_ins.push_back(c.handle);
      }
      continue;
    }
    if (plan.selected.size() >= batch_limit) {
      if (c.running) plan.evicted.push_back(c.handle);
      continue;
    }
    const std::uint64_t need = c.sticky ? c.growth : c.kv_tokens + c.growth;
    if (need <= avail) {
      avail -= need;
      plan.selected.push_back(c.handle);
    } else if (c.running) {
      plan.evicted.push_back(c.handle);
    }
  }
  return plan;
}

PreemptionDelta preempt(LlmRequest& request, MemoryStrategy strategy, const GpuConfig& gpu) {
  if (!request.resident()) {
    throw LogicError("preempting request " + std::to_string(request.id) + " that is not resident");
  }
  PreemptionDelta delta;
  switch (strategy) {
    case MemoryStrategy::kPreserve:
      break;
    case MemoryStrategy::kDiscardRecompute:
      delta.freed_now = request.kv_tokens;
      delta.recompute_tokens = request.n_input + request.generated;
      request.kv_tokens = 0;
      request.prefill_done = 0;
      request.prefill_target = request.n_input + request.generated;
      request.location = Location::kNone;
      request.phase = Phase::kQueued;
      break;
    case MemoryStrategy::kSwap:
      delta.freed_later = request.kv_tokens;
      delta.transfer_seconds = gpu.swap_seconds(request.kv_tokens);
      request.location = Location::kSwappingOut;
      request.phase = Phase::kSwapped;
      break;
  }
  return delta;
}

LatencyBreakdown request_latency(const LlmRecord& record) {
  LatencyBreakdown out;
  out.t_waiting = record.first_scheduled - record.arrival;
  out.ttft = record.first_token - record.arrival;
  out.decode_time = record.completion - record.first_token;
  out.t_response = record.completion - record.arrival;
  return out;
}

namespace {

enum class Role : std::uint8_t { kBoth, kPrefill, kDecode };

struct Gpu {
  GpuConfig cfg;
  Role role = Role::kBoth;
  std::vector<std::size_t> pool;  // requests assigned here and not done
  std::vector<std::size_t> batch;
  std::vector<std::uint64_t> chunk;  // prefill tokens per batch member, 0 for decode
  bool busy = false;
  std::uint64_t used = 0;  // resident plus in-transfer KV
  std::uint64_t reserved_growth = 0;
  double iteration_length = 0.0;
};

Gpu make_gpu(const GpuConfig& cfg, Role role) {
  Gpu g;
  g.cfg = cfg;
  g.role = role;
  return g;
}

struct Aux {
  int gpu = -1;
  bool running = false;
  bool recomputing = false;
  bool rejected = false;
  bool scheduled = false;
  bool has_first_token = false;
  double first_scheduled = 0.0;
  double first_token = 0.0;
  double idle_since = -1.0;  // resident, not computing, not waiting on an API
  std::uint64_t preemptions = 0;
  MemoryStrategy api_strategy = MemoryStrategy::kPreserve;
};

enum class EvKind : std::uint8_t { kArrival, kIterationEnd, kApiReturn, kSwapOutDone, kSwapInDone, kKvTransferDone };

struct Ev {
  EvKind kind;
  std::size_t index;  // request or GPU
};

class LlmModel {
 public:
  LlmModel(std::vector<LlmRequest> requests, const ClusterOrg& org, const LlmPolicy& policy,
           const Strategies& strategies, const LlmOptions& options)
      : reqs_(std::move(requests)), aux_(reqs_.size()), policy_(policy), strategies_(strategies), options_(options) {
    if (const auto* p = std::get_if<Pooled>(&org)) {
      for (std::size_t g = 0; g < p->gpus; ++g) gpus_.push_back(make_gpu(p->gpu, Role::kBoth));
    } else {
      const auto& d = std::get<Dedicated>(org);
      dedicated_ = true;
      kv_transfer_seconds_per_gb_ = d.kv_transfer_seconds_per_gb;
      for (const auto& c : d.prefill) gpus_.push_back(make_gpu(c, Role::kPrefill));
      for (const auto& c : d.decode) gpus_.push_back(make_gpu(c, Role::kDecode));
    }
  }

  void start(const engine::RunControl& control) {
    control_ = control;
    for (std::size_t i = 0; i < reqs_.size(); ++i) {
      auto& r = reqs_[i];
      if (r.id != i) throw ConfigError("LLM requests must have ids 0..n-1 in arrival order");
      if (i > 0 && r.arrival_time < reqs_[i - 1].arrival_time) {
        throw ConfigError("LLM request arrivals must be nondecreasing");
      }
      r.validate();
      if (policy_.kind != LlmPolicy::Kind::kFifo && !r.predicted_output) {
        throw ConfigError("policy " + policy_.name() + " needs predicted_output on every request");
      }
      r.generated = 0;
      r.prefill_done = 0;
      r.prefill_target = r.n_input;
      r.kv_tokens = 0;
      r.phase = Phase::kQueued;
      r.location = Location::kNone;
      r.next_api = 0;
      if (!fits(r)) {
        aux_[i].rejected = true;
        ++counters_.rejected;
        if (control_.is_measured(r.id)) {
          rejected_ids_.push_back(r.id);
          ++measured_done_;
        }
      }
    }
    for (std::size_t i = 0; i < reqs_.size(); ++i) {
      if (control_.is_measured(i)) ++measured_total_;
    }
    schedule_next_arrival();
  }

  bool step() {
    if (events_.empty()) return false;
    const auto ev = events_.pop();
    const double now = ev.time;
    switch (ev.payload.kind) {
      case EvKind::kArrival:
        on_arrival(ev.payload.index, now);
        break;
      case EvKind::kIterationEnd:
        on_iteration_end(ev.payload.index, now);
        break;
      case EvKind::kApiReturn:
        on_api_return(ev.payload.index, now);
        break;
      case EvKind::kSwapOutDone:
        on_swap_out_done(ev.payload.index, now);
        break;
      case EvKind::kSwapInDone:
        on_swap_in_done(ev.payload.index, now);
        break;
      case EvKind::kKvTransferDone:
        on_kv_transfer_done(ev.payload.index, now);
        break;
    }
    return true;
  }

  bool finished() const {
    if (measured_total_ > 0 && measured_done_ >= measured_total_) return true;
    return next_arrival_ >= reqs_.size() && active_ == 0 && events_.empty();
  }
  double now() const { return events_.now(); }
  std::uint64_t in_system() const { return active_; }

  engine::Records take_records() {
    engine::Records out;
    out.reserve(records_.size());
    for (const auto& r : records_) out.push_back({r.id, r.arrival, r.first_scheduled, r.completion, 0.0});
    return out;
  }

  std::vector<LlmRecord>& records() { return records_; }
  std::vector<std::uint64_t>& rejected_ids() { return rejected_ids_; }
  std::vector<RecomputeEvent>& recompute_events() { return recompute_events_; }
  const LlmCounters& counters() const { return counters_; }
  const MemoryWaste& waste() const { return waste_; }
  std::uint64_t peak_kv() const { return peak_kv_; }

 private:
  bool fits(const LlmRequest& r) const {
    for (const auto& g : gpus_) {
      const std::uint64_t need = g.role == Role::kPrefill ? r.n_input : r.peak_tokens();
      if (need > g.cfg.kv_capacity) return false;
    }
    return true;
  }

  void schedule_next_arrival() {
    while (next_arrival_ < reqs_.size() && aux_[next_arrival_].rejected) ++next_arrival_;
    if (next_arrival_ < reqs_.size()) {
      events_.schedule(std::max(reqs_[next_arrival_].arrival_time, events_.now()), Ev{EvKind::kArrival, next_arrival_});
      ++next_arrival_;
    }
  }

  std::size_t least_loaded(Role role) const {
    std::size_t best = gpus_.size();
    for (std::size_t g = 0; g < gpus_.size(); ++g) {
      if (gpus_[g].role != role) continue;
      if (best == gpus_.size() || gpus_[g].pool.size() < gpus_[best].pool.size()) best = g;
    }
    return best;
  }

  void on_arrival(std::size_t i, double now) {
    schedule_next_arrival();
    ++active_;
    const std::size_t g = least_loaded(dedicated_ ? Role::kPrefill : Role::kBoth);
    aux_[i].gpu = static_cast<int>(g);
    gpus_[g].pool.push_back(i);
    start_iteration(g, now);
  }

  policies::Rank rank_of(const LlmRequest& r) const {
    if (policy_.kind == LlmPolicy::Kind::kFifo) return {0, 0.0, r.id};
    double value = *r.predicted_output - static_cast<double>(r.generated);
    if (policy_.basis == RankBasis::kInputPlusOutput) value += static_cast<double>(r.prefill_remaining());
    return {0, value, r.id};
  }

  bool gate_closed(const LlmRequest& r, const Aux& a, const GpuConfig& cfg, double now) const {
    if (policy_.kind != LlmPolicy::Kind::kTrail || !a.running) return false;
    const double limit = policy_.trail_c * *r.predicted_output;
    if (policy_.trail_age == TrailAge::kTokens) return static_cast<double>(r.generated) >= limit;
    return now - a.first_scheduled >= limit * cfg.tpot;
  }

  static bool eligible(const LlmRequest& r) {
    switch (r.phase) {
      case Phase::kQueued:
      case Phase::kPrefill:
      case Phase::kDecode:
      case Phase::kSwapped:
        break;
      default:
        return false;
    }
    return r.location == Location::kNone || r.location == Location::kGpu || r.location == Location::kHost ||
           r.location == Location::kStaged;
  }

  std::uint64_t growth_of(const LlmRequest& r, const GpuConfig& cfg) const {
    return r.prefill_complete() ? 1 : std::min(cfg.prefill_chunk, r.prefill_remaining());
  }

  void mark_idle(std::size_t i, double now) { aux_[i].idle_since = now; }

  void end_idle(std::size_t i, double now) {
    auto& a = aux_[i];
    if (a.idle_since >= 0.0) {
      waste_.idle_resident += static_cast<double>(reqs_[i].kv_tokens) * (now - a.idle_since);
      a.idle_since = -1.0;
    }
  }

  void record_recompute(std::size_t i, std::uint64_t tokens, double now) {
    const auto& r = reqs_[i];
    ++counters_.discards;
    counters_.recompute_tokens += tokens;
    aux_[i].recomputing = true;
    if (options_.keep_recompute_events) recompute_events_.push_back({r.id, now, r.n_input, r.generated, tokens});
  }

  void apply_preemption(std::size_t g, std::size_t i, MemoryStrategy strategy, double now) {
    auto& gpu = gpus_[g];
    auto& a = aux_[i];
    a.running = false;
    ++a.preemptions;
    ++counters_.preemptions;
    end_idle(i, now);
    const auto delta = preempt(reqs_[i], strategy, gpu.cfg);
    switch (strategy) {
      case MemoryStrategy::kPreserve:
        mark_idle(i, now);
        break;
      case MemoryStrategy::kDiscardRecompute:
        gpu.used -= delta.freed_now;
        record_recompute(i, delta.recompute_tokens, now);
        break;
      case MemoryStrategy::kSwap:
        ++counters_.swap_outs;
        waste_.swap += static_cast<double>(delta.freed_later) * delta.transfer_seconds;
        events_.schedule(now + delta.transfer_seconds, Ev{EvKind::kSwapOutDone, i});
        break;
    }
  }

  void start_iteration(std::size_t g, double now) {
    auto& gpu = gpus_[g];
    if (gpu.busy) return;
    std::vector<AdmissionCandidate> cands;
    AdmissionPlan plan;
    while (true) {
      cands.clear();
      for (std::size_t i : gpu.pool) {
        const auto& r = reqs_[i];
        if (!eligible(r)) continue;
        const auto& a = aux_[i];
        AdmissionCandidate c;
        c.handle = i;
        c.rank = rank_of(r);
        c.resident = r.resident();
        c.running = a.running;
        c.forced = gate_closed(r, a, gpu.cfg, now);
        c.sticky = c.resident && (!a.running || strategies_.preemption != MemoryStrategy::kDiscardRecompute);
        c.kv_tokens = r.kv_tokens;
        c.growth = growth_of(r, gpu.cfg);
        c.on_host = r.location == Location::kHost;
        cands.push_back(c);
      }
      std::uint64_t candidate_kv = 0;
      for (const auto& c : cands) {
        if (c.resident) candidate_kv += c.kv_tokens;
      }
      plan = admit(cands, gpu.cfg.kv_capacity, gpu.used - candidate_kv, gpu.cfg.batch_limit);
      for (std::size_t i : plan.evicted) apply_preemption(g, i, strategies_.preemption, now);
      if (!plan.selected.empty() || !plan.swap_ins.empty() || cands.empty()) break;

      // Nothing fits: memory is pinned by residents that are not computing.
      std::size_t victim = reqs_.size();
      for (const auto& c : cands) {
        if (!c.resident || plan.evicted.end() != std::find(plan.evicted.begin(), plan.evicted.end(), c.handle)) {
          continue;
        }
        if (victim == reqs_.size() || rank_of(reqs_[victim]) < c.rank) victim = c.handle;
      }
      if (victim == reqs_.size()) {
        // Evicted Preserve/Swap requests may still hold memory; retry once they are eligible again.
        bool pinned = false;
        for (std::size_t i : gpu.pool) pinned = pinned || (eligible(reqs_[i]) && reqs_[i].resident());
        if (!pinned) break;
        continue;
      }
      ++counters_.forced_discards;
      aux_[victim].running = false;
      end_idle(victim, now);
      const auto delta = preempt(reqs_[victim], MemoryStrategy::kDiscardRecompute, gpu.cfg);
      gpu.used -= delta.freed_now;
      record_recompute(victim, delta.recompute_tokens, now);
    }

    for (std::size_t i : plan.swap_ins) {
      auto& r = reqs_[i];
      r.location = Location::kSwappingIn;
      gpu.used += r.kv_tokens;
      const double t = gpu.cfg.swap_seconds(r.kv_tokens);
      waste_.swap += static_cast<double>(r.kv_tokens) * t;
      ++counters_.swap_ins;
      events_.schedule(now + t, Ev{EvKind::kSwapInDone, i});
    }

    gpu.batch = plan.selected;
    gpu.chunk.assign(gpu.batch.size(), 0);
    gpu.reserved_growth = 0;
    std::uint64_t prefill_tokens = 0;
    bool has_decode = false;
    for (std::size_t k = 0; k < gpu.batch.size(); ++k) {
      const std::size_t i = gpu.batch[k];
      auto& r = reqs_[i];
      auto& a = aux_[i];
      if (r.location == Location::kStaged) {
        r.location = Location::kGpu;
        gpu.used += r.kv_tokens;
      } else if (r.location == Location::kNone) {
        r.location = Location::kGpu;
        r.phase = Phase::kPrefill;
      }
      end_idle(i, now);
      if (!a.scheduled) {
        a.scheduled = true;
        a.first_scheduled = now;
      }
      a.running = true;
      const std::uint64_t grow = growth_of(r, gpu.cfg);
      gpu.reserved_growth += grow;
      if (r.prefill_complete()) {
        has_decode = true;
      } else {
        gpu.chunk[k] = grow;
        prefill_tokens += grow;
      }
    }
    check_memory(g);
    peak_kv_ = std::max(peak_kv_, gpu.used);
    if (gpu.batch.empty()) return;

    gpu.iteration_length = iteration_duration(gpu.cfg, prefill_tokens, has_decode);
    gpu.busy = true;
    ++counters_.iterations;
    events_.schedule(now + gpu.iteration_length, Ev{EvKind::kIterationEnd, g});
  }

  void on_iteration_end(std::size_t g, double now) {
    auto& gpu = gpus_[g];
    gpu.busy = false;
    gpu.reserved_growth = 0;
    const auto batch = gpu.batch;
    const auto chunk = gpu.chunk;
    gpu.batch.clear();
    gpu.chunk.clear();
    for (std::size_t k = 0; k < batch.size(); ++k) {
      const std::size_t i = batch[k];
      auto& r = reqs_[i];
      auto& a = aux_[i];
      if (chunk[k] > 0) {
        r.prefill_done += chunk[k];
        r.kv_tokens += chunk[k];
        gpu.used += chunk[k];
        peak_kv_ = std::max(peak_kv_, gpu.used);
        counters_.prefill_tokens += chunk[k];
        if (a.recomputing) waste_.recompute += static_cast<double>(r.kv_tokens) * gpu.iteration_length;
        if (r.prefill_complete()) {
          a.recomputing = false;
          r.phase = Phase::kDecode;
          if (!a.has_first_token) {
            a.has_first_token = true;
            a.first_token = now;
          }
          after_progress(g, i, now);
        }
      } else {
        ++r.generated;
        ++r.kv_tokens;
        ++gpu.used;
        peak_kv_ = std::max(peak_kv_, gpu.used);
        ++counters_.decode_steps;
        after_progress(g, i, now);
      }
    }
    check_memory(g);
    start_iteration(g, now);
  }

  // Completion, API call, or hand-off after a request made progress.
  void after_progress(std::size_t g, std::size_t i, double now) {
    auto& r = reqs_[i];
    if (r.generated == r.n_output) {
      complete(g, i, now);
      return;
    }
    if (r.next_api < r.api_calls.size() && r.api_calls[r.next_api].trigger == r.generated) {
      api_event(g, i, now);
      return;
    }
    maybe_hand_off(g, i, now);
  }

  void complete(std::size_t g, std::size_t i, double now) {
    auto& gpu = gpus_[g];
    auto& r = reqs_[i];
    auto& a = aux_[i];
    gpu.used -= r.kv_tokens;
    r.kv_tokens = 0;
    r.location = Location::kNone;
    r.phase = Phase::kDone;
    a.running = false;
    remove_from_pool(g, i);
    --active_;
    if (control_.is_measured(r.id)) {
      ++measured_done_;
      records_.push_back(
          {r.id, r.arrival_time, a.first_scheduled, a.first_token, now, r.n_input, r.n_output, a.preemptions, false});
    }
  }

  void remove_from_pool(std::size_t g, std::size_t i) {
    auto& pool = gpus_[g].pool;
    const auto it = std::find(pool.begin(), pool.end(), i);
    if (it == pool.end()) throw LogicError("request missing from its GPU pool");
    *it = pool.back();
    pool.pop_back();
  }

  void api_event(std::size_t g, std::size_t i, double now) {
    auto& gpu = gpus_[g];
    auto& r = reqs_[i];
    auto& a = aux_[i];
    const auto& call = r.api_calls[r.next_api];
    if (r.generated != call.trigger) throw LogicError("API call fired off its trigger");
    const MemoryStrategy s = call.strategy.value_or(strategies_.api);
    a.api_strategy = s;
    a.running = false;
    r.phase = Phase::kApiWait;
    ++counters_.api_calls;
    switch (s) {
      case MemoryStrategy::kPreserve:
        waste_.api_preserve += static_cast<double>(r.kv_tokens) * call.duration;
        break;
      case MemoryStrategy::kDiscardRecompute: {
        const std::uint64_t tokens = r.n_input + r.generated;
        gpu.used -= r.kv_tokens;
        r.kv_tokens = 0;
        r.prefill_done = 0;
        r.prefill_target = tokens;
        r.location = Location::kNone;
        record_recompute(i, tokens, now);
        break;
      }
      case MemoryStrategy::kSwap: {
        const double t = gpu.cfg.swap_seconds(r.kv_tokens);
        r.location = Location::kSwappingOut;
        waste_.swap += static_cast<double>(r.kv_tokens) * t;
        ++counters_.swap_outs;
        events_.schedule(now + t, Ev{EvKind::kSwapOutDone, i});
        break;
      }
    }
    events_.schedule(now + call.duration, Ev{EvKind::kApiReturn, i});
  }

  void on_api_return(std::size_t i, double now) {
    auto& r = reqs_[i];
    auto& a = aux_[i];
    ++r.next_api;
    const auto g = static_cast<std::size_t>(a.gpu);
    switch (a.api_strategy) {
      case MemoryStrategy::kPreserve:
        r.phase = Phase::kDecode;
        mark_idle(i, now);
        break;
      case MemoryStrategy::kDiscardRecompute:
        r.phase = Phase::kQueued;
        break;
      case MemoryStrategy::kSwap:
        r.phase = Phase::kSwapped;
        break;
    }
    maybe_hand_off(g, i, now);
    start_iteration(g, now);
  }

  void on_swap_out_done(std::size_t i, double now) {
    auto& r = reqs_[i];
    const auto g = static_cast<std::size_t>(aux_[i].gpu);
    r.location = Location::kHost;
    gpus_[g].used -= r.kv_tokens;
    check_memory(g);
    maybe_hand_off(g, i, now);
    start_iteration(g, now);
  }

  void on_swap_in_done(std::size_t i, double now) {
    auto& r = reqs_[i];
    const auto g = static_cast<std::size_t>(aux_[i].gpu);
    r.location = Location::kGpu;
    r.phase = r.prefill_complete() ? Phase::kDecode : Phase::kPrefill;
    mark_idle(i, now);
    start_iteration(g, now);
  }

  // Prefill GPUs pass finished prompts to the least-loaded decode GPU.
  void maybe_hand_off(std::size_t g, std::size_t i, double now) {
    auto& r = reqs_[i];
    if (gpus_[g].role != Role::kPrefill || !r.prefill_complete()) return;
    if (r.phase == Phase::kApiWait || r.phase == Phase::kDone) return;
    if (r.location != Location::kGpu && r.location != Location::kHost) return;
    auto& a = aux_[i];
    end_idle(i, now);
    if (r.location == Location::kGpu) gpus_[g].used -= r.kv_tokens;
    r.location = Location::kNone;
    a.running = false;
    remove_from_pool(g, i);
    a.gpu = -1;
    ++counters_.kv_transfers;
    const double t = gpus_[g].cfg.gigabytes(r.kv_tokens) * kv_transfer_seconds_per_gb_;
    events_.schedule(now + t, Ev{EvKind::kKvTransferDone, i});
  }

  void on_kv_transfer_done(std::size_t i, double now) {
    auto& r = reqs_[i];
    const std::size_t g = least_loaded(Role::kDecode);
    aux_[i].gpu = static_cast<int>(g);
    gpus_[g].pool.push_back(i);
    r.location = Location::kStaged;
    r.phase = Phase::kDecode;
    start_iteration(g, now);
  }

  void check_memory(std::size_t g) const {
    const auto& gpu = gpus_[g];
    if (gpu.used + gpu.reserved_growth > gpu.cfg.kv_capacity) {
      throw LogicError("KV memory exceeded on GPU " + std::to_string(g) + ": " + std::to_string(gpu.used) + " + " +
                       std::to_string(gpu.reserved_growth) + " > " + std::to_string(gpu.cfg.kv_capacity));
    }
    if (!options_.audit) return;
    std::uint64_t recount = 0;
    for (std::size_t i : gpu.pool) {
      const auto& r = reqs_[i];
      if (r.kv_tokens > r.n_input + r.generated) throw LogicError("kv_tokens exceeds n_input + generated");
      if (r.location == Location::kGpu || r.location == Location::kSwappingOut || r.location == Location::kSwappingIn) {
        recount += r.kv_tokens;
      }
      if ((r.phase == Phase::kQueued) && r.kv_tokens != 0) throw LogicError("queued request holds KV");
    }
    if (recount != gpu.used) {
      throw LogicError("KV accounting drift on GPU " + std::to_string(g) + ": tracked " + std::to_string(gpu.used) +
                       ", actual " + std::to_string(recount));
    }
  }

  std::vector<LlmRequest> reqs_;
  std::vector<Aux> aux_;
  std::vector<Gpu> gpus_;
  LlmPolicy policy_;
  Strategies strategies_;
  LlmOptions options_;
  engine::RunControl control_;
  bool dedicated_ = false;
  double kv_transfer_seconds_per_gb_ = 0.0;
  engine::EventQueue<Ev> events_;
  std::size_t next_arrival_ = 0;
  std::uint64_t active_ = 0;
  std::uint64_t measured_total_ = 0;
  std::uint64_t measured_done_ = 0;
  std::uint64_t peak_kv_ = 0;
  std::vector<LlmRecord> records_;
  std::vector<std::uint64_t> rejected_ids_;
  std::vector<RecomputeEvent> recompute_events_;
  LlmCounters counters_;
  MemoryWaste waste_;
};

}  // namespace

LlmResult simulate_llm(std::vector<LlmRequest> workload, const ClusterOrg& org, const LlmPolicy& policy,
                       const Strategies& strategies, const engine::RunControl& control, const LlmOptions& options) {
  validate(org);
  policy.validate();
  LlmModel model(std::move(workload), org, policy, strategies, options);
  engine::run(model, control);

  LlmResult out;
  out.records = std::move(model.records());
  std::sort(out.records.begin(), out.records.end(), [](const LlmRecord& a, const LlmRecord& b) { return a.id < b.id; });
  out.rejected_ids = std::move(model.rejected_ids());
  out.recompute_events = std::move(model.recompute_events());
  out.counters = model.counters();
  out.waste = model.waste();
  out.peak_kv_tokens = model.peak_kv();
  out.end_time = model.now();
  if (!out.records.empty()) {
    std::vector<double> latency;
    std::vector<double> ttft;
    latency.reserve(out.records.size());
    ttft.reserve(out.records.size());
    double first_arrival = out.records.front().arrival;
    double last_completion = 0.0;
    double tokens = 0.0;
    for (const auto& r : out.records) {
      const auto l = request_latency(r);
      latency.push_back(l.t_response);
      ttft.push_back(l.ttft);
      first_arrival = std::min(first_arrival, r.arrival);
      last_completion = std::max(last_completion, r.completion);
      tokens += static_cast<double>(r.n_output);
    }
    const std::size_t batches = std::max<std::size_t>(10, std::min(metrics::kDefaultBatchCount, latency.size()));
    out.latency = metrics::summarize(latency, batches);
    out.ttft = metrics::summarize(ttft, batches);
    const double span = last_completion - first_arrival;
    out.token_throughput = span > 0.0 ? tokens / span : 0.0;
    out.latency.throughput = span > 0.0 ? static_cast<double>(out.records.size()) / span : 0.0;
    out.latency.memory_waste = out.waste.total();
  }
  return out;
}

}  // namespace predq::llm
