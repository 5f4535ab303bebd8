#include <benchmark/benchmark.h>

#include "predq/llmserve/simulator.hpp"
#include "predq/llmserve/workload.hpp"

using namespace predq;

namespace {

void run_llm(benchmark::State& state, const llm::LlmPolicy& policy, double api_probability) {
  const auto n = static_cast<std::uint64_t>(state.range(0));
  llm::LlmWorkloadConfig wl;
  wl.api_probability = api_probability;
  const llm::GpuConfig gpu;
  wl.arrival_rate = llm::arrival_rate_for_load(0.8, wl.input, wl.output, gpu);
  const auto requests = llm::generate_llm_workload(wl, n, 1);
  engine::RunControl control;
  control.measured_jobs = n;
  control.max_in_system = n + 1;
  for (auto _ : state) {
    auto r = llm::simulate_llm(requests, llm::Pooled{1, gpu}, policy, {}, control, {false, false});
    benchmark::DoNotOptimize(r.records.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_LlmFifo(benchmark::State& s) { run_llm(s, llm::LlmPolicy::fifo(), 0.0); }
void BM_LlmSprpt(benchmark::State& s) { run_llm(s, llm::LlmPolicy::sprpt(), 0.0); }
void BM_LlmTrailApi(benchmark::State& s) { run_llm(s, llm::LlmPolicy::trail(0.5), 0.3); }

}  // namespace

BENCHMARK(BM_LlmFifo)->Arg(5'000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_LlmSprpt)->Arg(5'000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_LlmTrailApi)->Arg(5'000)->Unit(benchmark::kMillisecond);
