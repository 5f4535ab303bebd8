#include <benchmark/benchmark.h>

#include "predq/multiserver/cluster.hpp"
#include "predq/policies/single_queue.hpp"
#include "predq/workload/source.hpp"

using namespace predq;

namespace {

engine::RunControl control(std::uint64_t jobs) {
  engine::RunControl c;
  c.measured_jobs = jobs;
  c.max_in_system = 1'000'000;
  return c;
}

void run_policy(benchmark::State& state, const policies::RankPolicy& policy, const workload::PredictionModel& pred) {
  const auto jobs = static_cast<std::uint64_t>(state.range(0));
  for (auto _ : state) {
    workload::PoissonJobGenerator source(0.9, workload::ServiceDistribution::exponential(), pred, 1);
    auto r = policies::simulate_single_queue(source, policy, control(jobs));
    benchmark::DoNotOptimize(r.records.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_Fifo(benchmark::State& s) { run_policy(s, policies::RankPolicy::fifo(), workload::PredictionModel::exact()); }
void BM_Srpt(benchmark::State& s) { run_policy(s, policies::RankPolicy::srpt(), workload::PredictionModel::exact()); }
void BM_Sprpt(benchmark::State& s) {
  run_policy(s, policies::RankPolicy::sprpt(), workload::PredictionModel::exponential_mean());
}
void BM_Bounce(benchmark::State& s) {
  run_policy(s, policies::RankPolicy::sprpt_bounce(), workload::PredictionModel::exponential_mean());
}
void BM_TwoClass(benchmark::State& s) {
  run_policy(s, policies::RankPolicy::two_class(true, false),
             workload::PredictionModel::one_bit(1.0, workload::PredictionModel::exponential_mean()));
}

void BM_Cluster(benchmark::State& state) {
  multiserver::ClusterConfig cfg;
  cfg.n = 100;
  cfg.d = 2;
  cfg.lambda_per_server = 0.9;
  for (auto _ : state) {
    auto r = multiserver::simulate_cluster(cfg, control(static_cast<std::uint64_t>(state.range(0))), 1);
    benchmark::DoNotOptimize(r.records.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_Fifo)->Arg(100'000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Srpt)->Arg(100'000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Sprpt)->Arg(100'000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Bounce)->Arg(100'000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_TwoClass)->Arg(100'000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Cluster)->Arg(100'000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
