#include <benchmark/benchmark.h>

#include "predq/analytic/formulas.hpp"

using namespace predq;

namespace {

void BM_BesselK1(benchmark::State& state) {
  double x = 0.1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(analytic::bessel_k(1, x));
    x = x < 20.0 ? x * 1.01 : 0.1;
  }
}

void BM_OnebitT2(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(analytic::onebit_t2(0.8, 1.5).mean_response);
}

void BM_OnebitOptimum(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(analytic::optimal_onebit_threshold(0.9).threshold);
}

}  // namespace

BENCHMARK(BM_BesselK1);
BENCHMARK(BM_OnebitT2);
BENCHMARK(BM_OnebitOptimum)->Unit(benchmark::kMicrosecond);
