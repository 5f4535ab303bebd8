#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "predq/engine/records.hpp"

namespace predq::metrics {

inline constexpr std::size_t kDefaultBatchCount = 32;

struct Metrics {
  std::uint64_t count = 0;
  double mean = 0.0;
  /// 95% half-width, normal approximation over batch means.
  double ci_half_width = 0.0;
  double p50 = 0.0;
  double p90 = 0.0;
  double p99 = 0.0;
  /// Jobs (or tokens) per second over the measured span; 0 if unknown.
  double throughput = 0.0;
  std::optional<double> cost_total;
  std::optional<double> memory_waste;

  /// Mean response plus mean prediction cost per job (External cost model).
  double cost_adjusted_mean() const { return mean + (count ? cost_total.value_or(0.0) / count : 0.0); }
};

/// Summary of values in their natural (arrival) order. Batches are
/// contiguous; fewer values than batches shrinks the batch count.
/// Throws ConfigError on empty input or batch_count < 10.
Metrics summarize(std::span<const double> values, std::size_t batch_count = kDefaultBatchCount);

/// Response-time summary of completion records (sorted by id), with
/// throughput and total charged cost.
Metrics summarize(const engine::Records& records, std::size_t batch_count = kDefaultBatchCount);

/// Exact nearest-rank quantile of an ascending sequence.
double quantile_sorted(std::span<const double> sorted, double p);

struct PairedComparison {
  std::uint64_t count = 0;
  double mean_difference = 0.0;  // mean of (a - b) per job
  double ci_half_width = 0.0;

  bool significant() const { return std::abs(mean_difference) > 3.0 * ci_half_width; }
};

/// Per-job response differences between two runs that used common random
/// numbers. Rejects runs whose job ids or arrival times differ.
PairedComparison paired_compare(const engine::Records& a, const engine::Records& b,
                                std::size_t batch_count = kDefaultBatchCount);

}  // namespace predq::metrics
