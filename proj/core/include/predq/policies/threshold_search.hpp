#pragma once

#include <cstdint>
#include <functional>

#include "predq/engine/run_control.hpp"
#include "predq/metrics/summary.hpp"

namespace predq::policies {

/// Simulated mean response as a function of threshold T. Must be
/// deterministic in (T, control, seed).
using ThresholdObjective =
    std::function<metrics::Metrics(double threshold, const engine::RunControl& control, std::uint64_t seed)>;

struct ThresholdSearchOptions {
  double lo = 0.01;
  double hi = 10.0;
  engine::RunControl probe{10'000, 100'000, std::nullopt, 100'000};
  engine::RunControl final_run{100'000, 1'000'000, std::nullopt, 100'000};
  /// Bracket width in ln(T) at which the search stops.
  double log_tolerance = 0.02;
};

struct ThresholdSearchResult {
  double threshold = 0.0;
  metrics::Metrics metrics;  // from the final run at `threshold`
  int probes = 0;
};

/// Golden-section search over ln(T) on [lo, hi]. Every probe reuses `seed`
/// (common random numbers); the final run uses an independent seed so the
/// reported mean carries no selection bias.
ThresholdSearchResult optimize_threshold(const ThresholdObjective& objective,
                                         const ThresholdSearchOptions& options, std::uint64_t seed);

}  // namespace predq::policies
