#include "predq/policies/threshold_search.hpp"

#include <cmath>

#include "predq/analytic/golden_section.hpp"
#include "predq/error.hpp"

namespace predq::policies {

ThresholdSearchResult optimize_threshold(const ThresholdObjective& objective,
                                         const ThresholdSearchOptions& options, std::uint64_t seed) {
  if (!(options.lo > 0.0 && options.hi > options.lo)) throw ConfigError("threshold search needs 0 < lo < hi");
  const auto f = [&](double log_t) { return objective(std::exp(log_t), options.probe, seed).mean; };
  const auto best =
      analytic::golden_section_minimize(f, std::log(options.lo), std::log(options.hi), options.log_tolerance);
  ThresholdSearchResult result;
  result.threshold = std::exp(best.x);
  result.probes = best.evaluations;
  const std::uint64_t final_seed = seed ^ 0x5DEECE66DULL;
  result.metrics = objective(result.threshold, options.final_run, final_seed);
  return result;
}

}  // namespace predq::policies
