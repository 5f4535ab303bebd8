#pragma once

#include <cstdint>
#include <optional>

#include "predq/error.hpp"

namespace predq::engine {

/// Run length and warm-up. Warm-up is counted in jobs: the first
/// `warmup_jobs` arrivals are simulated but never recorded.
struct RunControl {
  std::uint64_t warmup_jobs = 0;
  std::uint64_t measured_jobs = 1;
  std::optional<double> max_sim_time;
  // Jobs simultaneously present beyond this count are taken as evidence of
  // an unstable system.
  std::uint64_t max_in_system = 100000;

  void validate() const {
    if (measured_jobs < 1) throw ConfigError("measured_jobs must be >= 1");
    if (max_sim_time && !(*max_sim_time > 0.0)) throw ConfigError("max_sim_time must be > 0");
    if (max_in_system < 1) throw ConfigError("max_in_system must be >= 1");
  }

  bool is_measured(std::uint64_t job_id) const {
    return job_id >= warmup_jobs && job_id < warmup_jobs + measured_jobs;
  }

  std::uint64_t total_jobs() const { return warmup_jobs + measured_jobs; }
};

}  // namespace predq::engine
