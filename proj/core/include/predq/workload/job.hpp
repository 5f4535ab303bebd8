#pragma once

#include <cstdint>
#include <optional>

#include "predq/workload/prediction.hpp"

namespace predq::workload {

/// One queueing job: arrival time, true size and what the predictor says.
struct JobSpec {
  std::uint64_t id = 0;
  double arrival_time = 0.0;
  double true_size = 1.0;
  std::optional<double> predicted_size;
  std::optional<SizeClass> class_bit;

  friend bool operator==(const JobSpec&, const JobSpec&) = default;
};

}  // namespace predq::workload
