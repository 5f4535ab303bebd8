#pragma once

#include <algorithm>
#include <concepts>
#include <cstdint>
#include <string>

#include "predq/engine/records.hpp"
#include "predq/engine/run_control.hpp"
#include "predq/error.hpp"

namespace predq::engine {

/// A model the driver can advance one event at a time.
template <typename M>
concept SimulationModel = requires(M m, const M cm, const RunControl& control) {
  { m.start(control) };
  { m.step() } -> std::same_as<bool>;  // false once no events remain
  { cm.finished() } -> std::same_as<bool>;
  { cm.now() } -> std::convertible_to<double>;
  { cm.in_system() } -> std::convertible_to<std::uint64_t>;
  { m.take_records() } -> std::same_as<Records>;
};

/// Drives `model` until every measured job has departed or no events remain.
/// Returns measured completion records sorted by job id (arrival order).
template <SimulationModel M>
Records run(M& model, const RunControl& control) {
  control.validate();
  model.start(control);
  while (!model.finished() && model.step()) {
    if (control.max_sim_time && model.now() > *control.max_sim_time) {
      throw NonTerminationError("simulated time cap " + std::to_string(*control.max_sim_time) +
                                " reached before measured jobs completed");
    }
    if (model.in_system() > control.max_in_system) {
      throw InstabilityError("jobs in system exceeded " + std::to_string(control.max_in_system) +
                             " at t=" + std::to_string(model.now()) + "; queue grows without bound");
    }
  }
  Records records = model.take_records();
  std::sort(records.begin(), records.end(),
            [](const CompletionRecord& a, const CompletionRecord& b) { return a.id < b.id; });
  return records;
}

}  // namespace predq::engine
