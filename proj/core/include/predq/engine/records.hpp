#pragma once

#include <cstdint>
#include <vector>

namespace predq::engine {

/// One completed, measured job.
struct CompletionRecord {
  std::uint64_t id = 0;
  double arrival = 0.0;
  double first_service = 0.0;
  double completion = 0.0;
  double cost = 0.0;  // prediction cost charged to this job

  double response() const { return completion - arrival; }

  friend bool operator==(const CompletionRecord&, const CompletionRecord&) = default;
};

using Records = std::vector<CompletionRecord>;

}  // namespace predq::engine
