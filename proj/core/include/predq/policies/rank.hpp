#pragma once

#include <cstdint>
#include <optional>

#include "predq/workload/prediction.hpp"

namespace predq::policies {

/// Priority of a job; lower is served first. Ordered by level, then value,
/// then arrival sequence (FCFS among equals).
struct Rank {
  int level = 0;
  double value = 0.0;
  std::uint64_t tiebreak = 0;

  friend bool operator<(const Rank& a, const Rank& b) {
    if (a.level != b.level) return a.level < b.level;
    if (a.value != b.value) return a.value < b.value;
    return a.tiebreak < b.tiebreak;
  }
  friend bool operator==(const Rank&, const Rank&) = default;
};

/// Where a job stands in a cost-aware prediction pipeline.
enum class PipelineStage : std::uint8_t {
  kAwaitingCheapPrediction,
  kAwaitingFullPrediction,
  kReady,
};

/// What a prediction-based policy may see about a job. The true size is
/// deliberately absent.
struct JobView {
  std::optional<double> predicted_size;
  std::optional<workload::SizeClass> class_bit;
  double age = 0.0;
  PipelineStage stage = PipelineStage::kReady;
  std::uint64_t arrival_seq = 0;
};

/// What a size-aware (oracle) policy sees.
struct OracleView {
  double true_size = 0.0;
  double age = 0.0;
  std::uint64_t arrival_seq = 0;
};

Rank rank_fifo(std::uint64_t arrival_seq);

Rank rank_srpt(const OracleView& v);
Rank rank_sjf(const OracleView& v);
Rank rank_psjf(const OracleView& v);

// The prediction-based ranks throw LogicError when no prediction is present.

/// Predicted remaining size z - a; may go negative once the job outlives its
/// estimate, at which point nothing can preempt it.
Rank rank_sprpt(const JobView& v);
/// min(|z - a|, z): down from z to 0 at a = z, back up to z at a = 2z, flat after.
Rank rank_sprpt_bounce(const JobView& v);
Rank rank_spjf(const JobView& v);
Rank rank_pspjf(const JobView& v);

/// Short jobs at level 0, long at level 1, FIFO within a class. With
/// `oracle` set the class is true_size <= threshold; otherwise the view's
/// class bit is used.
Rank rank_two_class(const JobView& v, const std::optional<OracleView>& oracle, double threshold,
                    bool use_oracle);

}  // namespace predq::policies
