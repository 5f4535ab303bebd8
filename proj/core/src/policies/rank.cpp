#include "predq/policies/rank.hpp"

#include <algorithm>
#include <cmath>

#include "predq/error.hpp"

namespace predq::policies {

namespace {
double require_prediction(const JobView& v, const char* policy) {
  if (!v.predicted_size) throw LogicError(std::string(policy) + " requires a predicted size");
  return *v.predicted_size;
}
}  // namespace

Rank rank_fifo(std::uint64_t arrival_seq) { return Rank{0, 0.0, arrival_seq}; }

Rank rank_srpt(const OracleView& v) { return Rank{0, v.true_size - v.age, v.arrival_seq}; }

Rank rank_sjf(const OracleView& v) { return Rank{0, v.true_size, v.arrival_seq}; }

Rank rank_psjf(const OracleView& v) { return Rank{0, v.true_size, v.arrival_seq}; }

Rank rank_sprpt(const JobView& v) {
  const double z = require_prediction(v, "SPRPT");
  return Rank{0, z - v.age, v.arrival_seq};
}

Rank rank_sprpt_bounce(const JobView& v) {
  const double z = require_prediction(v, "SPRPT-bounce");
  return Rank{0, std::min(std::abs(z - v.age), z), v.arrival_seq};
}

Rank rank_spjf(const JobView& v) { return Rank{0, require_prediction(v, "SPJF"), v.arrival_seq}; }

Rank rank_pspjf(const JobView& v) { return Rank{0, require_prediction(v, "PSPJF"), v.arrival_seq}; }

Rank rank_two_class(const JobView& v, const std::optional<OracleView>& oracle, double threshold,
                    bool use_oracle) {
  workload::SizeClass c;
  if (use_oracle) {
    if (!oracle) throw LogicError("THRESHOLD two-class policy requires the true size");
    c = oracle->true_size <= threshold ? workload::SizeClass::kShort : workload::SizeClass::kLong;
  } else {
    if (!v.class_bit) throw LogicError("PREDICTION two-class policy requires a class bit");
    c = *v.class_bit;
  }
  return Rank{static_cast<int>(c), 0.0, v.arrival_seq};
}

}  // namespace predq::policies
