#include "predq/policies/stability.hpp"

#include <string>

#include "predq/engine/rng.hpp"
#include "predq/error.hpp"

namespace predq::policies {

namespace {
constexpr std::uint64_t kEstimateSeed = 0x5EEDu;
}

double offered_load(double rate, const workload::ServiceDistribution& service,
                    const workload::PredictionModel& prediction, const RankPolicy& policy, std::size_t samples) {
  if (!(rate > 0.0)) throw ConfigError("arrival rate must be > 0");
  if (samples == 0) throw ConfigError("offered_load needs at least one sample");

  const CostModel& cost = policy.cost();
  const bool server_time = policy.has_cost_model() && cost.kind == CostModel::Kind::kServerTime;

  double mean_size = 0.0;
  bool have_mean = true;
  try {
    mean_size = workload::moments(service).mean;
  } catch (const DomainError&) {
    have_mean = false;
  }
  if (have_mean && !server_time) return rate * mean_size;

  engine::RngStream sizes(kEstimateSeed, engine::Stream::kService);
  engine::RngStream preds(kEstimateSeed, engine::Stream::kPrediction);
  double size_sum = 0.0;
  std::size_t full = 0;
  for (std::size_t i = 0; i < samples; ++i) {
    const double x = service.sample(sizes);
    size_sum += x;
    if (!server_time) continue;
    if (policy.kind() == PolicyKind::kSkipPredict) {
      const auto p = prediction.predict(x, preds);
      const bool is_long = p.class_bit ? *p.class_bit == workload::SizeClass::kLong
                                       : p.predicted_size > policy.threshold();
      full += is_long ? 1 : 0;
    } else if (x > policy.limit()) {
      full += 1;
    }
  }
  const double n = static_cast<double>(samples);
  if (!have_mean) mean_size = size_sum / n;
  double demand = mean_size;
  if (server_time) {
    if (policy.kind() == PolicyKind::kSkipPredict) demand += cost.cheap;
    demand += cost.full * static_cast<double>(full) / n;
  }
  return rate * demand;
}

void require_stable(double rate, const workload::ServiceDistribution& service,
                    const workload::PredictionModel& prediction, const RankPolicy& policy) {
  const double load = offered_load(rate, service, prediction, policy);
  if (load >= 1.0) {
    throw InstabilityError("offered load " + std::to_string(load) + " >= 1 for " + policy.name() +
                           "; the queue grows without bound");
  }
}

}  // namespace predq::policies
