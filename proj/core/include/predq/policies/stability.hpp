#pragma once

#include <cstddef>

#include "predq/policies/policy.hpp"
#include "predq/workload/prediction.hpp"
#include "predq/workload/service.hpp"

namespace predq::policies {

/// Fraction of server time demanded by Poisson arrivals at `rate`, including
/// predictions that run on the server. Class and limit probabilities are
/// estimated from `samples` draws on a fixed stream.
double offered_load(double rate, const workload::ServiceDistribution& service,
                    const workload::PredictionModel& prediction, const RankPolicy& policy,
                    std::size_t samples = 1'000'000);

/// Throws InstabilityError when the offered load is 1 or more.
void require_stable(double rate, const workload::ServiceDistribution& service,
                    const workload::PredictionModel& prediction, const RankPolicy& policy);

}  // namespace predq::policies
