#pragma once

#include <cstdint>
#include <vector>

#include "predq/engine/records.hpp"
#include "predq/engine/rng.hpp"
#include "predq/engine/run_control.hpp"
#include "predq/metrics/summary.hpp"
#include "predq/policies/queue_model.hpp"
#include "predq/policies/server.hpp"
#include "predq/workload/prediction.hpp"
#include "predq/workload/service.hpp"

namespace predq::multiserver {

struct ClusterConfig {
  std::size_t n = 1;                // queues
  std::size_t d = 1;                // choices per arrival
  double lambda_per_server = 0.5;   // total arrival rate is n * lambda
  bool preemptive = false;          // per-queue two-class discipline
  workload::ServiceDistribution service = workload::ServiceDistribution::exponential(1.0);
  workload::PredictionModel prediction =
      workload::PredictionModel::one_bit(1.0, workload::PredictionModel::exponential_mean());

  void validate() const;
};

/// Samples d distinct queues uniformly and joins the one holding the fewest
/// jobs (queued or in service) of the arriving job's predicted class; ties
/// go to the lowest queue index. Throws ConfigError when d > n or d == 0.
std::size_t route(workload::SizeClass job_class, std::size_t d, const std::vector<policies::Server>& queues,
                  engine::RngStream& rng);

struct ClusterResult {
  engine::Records records;
  metrics::Metrics metrics;
  policies::QueueRunStats stats;
};

/// Power-of-d supermarket model with 1-bit predicted classes. Routing draws
/// from its own stream, so d never perturbs arrival or size draws.
ClusterResult simulate_cluster(const ClusterConfig& config, const engine::RunControl& control,
                               std::uint64_t seed);

}  // namespace predq::multiserver
