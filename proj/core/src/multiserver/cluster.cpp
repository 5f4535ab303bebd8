#include "predq/multiserver/cluster.hpp"

#include <algorithm>

#include "predq/engine/simulation.hpp"
#include "predq/error.hpp"
#include "predq/workload/source.hpp"

namespace predq::multiserver {

void ClusterConfig::validate() const {
  if (n < 1) throw ConfigError("cluster needs n >= 1 queues");
  if (d < 1 || d > n) throw ConfigError("power-of-d needs 1 <= d <= n");
  if (!(lambda_per_server > 0.0)) throw ConfigError("per-server arrival rate must be > 0");
  if (prediction.kind() != workload::PredictionModel::Kind::kOneBit) {
    throw ConfigError("cluster routing needs a one-bit prediction model");
  }
}

std::size_t route(workload::SizeClass job_class, std::size_t d, const std::vector<policies::Server>& queues,
                  engine::RngStream& rng) {
  const std::size_t n = queues.size();
  if (d < 1 || d > n) throw ConfigError("route: need 1 <= d <= n (d=" + std::to_string(d) + ", n=" + std::to_string(n) + ")");
  std::size_t best = n;
  std::size_t best_count = 0;
  auto consider = [&](std::size_t q) {
    const std::size_t c = queues[q].count(job_class);
    if (best == n || c < best_count || (c == best_count && q < best)) {
      best = q;
      best_count = c;
    }
  };
  if (d == n) {
    for (std::size_t q = 0; q < n; ++q) consider(q);
    return best;
  }
  // d distinct indices by rejection; d is small relative to n in practice
  std::vector<std::size_t> sample;
  sample.reserve(d);
  while (sample.size() < d) {
    const std::size_t q = rng.index(n);
    if (std::find(sample.begin(), sample.end(), q) != sample.end()) continue;
    sample.push_back(q);
    consider(q);
  }
  return best;
}

ClusterResult simulate_cluster(const ClusterConfig& config, const engine::RunControl& control,
                               std::uint64_t seed) {
  config.validate();
  workload::PoissonJobGenerator source(config.lambda_per_server * static_cast<double>(config.n), config.service,
                                       config.prediction, seed);
  std::vector<policies::Server> servers;
  servers.reserve(config.n);
  for (std::size_t i = 0; i < config.n; ++i) {
    servers.emplace_back(policies::RankPolicy::two_class(config.preemptive, false));
  }
  engine::RngStream choice_rng(seed, engine::Stream::kChoice);
  const std::size_t d = config.d;
  policies::QueueModel::Router router;
  if (config.n > 1) {
    router = [&choice_rng, d](const workload::JobSpec& job, const std::vector<policies::Server>& queues) {
      return route(*job.class_bit, d, queues, choice_rng);
    };
  }
  policies::QueueModel model(source, std::move(servers), router);
  ClusterResult result;
  result.records = engine::run(model, control);
  result.stats = model.stats();
  if (!result.records.empty()) result.metrics = metrics::summarize(result.records);
  return result;
}

}  // namespace predq::multiserver
