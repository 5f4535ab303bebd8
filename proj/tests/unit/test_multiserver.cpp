#include <doctest.h>

#include <vector>

#include "predq/metrics/summary.hpp"
#include "predq/multiserver/cluster.hpp"
#include "predq/policies/single_queue.hpp"
#include "predq/workload/source.hpp"
#include "support.hpp"

using namespace predq;
using testing::job;
using workload::PredictionModel;
using workload::SizeClass;

namespace {

std::vector<policies::Server> queues(std::size_t n) {
  std::vector<policies::Server> out;
  for (std::size_t i = 0; i < n; ++i) out.emplace_back(policies::RankPolicy::two_class(false, false));
  return out;
}

}  // namespace

TEST_CASE("routing joins the queue with fewer jobs of the same class") {
  auto q = queues(2);
  std::uint64_t id = 0;
  for (int k = 0; k < 2; ++k) q[0].arrive(job(id++, 0.0, 1.0, 1.0, SizeClass::kShort), 0.0);
  q[1].arrive(job(id++, 0.0, 1.0, 1.0, SizeClass::kShort), 0.0);
  // long jobs elsewhere do not count against a short arrival
  for (int k = 0; k < 3; ++k) q[1].arrive(job(id++, 0.0, 1.0, 1.0, SizeClass::kLong), 0.0);
  engine::RngStream rng(1, engine::Stream::kChoice);
  CHECK(multiserver::route(SizeClass::kShort, 2, q, rng) == 1);
  CHECK(multiserver::route(SizeClass::kLong, 2, q, rng) == 0);
}

TEST_CASE("routing ties go to the lowest index") {
  const auto q = queues(5);
  engine::RngStream rng(2, engine::Stream::kChoice);
  CHECK(multiserver::route(SizeClass::kShort, 5, q, rng) == 0);
  for (int i = 0; i < 200; ++i) {
    // with d=2 over empty queues the winner is the smaller of the two sampled
    CHECK(multiserver::route(SizeClass::kLong, 2, q, rng) < 4);
  }
}

TEST_CASE("routing rejects impossible choice counts") {
  const auto q = queues(3);
  engine::RngStream rng(3, engine::Stream::kChoice);
  CHECK_THROWS_AS(multiserver::route(SizeClass::kShort, 4, q, rng), ConfigError);
  CHECK_THROWS_AS(multiserver::route(SizeClass::kShort, 0, q, rng), ConfigError);
  multiserver::ClusterConfig cfg;
  cfg.n = 3;
  cfg.d = 4;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg.d = 2;
  cfg.prediction = PredictionModel::exact();
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("one choice routes uniformly") {
  const auto q = queues(4);
  engine::RngStream rng(4, engine::Stream::kChoice);
  std::vector<int> hits(4, 0);
  const int n = 40000;
  for (int i = 0; i < n; ++i) ++hits[multiserver::route(SizeClass::kShort, 1, q, rng)];
  for (int h : hits) CHECK(std::abs(h - n / 4) < 4 * 87);  // sd = sqrt(n p (1-p)) ~ 87
}

TEST_CASE("one queue reduces to the single-server two-class policy") {
  multiserver::ClusterConfig cfg;
  cfg.n = 1;
  cfg.d = 1;
  cfg.lambda_per_server = 0.8;
  const auto ctl = testing::control(100000, 10000);
  for (bool preemptive : {false, true}) {
    cfg.preemptive = preemptive;
    const auto cluster = multiserver::simulate_cluster(cfg, ctl, 41);
    workload::PoissonJobGenerator source(0.8, cfg.service, cfg.prediction, 41);
    const auto single = policies::simulate_single_queue(source, policies::RankPolicy::two_class(preemptive, false), ctl);
    CHECK(cluster.records == single.records);
  }
}

TEST_CASE("routing randomness leaves arrivals untouched") {
  multiserver::ClusterConfig cfg;
  cfg.n = 10;
  cfg.lambda_per_server = 0.7;
  const auto ctl = testing::control(20000);
  cfg.d = 1;
  const auto a = multiserver::simulate_cluster(cfg, ctl, 5);
  cfg.d = 3;
  const auto b = multiserver::simulate_cluster(cfg, ctl, 5);
  REQUIRE(a.records.size() == b.records.size());
  for (std::size_t i = 0; i < a.records.size(); ++i) CHECK(a.records[i].arrival == b.records[i].arrival);
  CHECK(a.stats.arrivals >= a.stats.departures);
  CHECK(a.metrics.mean > b.metrics.mean);
}

TEST_CASE("jobs are conserved and never migrate") {
  multiserver::ClusterConfig cfg;
  cfg.n = 8;
  cfg.d = 2;
  cfg.lambda_per_server = 0.85;
  const auto res = multiserver::simulate_cluster(cfg, testing::control(50000, 5000), 6);
  CHECK(res.records.size() == 50000);
  CHECK(res.stats.arrivals >= res.stats.departures);
  // each server worked only on jobs it received, so total work is conserved
  CHECK(res.stats.busy_time >= res.stats.completed_work - 1e-6);
  CHECK(res.stats.preemptions == 0);
}

TEST_CASE("oracle classes route no worse than noisy ones") {
  multiserver::ClusterConfig cfg;
  cfg.n = 20;
  cfg.d = 2;
  cfg.lambda_per_server = 0.9;
  const auto ctl = testing::control(300000, 30000);
  cfg.prediction = PredictionModel::one_bit(1.0, PredictionModel::exact());
  const auto oracle = multiserver::simulate_cluster(cfg, ctl, 7);
  cfg.prediction = PredictionModel::one_bit(1.0, PredictionModel::exponential_mean());
  const auto noisy = multiserver::simulate_cluster(cfg, ctl, 7);
  const auto cmp = metrics::paired_compare(oracle.records, noisy.records);
  CHECK(cmp.mean_difference < 3.0 * cmp.ci_half_width);
}
