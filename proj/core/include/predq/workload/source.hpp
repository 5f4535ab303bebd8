#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "predq/engine/rng.hpp"
#include "predq/workload/job.hpp"
#include "predq/workload/prediction.hpp"
#include "predq/workload/service.hpp"

namespace predq::workload {

/// Draws one job. Service and prediction consume separate streams so that a
/// change of prediction model leaves arrival and size draws untouched.
JobSpec sample_job(std::uint64_t id, double arrival_time, const ServiceDistribution& service,
                   const PredictionModel& prediction, engine::RngStream& service_rng,
                   engine::RngStream& prediction_rng);

/// Produces jobs in arrival order.
class JobSource {
 public:
  virtual ~JobSource() = default;
  /// Next job, or nullopt once the source is exhausted.
  virtual std::optional<JobSpec> next() = 0;
};

/// Poisson arrivals with i.i.d. sizes and predictions.
class PoissonJobGenerator final : public JobSource {
 public:
  PoissonJobGenerator(double rate, ServiceDistribution service, PredictionModel prediction,
                      std::uint64_t seed);

  std::optional<JobSpec> next() override;

  double rate() const { return rate_; }

 private:
  double rate_;
  ServiceDistribution service_;
  PredictionModel prediction_;
  engine::RngStream arrivals_rng_;
  engine::RngStream service_rng_;
  engine::RngStream prediction_rng_;
  double clock_ = 0.0;
  std::uint64_t next_id_ = 0;
};

/// Replays a fixed job list.
class TraceJobSource final : public JobSource {
 public:
  explicit TraceJobSource(std::vector<JobSpec> jobs) : jobs_(std::move(jobs)) {}

  std::optional<JobSpec> next() override {
    if (pos_ >= jobs_.size()) return std::nullopt;
    return jobs_[pos_++];
  }

 private:
  std::vector<JobSpec> jobs_;
  std::size_t pos_ = 0;
};

/// Reads a CSV trace with header `arrival_time,true_size[,predicted_size][,class_bit]`.
/// Jobs are numbered in file order. Throws TraceError naming the line on
/// malformed rows, nonpositive sizes or decreasing arrival times.
std::vector<JobSpec> load_trace(const std::filesystem::path& path);

/// Offered load of Poisson arrivals at `rate` with the given service.
double offered_load(double rate, const ServiceDistribution& service);

}  // namespace predq::workload
