#include "predq/workload/source.hpp"

#include <fstream>
#include <string>

#include "detail/csv.hpp"
#include "predq/error.hpp"

namespace predq::workload {

JobSpec sample_job(std::uint64_t id, double arrival_time, const ServiceDistribution& service,
                   const PredictionModel& prediction, engine::RngStream& service_rng,
                   engine::RngStream& prediction_rng) {
  JobSpec job;
  job.id = id;
  job.arrival_time = arrival_time;
  job.true_size = service.sample(service_rng);
  const Prediction p = prediction.predict(job.true_size, prediction_rng);
  job.predicted_size = p.predicted_size;
  job.class_bit = p.class_bit;
  return job;
}

PoissonJobGenerator::PoissonJobGenerator(double rate, ServiceDistribution service,
                                         PredictionModel prediction, std::uint64_t seed)
    : rate_(rate),
      service_(std::move(service)),
      prediction_(std::move(prediction)),
      arrivals_rng_(seed, engine::Stream::kArrivals),
      service_rng_(seed, engine::Stream::kService),
      prediction_rng_(seed, engine::Stream::kPrediction) {
  if (!(rate > 0.0)) throw ConfigError("arrival rate must be > 0");
}

std::optional<JobSpec> PoissonJobGenerator::next() {
  clock_ += arrivals_rng_.exponential(1.0 / rate_);
  return sample_job(next_id_++, clock_, service_, prediction_, service_rng_, prediction_rng_);
}

std::vector<JobSpec> load_trace(const std::filesystem::path& path) {
  std::ifstream in(path);
  const std::string name = path.string();
  if (!in) throw TraceError(name, 0, "cannot open trace file");

  std::string line;
  std::size_t line_no = 0;
  int col_arrival = -1, col_size = -1, col_pred = -1, col_class = -1;
  std::size_t width = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!detail::trim(line).empty()) break;
  }
  if (line_no == 0 || detail::trim(line).empty()) throw TraceError(name, line_no, "missing header");
  {
    const auto header = detail::split(line, ',');
    width = header.size();
    col_arrival = detail::column_index(header, "arrival_time");
    col_size = detail::column_index(header, "true_size");
    col_pred = detail::column_index(header, "predicted_size");
    col_class = detail::column_index(header, "class_bit");
    if (col_arrival < 0 || col_size < 0) {
      throw TraceError(name, line_no, "header must contain arrival_time and true_size");
    }
  }

  std::vector<JobSpec> jobs;
  double last_arrival = 0.0;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    const auto cells = detail::split(line, ',');
    if (cells.size() != width) {
      throw TraceError(name, line_no, "expected " + std::to_string(width) + " columns, found " +
                                          std::to_string(cells.size()));
    }
    JobSpec job;
    job.id = jobs.size();
    const auto arrival = detail::parse_double(cells[col_arrival]);
    if (!arrival || *arrival < 0.0) throw TraceError(name, line_no, "invalid arrival_time");
    if (!jobs.empty() && *arrival < last_arrival) {
      throw TraceError(name, line_no, "arrival_time decreases");
    }
    const auto size = detail::parse_double(cells[col_size]);
    if (!size) throw TraceError(name, line_no, "invalid true_size");
    if (!(*size > 0.0)) throw TraceError(name, line_no, "true_size must be > 0");
    job.arrival_time = *arrival;
    job.true_size = *size;
    if (col_pred >= 0 && !cells[col_pred].empty()) {
      const auto pred = detail::parse_double(cells[col_pred]);
      if (!pred) throw TraceError(name, line_no, "invalid predicted_size");
      if (!(*pred > 0.0)) throw TraceError(name, line_no, "predicted_size must be > 0");
      job.predicted_size = *pred;
    }
    if (col_class >= 0 && !cells[col_class].empty()) {
      if (cells[col_class] == "S") {
        job.class_bit = SizeClass::kShort;
      } else if (cells[col_class] == "L") {
        job.class_bit = SizeClass::kLong;
      } else {
        throw TraceError(name, line_no, "class_bit must be S or L");
      }
    }
    last_arrival = job.arrival_time;
    jobs.push_back(job);
  }
  return jobs;
}

double offered_load(double rate, const ServiceDistribution& service) {
  return rate * moments(service).mean;
}

}  // namespace predq::workload
