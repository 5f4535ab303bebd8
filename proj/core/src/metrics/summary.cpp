#include "predq/metrics/summary.hpp"

#include <algorithm>
#include <cmath>

#include "predq/error.hpp"

namespace predq::metrics {

namespace {

constexpr double kZ95 = 1.959963984540054;

double batch_means_half_width(std::span<const double> values, std::size_t batch_count) {
  const std::size_t n = values.size();
  const std::size_t batches = std::min(batch_count, n);
  if (batches < 2) return 0.0;
  std::vector<double> means(batches);
  for (std::size_t b = 0; b < batches; ++b) {
    const std::size_t lo = b * n / batches;
    const std::size_t hi = (b + 1) * n / batches;
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += values[i];
    means[b] = s / static_cast<double>(hi - lo);
  }
  double m = 0.0;
  for (double x : means) m += x;
  m /= static_cast<double>(batches);
  double ss = 0.0;
  for (double x : means) ss += (x - m) * (x - m);
  const double var = ss / static_cast<double>(batches - 1);
  return kZ95 * std::sqrt(var / static_cast<double>(batches));
}

}  // namespace

double quantile_sorted(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw ConfigError("quantile of an empty sequence");
  const double n = static_cast<double>(sorted.size());
  auto rank = static_cast<std::size_t>(std::ceil(p * n));
  rank = std::clamp<std::size_t>(rank, 1, sorted.size());
  return sorted[rank - 1];
}

Metrics summarize(std::span<const double> values, std::size_t batch_count) {
  if (values.empty()) throw ConfigError("cannot summarize an empty record set");
  if (batch_count < 10) throw ConfigError("batch_count must be >= 10");
  Metrics m;
  m.count = values.size();
  double s = 0.0;
  for (double v : values) s += v;
  m.mean = s / static_cast<double>(values.size());
  m.ci_half_width = batch_means_half_width(values, batch_count);
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  m.p50 = quantile_sorted(sorted, 0.50);
  m.p90 = quantile_sorted(sorted, 0.90);
  m.p99 = quantile_sorted(sorted, 0.99);
  return m;
}

Metrics summarize(const engine::Records& records, std::size_t batch_count) {
  if (records.empty()) throw ConfigError("cannot summarize an empty record set");
  std::vector<double> responses;
  responses.reserve(records.size());
  double cost = 0.0;
  double first_arrival = records.front().arrival;
  double last_completion = records.front().completion;
  for (const auto& r : records) {
    responses.push_back(r.response());
    cost += r.cost;
    first_arrival = std::min(first_arrival, r.arrival);
    last_completion = std::max(last_completion, r.completion);
  }
  Metrics m = summarize(responses, batch_count);
  const double span = last_completion - first_arrival;
  m.throughput = span > 0.0 ? static_cast<double>(records.size()) / span : 0.0;
  m.cost_total = cost;
  return m;
}

PairedComparison paired_compare(const engine::Records& a, const engine::Records& b,
                                std::size_t batch_count) {
  if (a.size() != b.size()) {
    throw ConfigError("paired comparison needs equal job counts (" + std::to_string(a.size()) + " vs " +
                      std::to_string(b.size()) + ")");
  }
  if (a.empty()) throw ConfigError("paired comparison of empty record sets");
  std::vector<double> diffs;
  diffs.reserve(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].id != b[i].id || a[i].arrival != b[i].arrival) {
      throw ConfigError("paired comparison rejected: runs do not share arrival streams (job " +
                        std::to_string(a[i].id) + ")");
    }
    diffs.push_back(a[i].response() - b[i].response());
  }
  const Metrics m = summarize(diffs, batch_count);
  return PairedComparison{m.count, m.mean, m.ci_half_width};
}

}  // namespace predq::metrics
