#pragma once

#include <string>
#include <variant>
#include <vector>

#include "predq/engine/rng.hpp"

namespace predq::workload {

struct Exponential {
  double mean = 1.0;
};

/// Heavy-tailed Weibull with CDF F(x) = 1 - exp(-sqrt(2x)): mean 1, second
/// moment 6.
struct WeibullHalf {};

struct Deterministic {
  double value = 1.0;
};

/// Resamples uniformly from observed sizes.
struct Empirical {
  std::vector<double> values;
};

struct Moments {
  double mean = 0.0;
  double second_moment = 0.0;
};

class ServiceDistribution {
 public:
  using Variant = std::variant<Exponential, WeibullHalf, Deterministic, Empirical>;

  /// Throws ConfigError on nonpositive parameters or an empty sample set.
  explicit ServiceDistribution(Variant v);

  static ServiceDistribution exponential(double mean = 1.0) { return ServiceDistribution(Exponential{mean}); }
  static ServiceDistribution weibull_half() { return ServiceDistribution(WeibullHalf{}); }
  static ServiceDistribution deterministic(double value) { return ServiceDistribution(Deterministic{value}); }
  static ServiceDistribution empirical(std::vector<double> values) {
    return ServiceDistribution(Empirical{std::move(values)});
  }

  /// Strictly positive draw.
  double sample(engine::RngStream& rng) const;

  const Variant& variant() const { return v_; }
  std::string name() const;

 private:
  Variant v_;
};

/// Exact (mean, second moment). Empirical distributions have no analytic
/// moments; estimate those from the data instead.
Moments moments(const ServiceDistribution& dist);

/// CDF of the heavy-tailed Weibull service distribution.
double weibull_half_cdf(double x);

}  // namespace predq::workload
