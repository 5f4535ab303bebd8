#include "predq/workload/service.hpp"

#include <cmath>

#include "predq/error.hpp"

namespace predq::workload {

namespace {
template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;
}  // namespace

ServiceDistribution::ServiceDistribution(Variant v) : v_(std::move(v)) {
  std::visit(Overloaded{
                 [](const Exponential& e) {
                   if (!(e.mean > 0.0)) throw ConfigError("exponential service mean must be > 0");
                 },
                 [](const WeibullHalf&) {},
                 [](const Deterministic& d) {
                   if (!(d.value > 0.0)) throw ConfigError("deterministic service value must be > 0");
                 },
                 [](const Empirical& e) {
                   if (e.values.empty()) throw ConfigError("empirical service needs at least one value");
                   for (double x : e.values) {
                     if (!(x > 0.0)) throw ConfigError("empirical service values must be > 0");
                   }
                 },
             },
             v_);
}

double ServiceDistribution::sample(engine::RngStream& rng) const {
  return std::visit(Overloaded{
                        [&](const Exponential& e) { return rng.exponential(e.mean); },
                        [&](const WeibullHalf&) {
                          // inverse CDF: u = exp(-sqrt(2x))  =>  x = (ln u)^2 / 2
                          const double l = std::log(rng.uniform01());
                          return 0.5 * l * l;
                        },
                        [](const Deterministic& d) { return d.value; },
                        [&](const Empirical& e) { return e.values[rng.index(e.values.size())]; },
                    },
                    v_);
}

std::string ServiceDistribution::name() const {
  return std::visit(Overloaded{
                        [](const Exponential&) { return std::string("exponential"); },
                        [](const WeibullHalf&) { return std::string("weibull"); },
                        [](const Deterministic&) { return std::string("deterministic"); },
                        [](const Empirical&) { return std::string("empirical"); },
                    },
                    v_);
}

Moments moments(const ServiceDistribution& dist) {
  return std::visit(Overloaded{
                        [](const Exponential& e) { return Moments{e.mean, 2.0 * e.mean * e.mean}; },
                        // x = E^2/2 with E ~ Exp(1): E[x] = 2!/2, E[x^2] = 4!/4
                        [](const WeibullHalf&) { return Moments{1.0, 6.0}; },
                        [](const Deterministic& d) { return Moments{d.value, d.value * d.value}; },
                        [](const Empirical&) -> Moments {
                          throw DomainError("empirical service has no analytic moments; estimate them from the data");
                        },
                    },
                    dist.variant());
}

double weibull_half_cdf(double x) {
  if (x <= 0.0) return 0.0;
  return 1.0 - std::exp(-std::sqrt(2.0 * x));
}

}  // namespace predq::workload
