#include "predq/analytic/formulas.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <string>

#include "predq/analytic/golden_section.hpp"
#include "predq/error.hpp"

namespace predq::analytic {

namespace {

void require_stable(double lambda, double rho, const char* formula) {
  if (!(lambda > 0.0)) throw DomainError(std::string(formula) + ": arrival rate must be > 0");
  if (!(rho < 1.0)) {
    throw InstabilityError(std::string(formula) + ": load " + std::to_string(rho) + " >= 1 is unstable");
  }
}

// Integration cutoff where exp(-x (cosh t - 1)) cosh(nu t) < e^-60.
double cutoff(int nu, double x) {
  double t = std::acosh(1.0 + 60.0 / x);
  for (int i = 0; i < 50; ++i) {
    const double next = std::acosh(1.0 + (60.0 + nu * t) / x);
    if (std::abs(next - t) < 1e-12) break;
    t = next;
  }
  return t + 1.0;
}

struct BesselTerms {
  double a;  // 2 sqrt(T) K1(2 sqrt(T))
  double b;  // 2 T K2(2 sqrt(T))
};

BesselTerms onebit_terms(double threshold) {
  const double s = std::sqrt(threshold);
  return {2.0 * s * bessel_k(1, 2.0 * s), 2.0 * threshold * bessel_k(2, 2.0 * s)};
}

void check_onebit_args(double lambda, double threshold, const char* formula) {
  require_stable(lambda, lambda, formula);
  if (!(threshold > 0.0)) throw DomainError(std::string(formula) + ": threshold must be > 0");
}

}  // namespace

double bessel_k(int nu, double x) {
  if (nu < 0 || nu > 2) throw DomainError("bessel_k: order must be 0, 1 or 2");
  if (!(x > 0.0) || !std::isfinite(x)) throw DomainError("bessel_k: argument must be positive and finite");
  // Scaled integrand keeps large arguments from underflowing.
  const auto integrand = [nu, x](double t) { return std::exp(-x * (std::cosh(t) - 1.0)) * std::cosh(nu * t); };
  const double upper = cutoff(nu, x);
  double error = 0.0;
  const double scaled = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(integrand, 0.0, upper, 25,
                                                                                      1e-14, &error);
  return scaled * std::exp(-x);
}

AnalyticResult mm1_fifo(double lambda) {
  require_stable(lambda, lambda, "mm1_fifo");
  return {1.0 / (1.0 - lambda), "mm1_fifo", {{"lambda", lambda}}};
}

AnalyticResult mg1_fifo_pk(double lambda, double mean, double second_moment) {
  if (!(mean > 0.0) || !(second_moment > 0.0)) throw DomainError("mg1_fifo_pk: moments must be > 0");
  const double rho = lambda * mean;
  require_stable(lambda, rho, "mg1_fifo_pk");
  return {mean + lambda * second_moment / (2.0 * (1.0 - rho)),
          "mg1_fifo_pk",
          {{"lambda", lambda}, {"mean", mean}, {"second_moment", second_moment}}};
}

AnalyticResult onebit_t1(double lambda, double threshold) {
  check_onebit_args(lambda, threshold, "onebit_t1");
  const auto [a, b] = onebit_terms(threshold);
  const double num = lambda * (1.0 - lambda * (1.0 - a));
  const double den = (1.0 - lambda) * (1.0 - lambda * (1.0 - b));
  return {num / den + 1.0, "onebit_t1", {{"lambda", lambda}, {"T", threshold}}};
}

AnalyticResult onebit_t2(double lambda, double threshold) {
  check_onebit_args(lambda, threshold, "onebit_t2");
  const auto [a, b] = onebit_terms(threshold);
  const double num = 1.0 - lambda + lambda * a;
  const double den = (1.0 - lambda) * (1.0 - lambda * (1.0 - b));
  return {num / den, "onebit_t2", {{"lambda", lambda}, {"T", threshold}}};
}

OneBitOptimum optimal_onebit_threshold(double lambda, double lo, double hi) {
  check_onebit_args(lambda, lo, "optimal_onebit_threshold");
  if (!(hi > lo)) throw DomainError("optimal_onebit_threshold: empty search interval");
  // search in log T; the objective is smooth and unimodal there
  const auto f = [lambda](double log_t) { return onebit_t2(lambda, std::exp(log_t)).mean_response; };
  const auto best = golden_section_minimize(f, std::log(lo), std::log(hi), 1e-9);
  const double t = std::exp(best.x);
  return {t, onebit_t1(lambda, t).mean_response, best.fx};
}

}  // namespace predq::analytic
