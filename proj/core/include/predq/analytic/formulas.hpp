#pragma once

#include <map>
#include <string>

namespace predq::analytic {

struct AnalyticResult {
  double mean_response = 0.0;
  std::string formula;
  std::map<std::string, double> parameters;
};

/// Modified Bessel function of the second kind K_nu(x) for nu in {0, 1, 2},
/// by adaptive quadrature of  int_0^inf exp(-x cosh t) cosh(nu t) dt.
/// Throws DomainError for x <= 0 or an unsupported order.
double bessel_k(int nu, double x);

/// M/M/1 FIFO with mean-1 service: 1 / (1 - lambda).
AnalyticResult mm1_fifo(double lambda);

/// Pollaczek-Khinchine M/G/1 FIFO: E[S] + lambda E[S^2] / (2 (1 - rho)).
AnalyticResult mg1_fifo_pk(double lambda, double mean, double second_moment);

/// M/M/1 with exponential predictions thresholded at T: mean response
/// without preemption (t1) and with short-preempts-long (t2).
AnalyticResult onebit_t1(double lambda, double threshold);
AnalyticResult onebit_t2(double lambda, double threshold);

struct OneBitOptimum {
  double threshold = 0.0;
  double t1 = 0.0;
  double t2 = 0.0;
};

/// Threshold minimizing t2 (and therefore t1 = lambda t2 + 1) on [lo, hi].
OneBitOptimum optimal_onebit_threshold(double lambda, double lo = 0.01, double hi = 50.0);

}  // namespace predq::analytic
