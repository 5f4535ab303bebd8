#pragma once

#include <cmath>
#include <functional>

namespace predq::analytic {

struct GoldenSectionResult {
  double x = 0.0;
  double fx = 0.0;
  int evaluations = 0;
};

/// Golden-section minimization of a unimodal f on [lo, hi], stopping once
/// the bracket is narrower than `tolerance`.
inline GoldenSectionResult golden_section_minimize(const std::function<double(double)>& f, double lo,
                                                   double hi, double tolerance, int max_iterations = 200) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  int evals = 2;
  for (int i = 0; i < max_iterations && (b - a) > tolerance; ++i) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
    ++evals;
  }
  return fc <= fd ? GoldenSectionResult{c, fc, evals} : GoldenSectionResult{d, fd, evals};
}

}  // namespace predq::analytic
