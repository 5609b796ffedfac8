#pragma once

#include <functional>

namespace forge {

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  int evaluations = 0;
  bool converged = false;
};

// Adaptive Gauss-Kronrod (7-15 pair) with interval bisection. An interval is
// accepted when |K15 - G7| <= max(abs_tol, rel_tol * |whole|) scaled by its
// share of the span. The integrand must be finite on the open interval;
// endpoint behavior is the caller's problem (substitute first).
QuadratureResult integrate(const std::function<double(double)>& f, double a,
                           double b, double abs_tol = 1e-12,
                           double rel_tol = 1e-10, int max_depth = 28);

}  // namespace forge
