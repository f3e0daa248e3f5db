#pragma once

#include <functional>

namespace dsm {

using ScalarFn = std::function<double(double)>;

/// Adaptive Simpson quadrature with Richardson correction. Converged when the
/// local error estimate is below max(abs_tol, rel_tol * |estimate|).
double adaptive_simpson(const ScalarFn& f, double a, double b, double abs_tol,
                        double rel_tol = 0.0, int max_depth = 48);

struct TailIntegral {
  double value = 0.0;
  double horizon = 0.0;  // where the integration was truncated
  bool converged = false;
};

/// Integral of f over [a, inf). Integrates doubling panels and stops once the
/// integrand has fallen below 1e-14 times its observed peak and the last
/// panel contributes less than abs_tol; `converged` is false if the horizon
/// `max_horizon` is reached first (divergent or very slowly decaying tails).
TailIntegral integrate_to_infinity(const ScalarFn& f, double a, double abs_tol,
                                   double max_horizon = 1e8);

/// Smallest x in [lo, hi] with g(x) >= 0 for nondecreasing g, by bisection
/// to relative width rel_tol.
double bisect_increasing(const ScalarFn& g, double lo, double hi, double rel_tol = 1e-14);

}  // namespace dsm
