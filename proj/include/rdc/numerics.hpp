#pragma once

#include <functional>

namespace rdc::numerics {

using ScalarFn = std::function<double(double)>;

struct Minimum {
  double x;
  double value;
};

/// Golden-section search for a minimum of a unimodal function on [a, b].
/// Stops when the bracket is shorter than `xtol` (absolute).
Minimum golden_section_minimize(const ScalarFn& fn, double a, double b, double xtol,
                                int max_iter = 200);

/// Bisection on a sign-changing bracket. Returns the midpoint of the final
/// bracket once it is shorter than `xtol`.
double bisect_root(const ScalarFn& fn, double a, double b, double xtol, int max_iter = 200);

/// Root of fn on [a, b] using Newton steps safeguarded by bisection.
/// Requires fn(a) and fn(b) of opposite sign (or one of them zero).
double safeguarded_newton(const ScalarFn& fn, const ScalarFn& dfn, double a, double b,
                          double ftol, int max_iter = 200);

/// Mean value of fn over [a, b] by 8-point Gauss-Legendre. Exact for
/// polynomials up to degree 15. Returns fn(a) when a == b.
double mean_value(const ScalarFn& fn, double a, double b);

/// Adaptive Gauss-Kronrod (G15/K31) quadrature of fn over [a, b].
double integrate(const ScalarFn& fn, double a, double b, double rel_tol,
                 double* error_estimate = nullptr);

}  // namespace rdc::numerics
