#include "rdc/numerics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <utility>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "rdc/errors.hpp"

namespace rdc::numerics {

Minimum golden_section_minimize(const ScalarFn& fn, double a, double b, double xtol,
                                int max_iter) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = fn(c);
  double fd = fn(d);
  for (int it = 0; it < max_iter && std::abs(b - a) > xtol; ++it) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = fn(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = fn(d);
    }
  }
  return fc <= fd ? Minimum{c, fc} : Minimum{d, fd};
}

double bisect_root(const ScalarFn& fn, double a, double b, double xtol, int max_iter) {
  double fa = fn(a);
  const double fb = fn(b);
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if ((fa > 0) == (fb > 0)) {
    throw NumericalError("bisect_root: bracket does not change sign");
  }
  for (int it = 0; it < max_iter && std::abs(b - a) > xtol; ++it) {
    const double m = 0.5 * (a + b);
    const double fm = fn(m);
    if (fm == 0.0) return m;
    if ((fm > 0) == (fa > 0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
    }
  }
  return 0.5 * (a + b);
}

double safeguarded_newton(const ScalarFn& fn, const ScalarFn& dfn, double a, double b,
                          double ftol, int max_iter) {
  double fa = fn(a);
  double fb = fn(b);
  if (std::abs(fa) <= ftol) return a;
  if (std::abs(fb) <= ftol) return b;
  if ((fa > 0) == (fb > 0)) {
    throw NumericalError("safeguarded_newton: bracket does not change sign");
  }
  // orient so that fn(lo) < 0 < fn(hi)
  double lo = fa < 0 ? a : b;
  double hi = fa < 0 ? b : a;
  double x = 0.5 * (a + b);
  for (int it = 0; it < max_iter; ++it) {
    const double fx = fn(x);
    if (std::abs(fx) <= ftol) return x;
    if (fx < 0) {
      lo = x;
    } else {
      hi = x;
    }
    const double dfx = dfn(x);
    double next = dfx != 0.0 ? x - fx / dfx : 0.5 * (lo + hi);
    const double left = std::min(lo, hi);
    const double right = std::max(lo, hi);
    if (!(next > left && next < right)) next = 0.5 * (lo + hi);
    if (next == x || right - left <= 4.0 * std::numeric_limits<double>::epsilon() * right) {
      return x;
    }
    x = next;
  }
  return x;
}

double mean_value(const ScalarFn& fn, double a, double b) {
  static constexpr std::array<double, 4> nodes = {0.1834346424956498, 0.5255324099163290,
                                                  0.7966664774136267, 0.9602898564975363};
  static constexpr std::array<double, 4> weights = {0.3626837833783620, 0.3137066458778873,
                                                    0.2223810344533745, 0.1012285362903763};
  if (a == b) return fn(a);
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double sum = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    sum += weights[i] * (fn(mid - half * nodes[i]) + fn(mid + half * nodes[i]));
  }
  return 0.5 * sum;
}

double integrate(const ScalarFn& fn, double a, double b, double rel_tol, double* error_estimate) {
  double err = 0.0;
  const double value =
      boost::math::quadrature::gauss_kronrod<double, 31>::integrate(fn, a, b, 12, rel_tol, &err);
  if (error_estimate != nullptr) *error_estimate = err;
  return value;
}

}  // namespace rdc::numerics
