#include <doctest.h>

#include <cmath>

#include "rdc/numerics.hpp"

using namespace rdc::numerics;

TEST_CASE("golden section finds the vertex of a parabola") {
  const auto m = golden_section_minimize([](double x) { return (x - 0.3) * (x - 0.3) + 2.0; }, 0.0,
                                         1.0, 1e-10);
  // a flat minimum only locates x to about sqrt(machine epsilon)
  CHECK(std::abs(m.x - 0.3) < 1e-7);
  CHECK(m.value == doctest::Approx(2.0));
}

TEST_CASE("bisection and safeguarded Newton agree on cbrt(2)") {
  const auto f = [](double x) { return x * x * x - 2.0; };
  const auto df = [](double x) { return 3.0 * x * x; };
  const double exact = std::cbrt(2.0);
  CHECK(std::abs(bisect_root(f, 0.0, 2.0, 1e-13) - exact) < 1e-12);
  CHECK(std::abs(safeguarded_newton(f, df, 0.0, 2.0, 1e-15) - exact) < 1e-13);
}

TEST_CASE("bisection rejects a bracket without sign change") {
  CHECK_THROWS(bisect_root([](double x) { return x * x + 1.0; }, -1.0, 1.0, 1e-10));
}

TEST_CASE("8-point Gauss-Legendre is exact to degree 15") {
  const auto p = [](double x) { return std::pow(x, 15) - 3.0 * std::pow(x, 8) + x; };
  // mean over [0, 2] of x^15 - 3 x^8 + x
  const double exact = (std::pow(2.0, 16) / 16.0 - 3.0 * std::pow(2.0, 9) / 9.0 + 2.0) / 2.0;
  CHECK(mean_value(p, 0.0, 2.0) == doctest::Approx(exact).epsilon(1e-14));
  CHECK(mean_value(p, 0.5, 0.5) == doctest::Approx(p(0.5)));
}

TEST_CASE("adaptive quadrature refines near a derivative singularity") {
  const double v = integrate([](double x) { return std::sqrt(x); }, 0.0, 1.0, 1e-10);
  CHECK(v == doctest::Approx(2.0 / 3.0).epsilon(1e-9));
  CHECK(integrate([](double x) { return std::sin(x); }, 0.0, M_PI, 1e-12) ==
        doctest::Approx(2.0).epsilon(1e-12));
}
