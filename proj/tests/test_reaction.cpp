#include <doctest.h>

#include <cmath>

#include "rdc/errors.hpp"
#include "rdc/reaction.hpp"

using namespace rdc;

TEST_CASE("logistic is monostable with F(1) = 1/6") {
  const auto m = ReactionModel::logistic();
  CHECK_FALSE(m.bistable());
  CHECK(m.F1() == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
  CHECK(m.f(0.5) == doctest::Approx(0.25));
  CHECK_THROWS_AS(m.theta(), KindError);
  CHECK_THROWS_AS(m.theta1(), KindError);
}

TEST_CASE("cubic constants match the closed forms") {
  const auto m = ReactionModel::cubic(1.0 / 3.0);
  CHECK(m.bistable());
  CHECK(m.theta() == doctest::Approx(1.0 / 3.0));
  CHECK(std::abs(m.F1() - 1.0 / 36.0) < 1e-14);
  CHECK(std::abs(m.theta1() - (16.0 - std::sqrt(40.0)) / 18.0) < 1e-12);
  CHECK(std::abs(big_f(m, m.theta1())) < 1e-14);
  CHECK(m.min_f_prime() < 0.0);
}

TEST_CASE("theta = 1/2 has F(1) = 0 and theta1 = 1") {
  const auto m = ReactionModel::cubic(0.5);
  CHECK(std::abs(m.F1()) < 1e-14);
  CHECK(m.theta1() == doctest::Approx(1.0));
}

TEST_CASE("classify recovers the built-in cubic") {
  const double th = 0.3;
  const auto f = [th](double y) { return y * (1 - y) * (y - th); };
  const auto df = [th](double y) { return -3 * y * y + 2 * (1 + th) * y - th; };
  const auto c = classify(f, df);
  const auto ref = ReactionModel::cubic(th);
  CHECK(c.bistable());
  CHECK(c.theta() == doctest::Approx(th).epsilon(1e-10));
  CHECK(c.F1() == doctest::Approx(ref.F1()).epsilon(1e-10));
  CHECK(c.theta1() == doctest::Approx(ref.theta1()).epsilon(1e-9));
  for (double y : {0.1, 0.4, 0.77, 1.0}) CHECK(big_f(c, y) == doctest::Approx(big_f(ref, y)));
}

TEST_CASE("classify rejects terms outside both hypotheses") {
  // F(1) < 0
  CHECK_THROWS_AS(classify([](double y) { return y * (1 - y) * (y - 0.7); },
                           [](double y) { return -3 * y * y + 3.4 * y - 0.7; }),
                  ModelError);
  // negative everywhere
  CHECK_THROWS_AS(classify([](double y) { return -y * (1 - y); },
                           [](double y) { return -1 + 2 * y; }),
                  ModelError);
}

TEST_CASE("f_inverse_upper inverts F on the upper branch") {
  for (const auto& m : {ReactionModel::logistic(), ReactionModel::cubic(0.25)}) {
    for (double s : {0.0, 0.2, 0.5, 0.9, 1.0}) {
      const double alpha = s * m.F1();
      const double y = f_inverse_upper(m, alpha);
      CHECK(y >= m.branch_floor() - 1e-12);
      CHECK(big_f(m, y) == doctest::Approx(alpha).epsilon(1e-10));
    }
    CHECK_THROWS_AS(f_inverse_upper(m, 2.0 * m.F1()), DomainError);
  }
  CHECK_THROWS_AS(big_f(ReactionModel::logistic(), 1.5), DomainError);
}
