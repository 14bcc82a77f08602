#include <doctest.h>

#include <cmath>

#include "rdc/errors.hpp"
#include "rdc/strategies.hpp"

using namespace rdc;

TEST_CASE("static strategy to theta below and above L_theta") {
  const auto c = ReactionModel::cubic(1.0 / 3.0);
  StaircaseConfig cfg;
  const auto ok = static_strategy(c, Field::ramp(5.0, cfg.n_x), c.theta(), 20.0, cfg);
  CHECK(ok.below_threshold);
  CHECK(ok.threshold == doctest::Approx(l_theta(c).value));
  CHECK(ok.final_error <= 1e-2);
  const auto bad = static_strategy(c, Field::ramp(8.0, cfg.n_x), c.theta(), 20.0, cfg);
  CHECK_FALSE(bad.below_threshold);
  CHECK(bad.final_error >= 0.05);
  CHECK_THROWS_AS(static_strategy(c, Field::ramp(5.0, cfg.n_x), 0.5, 1.0, cfg), DomainError);
}

TEST_CASE("y_init lies in Gamma and agrees with shooting") {
  const auto c = ReactionModel::cubic(1.0 / 3.0);
  StaircaseConfig cfg;
  const auto yi = y_init(c, 8.0, cfg);
  CHECK(yi.mismatch < 1e-4);
  CHECK(in_gamma(c, yi.state.init));
  CHECK(yi.field.values.front() == doctest::Approx(cfg.epsilon));
}

TEST_CASE("local steering needs the capture radius") {
  const auto c = ReactionModel::cubic(1.0 / 3.0);
  StaircaseConfig cfg;
  const auto target = Field::constant(5.0, cfg.n_x, c.theta());
  CHECK_THROWS_AS(local_steer(c, Field::constant(5.0, cfg.n_x, 0.5), target, 1.0, cfg),
                  CaptureError);
  auto near = target;
  for (std::size_t j = 1; j + 1 < near.values.size(); ++j) near.values[j] += 0.5 * cfg.eta;
  const auto r = local_steer(c, near, target, 1.0, cfg);
  CHECK(r.achieved_error < 0.5 * cfg.eta);
  for (std::size_t k = 0; k < r.schedule.steps(); ++k) {
    CHECK(std::abs(r.schedule.u[k] - c.theta()) <= cfg.steer_box * cfg.eta + 1e-12);
  }
  CHECK(local_steer(c, target, target, 1.0, cfg).schedule.steps() == 0);
}

TEST_CASE("staircase gate and short-domain success") {
  const auto c = ReactionModel::cubic(1.0 / 3.0);
  StaircaseConfig cfg;
  CHECK_THROWS_AS(staircase_to_theta(c, Field::ramp(12.0, cfg.n_x), cfg), InfeasibleError);
  CHECK_THROWS_AS(staircase_to_theta(ReactionModel::logistic(), Field::ramp(5.0, cfg.n_x), cfg),
                  KindError);
  const auto out = staircase_to_theta(c, Field::ramp(5.0, cfg.n_x), cfg);
  CHECK(out.success);
  CHECK(out.final_error <= cfg.tol_final);
  CHECK(out.t0 <= out.t1);
  CHECK(out.t1 <= out.t_end);
  CHECK(out.schedule.horizon() == doctest::Approx(out.t_end));
}

TEST_CASE("lower bound check is finite and respects the margin") {
  const auto c = ReactionModel::cubic(1.0 / 3.0);
  StaircaseConfig cfg;
  cfg.n_x = 60;
  const auto y0 = Field::ramp(8.0, 60);
  const double exact = minimal_time_lower_bound_check(c, y0, cfg);
  const double loose = minimal_time_lower_bound_check(c, y0, cfg, 2e-2);
  CHECK(std::isfinite(exact));
  CHECK(loose <= exact);
}

TEST_CASE("config validation") {
  const auto c = ReactionModel::cubic(1.0 / 3.0);
  StaircaseConfig cfg;
  cfg.eta = -1.0;
  CHECK_THROWS_AS(cfg.validate(c), DomainError);
}
