#include <doctest.h>

#include <cmath>
#include <random>

#include "rdc/errors.hpp"
#include "rdc/optimal_control.hpp"

using namespace rdc;

namespace {

ControlSchedule random_schedule(const OcpSpec& spec, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> U(0.05, 0.95);
  auto s = default_schedule(spec);
  for (double& x : s.u) x = U(rng);
  for (double& x : s.v) x = U(rng);
  return s;
}

double fd(const OcpSpec& spec, ControlSchedule s, bool left, std::size_t k, double h) {
  auto& c = left ? s.u : s.v;
  const double x = c[k];
  c[k] = x + h;
  const double up = forward(spec, s).cost;
  c[k] = x - h;
  const double dn = forward(spec, s).cost;
  return (up - dn) / (2 * h);
}

}  // namespace

TEST_CASE("adjoint gradient matches finite differences on a coarse grid") {
  std::mt19937_64 rng(11);
  for (const auto& m : {ReactionModel::cubic(1.0 / 3.0), ReactionModel::logistic()}) {
    OcpSpec spec(m, 6.0, 2.0, 20, 40);
    const auto s = random_schedule(spec, rng);
    const auto g = gradient(spec, s);
    CHECK(g.cost == doctest::Approx(forward(spec, s).cost).epsilon(1e-14));
    for (std::size_t k : {0ul, 13ul, 27ul, 39ul}) {
      CHECK(fd(spec, s, true, k, 1e-6) == doctest::Approx(g.u[k]).epsilon(1e-5).scale(1e-6));
      CHECK(fd(spec, s, false, k, 1e-6) == doctest::Approx(g.v[k]).epsilon(1e-5).scale(1e-6));
    }
  }
}

TEST_CASE("tied gradient is the sum of the two components") {
  std::mt19937_64 rng(2);
  OcpSpec spec(ReactionModel::cubic(1.0 / 3.0), 6.0, 2.0, 20, 40);
  auto s = random_schedule(spec, rng);
  s.v = s.u;
  const auto free = gradient(spec, s);
  spec.tie_controls = true;
  const auto tied = gradient(spec, s);
  for (std::size_t k = 0; k < s.steps(); ++k) {
    CHECK(tied.u[k] == doctest::Approx(free.u[k] + free.v[k]));
    CHECK(tied.v[k] == doctest::Approx(tied.u[k]));
  }
  spec.tie_controls = false;
  spec.fixed_controls = 0.5;
  const auto none = gradient(spec, s);
  for (std::size_t k = 0; k < s.steps(); ++k) CHECK(none.u[k] == 0.0);
}

TEST_CASE("projected gradient descends monotonically and stays in the box") {
  OcpSpec spec(ReactionModel::cubic(1.0 / 3.0), 5.0, 10.0, 30, 100);
  SolveOptions opt;
  opt.max_iters = 200;
  const auto r = solve_terminal(spec, ControlSchedule::constant(100, spec.dt(), 0.0, 0.0), opt);
  for (std::size_t i = 1; i < r.cost_history.size(); ++i) {
    CHECK(r.cost_history[i] <= r.cost_history[i - 1]);
  }
  for (std::size_t k = 0; k < r.schedule.steps(); ++k) {
    CHECK(r.schedule.u[k] >= 0.0);
    CHECK(r.schedule.u[k] <= 1.0);
    CHECK(r.schedule.v[k] >= 0.0);
    CHECK(r.schedule.v[k] <= 1.0);
  }
  CHECK(r.terminal_error < 1e-2);
  CHECK(r.terminal_error == doctest::Approx(max_distance(r.final_state, spec.y_target)));
}

TEST_CASE("early stop on the terminal error") {
  OcpSpec spec(ReactionModel::cubic(1.0 / 3.0), 5.0, 10.0, 30, 100);
  SolveOptions opt;
  opt.target_error = 5e-2;
  const auto r = solve_terminal(spec, default_schedule(spec), opt);
  CHECK(r.terminal_error <= 5e-2);
}

TEST_CASE("spec validation") {
  OcpSpec spec(ReactionModel::cubic(1.0 / 3.0), 5.0, 10.0, 30, 100);
  spec.validate();
  spec.u_min = 0.8;
  spec.u_max = 0.2;
  CHECK_THROWS_AS(spec.validate(), DomainError);
  OcpSpec tiny(ReactionModel::logistic(), 5.0, 1.0, 4, 4);
  CHECK_THROWS_AS(tiny.validate(), DomainError);
}

TEST_CASE("minimal time reports infeasible upper bounds") {
  OcpSpec spec(ReactionModel::cubic(1.0 / 3.0), 8.0, 1.0, 30, 60);
  MinimalTimeOptions opt;
  opt.t_hi = 0.5;
  opt.solve.max_iters = 50;
  CHECK_THROWS_AS(minimal_time(spec, opt), InfeasibleError);
}
