// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <boost/numeric/odeint.hpp>
#include <fmt/format.h>

#include "rdc/optimal_control.hpp"
#include "rdc/pde.hpp"
#include "rdc/phase_plane.hpp"
#include "rdc/strategies.hpp"

using namespace rdc;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

const ReactionModel& cubic() {
  static const ReactionModel m = ReactionModel::cubic(1.0 / 3.0);
  return m;
}

double peak(const Field& y) { return *std::max_element(y.values.begin(), y.values.end()); }

Trajectory run_constant(const ReactionModel& m, double L, double a, double T, double dt,
                        std::size_t n_x = 200, bool lyapunov = false) {
  const auto steps = static_cast<std::size_t>(std::llround(T / dt));
  SimulateOptions opt;
  opt.implicitness = 1.0;
  opt.record_every = lyapunov ? 1 : 100;
  opt.lyapunov = lyapunov;
  return simulate(m, Field::ramp(L, n_x), ControlSchedule::constant(steps, dt, a, a), opt);
}

// ---------------------------------------------------------------------------

Verdict c1_logistic_threshold() {
  Stopwatch sw;
  const auto m = ReactionModel::logistic();
  const auto ls = l_star(m);
  const double lb = l_star_lower_bound(m);
  const double t = sw.seconds();
  const bool ok = std::abs(ls.value - M_PI) <= 1e-3 && std::abs(lb - M_PI) <= 1e-6 && t < 1.0;
  return {ok, fmt::format("L*={:.9f} attained={} lower bound={:.12f} ({:.3f}s)", ls.value,
                          ls.attained, lb, t)};
}

Verdict c2_cubic_thresholds() {
  Stopwatch sw;
  const auto& m = cubic();
  const auto ls = l_star(m);
  const auto lt = l_theta(m);
  const double t = sw.seconds();
  const bool ok = std::abs(ls.value - 10.43) <= 0.05 && std::abs(lt.value - 6.29) <= 0.05 &&
                  ls.argmin > 0.0 && ls.argmin < m.F1() && t < 5.0;
  return {ok, fmt::format("L*={:.5f} (alpha={:.5f} in (0, {:.5f})) L_theta={:.5f} ({:.2f}s)",
                          ls.value, ls.argmin, m.F1(), lt.value, t)};
}

// Return length of the orbit from (0, sqrt(2 alpha)) by adaptive
// Dormand-Prince with dense output, the crossing of w = 0 bisected on the
// interpolant.
double ode_return_length(const ReactionModel& m, double alpha) {
  using State = std::array<double, 2>;
  namespace odeint = boost::numeric::odeint;
  const auto rhs = [&m](const State& s, State& ds, double) {
    ds[0] = s[1];
    ds[1] = -m.f(std::clamp(s[0], 0.0, 1.0));
  };
  auto stepper = odeint::make_dense_output(1e-13, 1e-13, odeint::runge_kutta_dopri5<State>());
  stepper.initialize(State{0.0, std::sqrt(2.0 * alpha)}, 0.0, 1e-3);
  State s{};
  while (true) {
    stepper.do_step(rhs);
    if (stepper.current_state()[0] < 0.0) break;
    if (stepper.current_time() > 1e4) return kInfinity;
  }
  double lo = stepper.previous_time(), hi = stepper.current_time();
  while (hi - lo > 1e-13 * hi) {
    const double mid = 0.5 * (lo + hi);
    stepper.calc_state(mid, s);
    (s[0] < 0.0 ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

Verdict c3_integral_vs_ode() {
  Stopwatch sw;
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(0.01, 0.99);
  double worst = 0.0;
  std::size_t count = 0;
  for (const auto& m : {cubic(), ReactionModel::logistic()}) {
    for (int i = 0; i < 20; ++i) {
      const double alpha = U(rng) * m.F1();
      const double quad = length_of_alpha(m, alpha);
      const double ode = ode_return_length(m, alpha);
      worst = std::max(worst, std::abs(quad - ode) / quad);
      ++count;
    }
  }
  const double t = sw.seconds();
  return {worst <= 1e-5 && t < 10.0,
          fmt::format("{} alphas over both models, worst relative gap {:.2e} ({:.2f}s)", count,
                      worst, t)};
}

Verdict c4_spectral_bound() {
  std::string detail;
  bool ok = true;
  const auto check = [&](const std::string& name, const ReactionModel& m) {
    const double lb = l_star_lower_bound(m), ls = l_star(m).value;
    ok = ok && lb <= ls + 1e-4;
    detail += fmt::format("{} {:.4f}<={:.4f} ", name, lb, ls);
  };
  check("logistic", ReactionModel::logistic());
  for (double th : {0.25, 1.0 / 3.0, 0.45})
    check(fmt::format("theta={:.3f}", th), ReactionModel::cubic(th));
  return {ok, detail};
}

double heat_error(std::size_t n) {
  const double L = M_PI, dt = 1e-3;
  const ReactionTerm zero{[](double) { return 0.0; }, [](double) { return 0.0; }};
  const ImexStepper st(zero, L, n, dt, 0.5);
  auto y = Field::sample(L, n, [](double x) { return std::sin(x); });
  auto next = y;
  for (int k = 0; k < 1000; ++k) {
    st.advance(y.values, next.values, 0.0, 0.0);
    std::swap(y, next);
  }
  double e = 0.0;
  for (std::size_t j = 0; j <= n; ++j) {
    e = std::max(e, std::abs(y.values[j] - std::exp(-1.0) * std::sin(y.x(j))));
  }
  return e;
}

Verdict c5_heat_kernel() {
  Stopwatch sw;
  const double e1 = heat_error(200), e2 = heat_error(400);
  const double t = sw.seconds();
  return {e1 <= 1e-3 && e1 / e2 >= 3.5 && t < 10.0,
          fmt::format("error {:.3e} at N_x=200, {:.3e} at 400, ratio {:.2f} ({:.2f}s)", e1, e2,
                      e1 / e2, t)};
}

Verdict c6_comparison() {
  Stopwatch sw;
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const std::vector<ReactionModel> models{ReactionModel::logistic(), ReactionModel::cubic(0.25),
                                          cubic(), ReactionModel::cubic(0.45)};
  double worst = -kInfinity;
  const std::size_t n = 50;
  for (int pair = 0; pair < 50; ++pair) {
    const auto& m = models[pair % models.size()];
    const double L = 2.0 + 10.0 * U(rng);
    const double phi = 0.5;
    const double dt = 0.9 * monotone_dt(m, L, n, phi);
    auto low = Field::sample(L, n, [&](double) { return U(rng); });
    auto high = low;
    for (double& v : high.values) v = std::min(1.0, v + 0.3 * U(rng));
    ControlSchedule s;
    s.dt = dt;
    double u = U(rng), v = U(rng);
    for (int k = 0; k < 400; ++k) {
      if (k % 40 == 0) {
        u = U(rng);
        v = U(rng);
      }
      s.u.push_back(u);
      s.v.push_back(v);
    }
    const auto rep = check_comparison(m, low, high, s, phi);
    worst = std::max(worst, rep.max_gap);
  }
  const double t = sw.seconds();
  return {worst <= 1e-8 && t < 60.0,
          fmt::format("50 pairs, worst max(low - high) = {:.2e} ({:.2f}s)", worst, t)};
}

Verdict c7_invasion() {
  const auto tr = run_constant(cubic(), 12.0, 1.0, 60.0, 1e-3);
  const double err = max_distance(tr.final(), 1.0);
  const auto lg = run_constant(ReactionModel::logistic(), 12.0, 1.0, 60.0, 1e-3, 200, true);
  double rise = -kInfinity;
  for (std::size_t i = 1; i < lg.lyapunov.size(); ++i) {
    rise = std::max(rise, lg.lyapunov[i] - lg.lyapunov[i - 1]);
  }
  return {err <= 1e-2 && rise <= 1e-6,
          fmt::format("cubic ||y(60)-1||={:.2e}; logistic V: largest step change {:.2e}", err,
                      rise)};
}

Verdict c8_extinction() {
  const auto& m = cubic();
  const auto short_run = run_constant(m, 8.0, 0.0, 100.0, 1e-3);
  const double e8 = max_distance(short_run.final(), 0.0);
  const auto long_run = run_constant(m, 12.0, 0.0, 100.0, 1e-3);
  ShootingOptions so;
  so.samples = 200;
  double best = kInfinity;
  for (const auto& s : find_stationary_solutions(m, 0.0, 0.0, 12.0, so)) {
    const Field w(12.0, s.values);
    if (peak(w) > 0.0) best = std::min(best, max_distance(long_run.final(), w));
  }
  const double top = peak(long_run.final());
  return {e8 <= 1e-2 && best <= 1e-2 && top >= 0.1,
          fmt::format("L=8: ||y(100)||={:.2e}; L=12: distance to bump {:.2e}, max {:.3f}", e8,
                      best, top)};
}

Verdict c9_static_theta() {
  const auto& m = cubic();
  StaircaseConfig cfg;
  const auto l5 = static_strategy(m, Field::ramp(5.0, cfg.n_x), m.theta(), 20.0, cfg);
  const auto l8 = static_strategy(m, Field::ramp(8.0, cfg.n_x), m.theta(), 20.0, cfg);
  return {l5.final_error <= 1e-2 && l8.final_error >= 0.05,
          fmt::format("L=5 error {:.2e}, L=8 error {:.3f}", l5.final_error, l8.final_error)};
}

Verdict c10_staircase() {
  const auto& m = cubic();
  Stopwatch sw;
  StaircaseConfig cfg;
  const auto out = staircase_to_theta(m, Field::ramp(8.0, cfg.n_x), cfg);
  const double t = sw.seconds();
  bool in_box = true;
  for (std::size_t k = 0; k < out.schedule.steps(); ++k) {
    in_box = in_box && out.schedule.u[k] >= 0.0 && out.schedule.u[k] <= 1.0 &&
             out.schedule.v[k] >= 0.0 && out.schedule.v[k] <= 1.0;
  }
  bool admissible = !out.path_controls.empty();
  for (const auto& [u, v] : out.path_controls) {
    admissible = admissible && u > 0.0 && u < 1.0 && v > 0.0 && v < 1.0;
  }
  const bool staircase_ok =
      out.success && out.final_error <= 1e-2 && in_box && admissible && t < 120.0;

  // Obstacle: above the zero-control bump at L = 12 every solution stays above
  // it. The bump is taken on the simulation grid (its continuous profile
  // relaxed under the scheme) so the comparison is exact.
  StaircaseConfig ob;
  ob.override_gate = true;
  ob.t_max = 100.0;
  ShootingOptions so;
  so.samples = ob.n_x;
  const auto sols = find_stationary_solutions(m, 0.0, 0.0, 12.0, so);
  SimulateOptions relax;
  relax.implicitness = ob.implicitness;
  relax.record_every = 1000;
  const Field bump = simulate(m, Field(12.0, sols.back().values),
                              ControlSchedule::constant(20000, ob.dt, 0.0, 0.0), relax)
                         .final();
  auto y0 = Field::ramp(12.0, ob.n_x);
  for (std::size_t j = 0; j < y0.values.size(); ++j) {
    y0.values[j] = std::max(y0.values[j], bump.values[j]);
  }
  const auto blocked = staircase_to_theta(m, y0, ob);
  double gap = kInfinity;
  for (const auto& s : blocked.trajectory.snapshots) {
    for (std::size_t j = 0; j < s.values.size(); ++j)
      gap = std::min(gap, s.values[j] - bump.values[j]);
  }
  const bool obstacle_ok = !blocked.success && gap >= -1e-8;
  return {staircase_ok && obstacle_ok,
          fmt::format("L=8: success={} error {:.2e} t_end {:.0f}, {} path states admissible={}, "
                      "controls in [0,1]={} ({:.1f}s); L=12 obstacle: success={} min(y - bump) "
                      "{:.1e} over {} snapshots",
                      out.success, out.final_error, out.t_end, out.path_controls.size(),
                      admissible, in_box, t, blocked.success, gap,
                      blocked.trajectory.snapshots.size())};
}

Verdict c11_adjoint() {
  Stopwatch sw;
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(0.05, 0.95);
  double worst = 0.0;
  for (const auto& m : {cubic(), ReactionModel::logistic()}) {
    OcpSpec spec(m, 8.0, 20.0, 60, 400);
    auto s = default_schedule(spec);
    for (double& x : s.u) x = U(rng);
    for (double& x : s.v) x = U(rng);
    const auto g = gradient(spec, s);
    double gmax = 0.0;
    for (std::size_t k = 0; k < s.steps(); ++k) {
      gmax = std::max({gmax, std::abs(g.u[k]), std::abs(g.v[k])});
    }
    // coordinates whose derivative is not lost in roundoff
    std::vector<std::pair<bool, std::size_t>> pool;
    for (std::size_t k = 0; k < s.steps(); ++k) {
      if (std::abs(g.u[k]) >= 1e-2 * gmax) pool.emplace_back(true, k);
      if (std::abs(g.v[k]) >= 1e-2 * gmax) pool.emplace_back(false, k);
    }
    std::shuffle(pool.begin(), pool.end(), rng);
    pool.resize(std::min<std::size_t>(pool.size(), 20));
    const double h = 1e-6;
    for (const auto& [left, k] : pool) {
      auto& c = left ? s.u : s.v;
      const double x = c[k];
      c[k] = x + h;
      const double up = forward(spec, s).cost;
      c[k] = x - h;
      const double dn = forward(spec, s).cost;
      c[k] = x;
      const double fd = (up - dn) / (2 * h);
      const double ad = left ? g.u[k] : g.v[k];
      worst = std::max(worst, std::abs(fd - ad) / std::max(std::abs(fd), std::abs(ad)));
    }
  }
  const double t = sw.seconds();
  return {worst <= 1e-5 && t < 60.0,
          fmt::format("20 coordinates per model, worst relative error {:.2e} ({:.2f}s)", worst, t)};
}

Verdict c12_optimal_control() {
  const auto& m = cubic();
  SolveOptions opt;
  opt.max_iters = 3000;
  OcpSpec s8(m, 8.0, 20.0, 60, 400);
  const auto r8 = solve_terminal(s8, ControlSchedule::constant(400, s8.dt(), 0.0, 0.0), opt);
  std::size_t k = 0;
  while (k < 400 && r8.schedule.u[k] <= 0.05 && r8.schedule.v[k] <= 0.05) ++k;
  const double frac = static_cast<double>(k) / 400.0;
  OcpSpec s12(m, 12.0, 100.0, 60, 2000);
  const auto r12 = solve_terminal(s12, ControlSchedule::constant(2000, s12.dt(), 0.0, 0.0), opt);
  return {r8.terminal_error <= 2e-2 && frac >= 0.4 && r12.terminal_error >= 0.1,
          fmt::format("L=8: error {:.2e}, controls <= 0.05 on the first {:.2f} T; L=12: error "
                      "{:.3f}",
                      r8.terminal_error, frac, r12.terminal_error)};
}

Verdict c13_minimal_time() {
  Stopwatch sw;
  const auto& m = cubic();
  OcpSpec spec(m, 8.0, 20.0, 60, 400);
  MinimalTimeOptions opt;
  opt.solve.max_iters = 2000;
  opt.init = ControlSchedule::constant(400, opt.t_hi / 400.0, 0.0, 0.0);
  const auto two = minimal_time(spec, opt);

  spec.tie_controls = true;
  opt.t_hi = 40.0;
  opt.init = ControlSchedule::constant(400, opt.t_hi / 400.0, 0.0, 0.0);
  const auto tied = minimal_time(spec, opt);
  const double ratio = tied.t_f / two.t_f;

  StaircaseConfig cfg;
  cfg.n_x = 60;
  const double lb = minimal_time_lower_bound_check(m, Field::ramp(8.0, 60), cfg, opt.feas_tol);
  const double t = sw.seconds();
  const bool ok = two.t_f >= 4.0 && two.t_f <= 6.5 && ratio >= 3.0 && ratio <= 7.0 &&
                  two.t_f >= lb && t < 900.0;
  return {ok, fmt::format("two controls t_f={:.3f}, tied t_f={:.3f}, ratio {:.2f} (band [3, 7]), "
                          "lower bound {:.3f} ({:.1f}s)",
                          two.t_f, tied.t_f, ratio, lb, t)};
}

Verdict c14_constants() {
  const auto& m = cubic();
  const double th = 1.0 / 3.0;
  // F(1) = -theta/2 + (1 + theta)/3 - 1/4 = 1/12 - theta/6
  const double F1 = 1.0 / 12.0 - th / 6.0;
  // theta1 solves y^2/4 - (1 + theta) y / 3 + theta / 2 = 0 (smaller root)
  const double b = (1.0 + th) / 3.0;
  const double theta1 = 2.0 * (b - std::sqrt(b * b - th / 2.0));
  const bool ok = std::abs(m.F1() - 1.0 / 36.0) <= 1e-14 && std::abs(m.F1() - F1) <= 1e-14 &&
                  std::abs(m.theta1() - theta1) <= 1e-12 && std::abs(m.theta1() - 0.53748) <= 1e-4;
  return {ok, fmt::format("F(1)={:.15f} (1/36={:.15f}), theta1={:.12f} (root {:.12f})", m.F1(),
                          1.0 / 36.0, m.theta1(), theta1)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria{
      {"logistic threshold", c1_logistic_threshold},
      {"cubic thresholds", c2_cubic_thresholds},
      {"integral vs ODE return length", c3_integral_vs_ode},
      {"spectral lower bound", c4_spectral_bound},
      {"heat kernel", c5_heat_kernel},
      {"comparison principle", c6_comparison},
      {"invasion and Lyapunov decay", c7_invasion},
      {"extinction dichotomy", c8_extinction},
      {"static theta dichotomy", c9_static_theta},
      {"staircase and obstacle", c10_staircase},
      {"adjoint gradient", c11_adjoint},
      {"optimal control regimes", c12_optimal_control},
      {"minimal time", c13_minimal_time},
      {"theta1 and F(1)", c14_constants},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    if (!v.pass) ++failures;
    std::printf("%s %2zu %s: %s\n", v.pass ? "PASS" : "FAIL", i + 1, criteria[i].first,
                v.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria failed\n", failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
