#include "rdc/phase_plane.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <sstream>

#include "rdc/errors.hpp"
#include "rdc/numerics.hpp"

namespace rdc {

namespace {

constexpr double kQuadratureTol = 1e-11;

// Yoshida's sixth-order symmetric composition of the Stormer-Verlet step.
constexpr double kY1 = -1.17767998417887100695;
constexpr double kY2 = 0.235573213359358133684;
constexpr double kY3 = 0.784513610477557263819;
constexpr double kY0 = 1.0 - 2.0 * (kY1 + kY2 + kY3);
constexpr std::array<double, 7> kComposition = {kY3, kY2, kY1, kY0, kY1, kY2, kY3};

struct Run {
  std::vector<double> w;
  std::vector<double> z;
  bool exited = false;
  double exit_x = kInfinity;
};

Run run_composition(const ReactionModel& model, PhasePoint init, double length, std::size_t n,
                    std::size_t substeps, const IntegrateOptions& opt) {
  Run run;
  run.w.reserve(n + 1);
  run.z.reserve(n + 1);
  double w = init.w;
  double z = init.wp;
  run.w.push_back(w);
  run.z.push_back(z);
  const double h = length / static_cast<double>(n) / static_cast<double>(substeps);
  const double lo = opt.lower - opt.box_slack;
  const double hi = opt.upper + opt.box_slack;
  double x = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = 0; k < substeps; ++k) {
      const double w_prev = w;
      for (double c : kComposition) {
        const double hc = c * h;
        z -= 0.5 * hc * model.f(w);
        w += hc * z;
        z -= 0.5 * hc * model.f(w);
      }
      if (w < lo || w > hi || !std::isfinite(w)) {
        const double bound = w < lo ? lo : hi;
        const double frac = std::isfinite(w) ? (bound - w_prev) / (w - w_prev) : 0.5;
        run.exited = true;
        run.exit_x = x + std::clamp(frac, 0.0, 1.0) * h;
        return run;
      }
      x += h;
    }
    run.w.push_back(w);
    run.z.push_back(z);
  }
  return run;
}

double max_difference(const Run& a, const Run& b) {
  const std::size_t n = std::min(a.w.size(), b.w.size());
  double err = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    err = std::max({err, std::abs(a.w[i] - b.w[i]), std::abs(a.z[i] - b.z[i])});
  }
  return err;
}

// Clustered at both ends of (lo, hi), endpoints excluded.
std::vector<double> chebyshev_points(double lo, double hi, std::size_t count) {
  std::vector<double> pts(count);
  for (std::size_t k = 0; k < count; ++k) {
    const double t = (1.0 - std::cos(std::numbers::pi * (static_cast<double>(k) + 0.5) /
                                     static_cast<double>(count))) /
                     2.0;
    pts[k] = lo + (hi - lo) * t;
  }
  return pts;
}

// Golden-section refinement around the sampled minimum at index i.
numerics::Minimum refine_minimum(const numerics::ScalarFn& fn, const std::vector<double>& xs,
                                 const std::vector<double>& values, std::size_t i, double lo,
                                 double hi) {
  const double a = std::max(i > 0 ? xs[i - 1] : lo, lo);
  const double b = std::min(i + 1 < xs.size() ? xs[i + 1] : hi, hi);
  auto refined = numerics::golden_section_minimize(fn, a, b, 1e-10 * std::max(1.0, std::abs(b)));
  if (values[i] < refined.value) return {xs[i], values[i]};
  return refined;
}

double max_ratio(const numerics::ScalarFn& ratio, double lo, double hi, double at_lo) {
  constexpr int samples = 10000;
  std::vector<double> xs(samples + 1);
  std::vector<double> vals(samples + 1);
  std::size_t best = 0;
  for (int i = 0; i <= samples; ++i) {
    xs[i] = lo + (hi - lo) * static_cast<double>(i) / samples;
    vals[i] = i == 0 ? at_lo : ratio(xs[i]);
    if (vals[i] > vals[best]) best = static_cast<std::size_t>(i);
  }
  const double a = best > 0 ? xs[best - 1] : lo;
  const double b = best < samples ? xs[best + 1] : hi;
  auto neg = [&](double y) { return y == lo ? -at_lo : -ratio(y); };
  const auto refined = numerics::golden_section_minimize(neg, a, b, 1e-12);
  return std::max(vals[best], -refined.value);
}

}  // namespace

double energy(const ReactionModel& model, PhasePoint p) {
  return 0.5 * p.wp * p.wp + model.primitive(p.w);
}

double arc_length(const ReactionModel& model, double base, double turn) {
  const double d = turn - base;
  if (d == 0.0) return 0.0;
  const double sign = d > 0 ? 1.0 : -1.0;
  if (!(sign * model.f(turn) > 0.0)) {
    // f vanishes (or points the wrong way) at the turning point: the arc
    // approaches it asymptotically and never turns back.
    return kInfinity;
  }
  // y = turn - sign s^2 maps the square-root singularity at the turning
  // point to a smooth integrand; F(turn) - F(y) = s^2 |mean of f on [y, turn]|.
  auto integrand = [&](double s) {
    const double y = turn - sign * s * s;
    const double m = sign * numerics::mean_value([&model](double v) { return model.f(v); },
                                                 std::min(y, turn), std::max(y, turn));
    if (!(m > 0.0)) return std::numeric_limits<double>::quiet_NaN();
    return 2.0 / std::sqrt(m);
  };
  const double value =
      std::numbers::sqrt2 * numerics::integrate(integrand, 0.0, std::sqrt(std::abs(d)),
                                                kQuadratureTol);
  if (std::isnan(value)) {
    throw DomainError("arc_length: F(turn) - F(y) changes sign between base and turn");
  }
  return value > kLengthOverflow ? kInfinity : value;
}

double length_of_alpha(const ReactionModel& model, double alpha) {
  const double F1 = model.F1();
  if (!(alpha > 0.0 && alpha <= F1)) {
    throw DomainError("length_of_alpha: alpha must lie in (0, F(1)]");
  }
  if (alpha == F1) return kInfinity;
  return arc_length(model, 0.0, f_inverse_upper(model, alpha));
}

Threshold l_star(const ReactionModel& model) {
  const double F1 = model.F1();
  if (F1 == 0.0) return {kInfinity, false, 0.0};

  constexpr std::size_t half = 64;
  std::vector<double> alphas;
  alphas.reserve(2 * half);
  const double lo_exp = std::log10(1e-10);
  const double hi_exp = std::log10(0.5);
  for (std::size_t i = 0; i < half; ++i) {
    const double e = lo_exp + (hi_exp - lo_exp) * static_cast<double>(i) / (half - 1);
    alphas.push_back(F1 * std::pow(10.0, e));
  }
  for (std::size_t i = 1; i <= half; ++i) {
    const double e = hi_exp + (lo_exp - hi_exp) * static_cast<double>(i) / half;
    alphas.push_back(F1 * (1.0 - std::pow(10.0, e)));
  }
  std::vector<double> lengths(alphas.size());
  std::size_t best = 0;
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    lengths[i] = length_of_alpha(model, alphas[i]);
    if (lengths[i] < lengths[best]) best = i;
  }

  if (best == 0) {
    // Infimum at alpha -> 0. L(alpha) expands in powers of sqrt(alpha);
    // two Richardson sweeps with ratio 4 in alpha remove the first two terms.
    const double a0 = alphas.front();
    const double l0 = lengths.front();
    const double l1 = length_of_alpha(model, a0 / 4.0);
    const double l2 = length_of_alpha(model, a0 / 16.0);
    const double r0 = 2.0 * l1 - l0;
    const double r1 = 2.0 * l2 - l1;
    return {(4.0 * r1 - r0) / 3.0, false, 0.0};
  }

  auto fn = [&model](double a) { return length_of_alpha(model, a); };
  const auto m = refine_minimum(fn, alphas, lengths, best, 0.0, F1);
  return {m.value, true, m.x};
}

double l_star_lower_bound(const ReactionModel& model) {
  auto ratio = [&model](double y) { return model.f(y) / y; };
  const double r = max_ratio(ratio, 0.0, 1.0, model.f_prime(0.0));
  if (!(r > 0.0)) throw NumericalError("l_star_lower_bound: max f(y)/y is not positive");
  return std::numbers::pi / std::sqrt(r);
}

Threshold l_theta(const ReactionModel& model) {
  if (!model.bistable()) throw KindError("l_theta requires a bistable model");
  const double theta = model.theta();
  constexpr std::size_t per_branch = 64;

  auto length_to = [&model, theta](double beta) { return arc_length(model, theta, beta); };

  Threshold best_result;
  for (int branch = 0; branch < 2; ++branch) {
    const double lo = branch == 0 ? 0.0 : theta;
    const double hi = branch == 0 ? theta : 1.0;
    const auto betas = chebyshev_points(lo, hi, per_branch);
    std::vector<double> lengths(betas.size());
    std::size_t best = 0;
    for (std::size_t i = 0; i < betas.size(); ++i) {
      lengths[i] = length_to(betas[i]);
      if (lengths[i] < lengths[best]) best = i;
    }
    // Next to theta the mean of f is computed from values of size |beta - theta|
    // and the quadrature loses relative accuracy; that end is covered by the
    // small-oscillation limit below.
    const double gap = 1e-6;
    const auto m = refine_minimum(length_to, betas, lengths, best, branch == 0 ? lo : theta + gap,
                                  branch == 0 ? theta - gap : hi);
    if (m.value < best_result.value) best_result = {m.value, true, m.x};
  }

  // Small oscillations around theta have length pi / sqrt(f'(theta)).
  const double fp = model.f_prime(theta);
  const double limit = fp > 0.0 ? std::numbers::pi / std::sqrt(fp) : kInfinity;
  if (limit <= best_result.value + 1e-12) return {limit, false, theta};
  return best_result;
}

double l_theta_lower_bound(const ReactionModel& model) {
  const double theta = model.theta();
  auto ratio = [&model, theta](double y) {
    return y == theta ? model.f_prime(theta) : model.f(y) / (y - theta);
  };
  const double r = std::max(max_ratio(ratio, theta, 1.0, model.f_prime(theta)),
                            max_ratio([&](double z) { return ratio(theta - z); }, 0.0, theta,
                                      model.f_prime(theta)));
  if (!(r > 0.0)) throw NumericalError("l_theta_lower_bound: ratio is not positive");
  return std::numbers::pi / std::sqrt(r);
}

Threshold l_a(const ReactionModel& model, double a) {
  if (!model.bistable()) throw KindError("l_a requires a bistable model");
  if (!(a >= 0.0 && a <= 1.0)) throw DomainError("l_a: a must lie in [0, 1]");
  if (model.F1() == 0.0) return {kInfinity, false, 1.0};
  if (a == 0.0) {
    const auto star = l_star(model);
    return {star.value, star.attained, f_inverse_upper(model, star.argmin)};
  }
  const double theta1 = model.theta1();
  if (a >= theta1) return {0.0, false, a};

  // Turning points b in [theta1, 1): energy F(b) >= 0 >= F(a).
  constexpr std::size_t count = 128;
  std::vector<double> bs(count);
  for (std::size_t k = 0; k < count; ++k) {
    bs[k] = theta1 + (1.0 - theta1) *
                         (1.0 - std::cos(std::numbers::pi * static_cast<double>(k) / count)) / 2.0;
  }
  std::vector<double> lengths(count);
  std::size_t best = 0;
  for (std::size_t k = 0; k < count; ++k) {
    lengths[k] = arc_length(model, a, bs[k]);
    if (lengths[k] < lengths[best]) best = k;
  }
  auto fn = [&model, a](double b) { return arc_length(model, a, b); };
  const auto m = refine_minimum(fn, bs, lengths, best, theta1, 1.0);
  return {m.value, true, m.x};
}

SteadyState integrate_stationary(const ReactionModel& model, PhasePoint init, double length,
                                 std::size_t n, const IntegrateOptions& options) {
  if (!(length > 0.0)) throw DomainError("integrate_stationary: length must be positive");
  if (n < 1) throw DomainError("integrate_stationary: need at least one interval");

  std::size_t m = 1;
  Run coarse = run_composition(model, init, length, n, m, options);
  Run fine;
  for (;;) {
    fine = run_composition(model, init, length, n, 2 * m, options);
    const bool same_exit = coarse.exited == fine.exited && coarse.w.size() == fine.w.size();
    if (same_exit && max_difference(coarse, fine) <= options.tol) break;
    m *= 2;
    if (2 * m > static_cast<std::size_t>(options.max_substeps)) {
      if (fine.exited || coarse.exited) break;
      std::ostringstream os;
      os << "integrate_stationary: no convergence to " << options.tol << " with "
         << options.max_substeps << " substeps per interval";
      throw NumericalError(os.str());
    }
    coarse = std::move(fine);
  }

  SteadyState s;
  s.init = init;
  s.energy = energy(model, init);
  s.values = std::move(fine.w);
  s.slopes = std::move(fine.z);
  s.exited = fine.exited;
  s.exit_x = fine.exit_x;
  s.grid.resize(s.values.size());
  for (std::size_t j = 0; j < s.grid.size(); ++j) {
    s.grid[j] = length * static_cast<double>(j) / static_cast<double>(n);
  }
  s.left_control = s.values.front();
  s.right_control = s.exited ? std::numeric_limits<double>::quiet_NaN() : s.values.back();
  return s;
}

double stationary_residual(const ReactionModel& model, const SteadyState& state) {
  double res = 0.0;
  for (std::size_t j = 1; j + 1 < state.values.size(); ++j) {
    const double h = state.grid[j] - state.grid[j - 1];
    const double lap =
        (state.values[j + 1] - 2.0 * state.values[j] + state.values[j - 1]) / (h * h);
    res = std::max(res, std::abs(-lap - model.f(state.values[j])));
  }
  return res;
}

std::vector<SteadyState> find_stationary_solutions(const ReactionModel& model, double a, double b,
                                                   double length,
                                                   const ShootingOptions& options) {
  if (!(a >= 0.0 && a <= 1.0 && b >= 0.0 && b <= 1.0)) {
    throw DomainError("find_stationary_solutions: boundary values must lie in [0, 1]");
  }
  if (!(length > 0.0)) throw DomainError("find_stationary_solutions: length must be positive");

  // Shooting runs in a wider box so that the residual is defined on both
  // sides of roots whose profile touches 0 or 1.
  IntegrateOptions scan;
  scan.lower = -0.5;
  scan.upper = 1.5;
  scan.tol = 1e-8;
  const std::size_t n = options.samples;

  auto residual = [&](double p) {
    const auto s = integrate_stationary(model, {a, p}, length, n, scan);
    return s.exited ? std::numeric_limits<double>::quiet_NaN() : s.values.back() - b;
  };

  const double p_max = std::sqrt(2.0 * std::max(0.0, model.F1() - model.primitive(a)));
  std::vector<double> ps;
  if (p_max == 0.0) {
    ps.push_back(0.0);
  } else {
    const std::size_t count = std::max<std::size_t>(options.slopes, 2);
    ps.resize(count);
    for (std::size_t k = 0; k < count; ++k) {
      ps[k] = -p_max + 2.0 * p_max * static_cast<double>(k) / static_cast<double>(count - 1);
    }
  }
  std::vector<double> g(ps.size());
  for (std::size_t k = 0; k < ps.size(); ++k) g[k] = residual(ps[k]);

  std::vector<std::pair<double, bool>> roots;  // (slope, low confidence)
  for (std::size_t k = 0; k < ps.size(); ++k) {
    if (std::isnan(g[k])) continue;
    if (g[k] == 0.0) {
      roots.emplace_back(ps[k], false);
      continue;
    }
    if (k + 1 < ps.size() && !std::isnan(g[k + 1]) && g[k + 1] != 0.0 &&
        (g[k] > 0) != (g[k + 1] > 0)) {
      auto safe = [&](double p) {
        const double v = residual(p);
        return std::isnan(v) ? -1.0 : v;
      };
      roots.emplace_back(numerics::bisect_root(safe, ps[k], ps[k + 1], options.slope_tol), false);
    }
    if (k > 0 && k + 1 < ps.size() && !std::isnan(g[k - 1]) && !std::isnan(g[k + 1]) &&
        (g[k - 1] > 0) == (g[k] > 0) && (g[k + 1] > 0) == (g[k] > 0) &&
        std::abs(g[k]) < std::abs(g[k - 1]) && std::abs(g[k]) < std::abs(g[k + 1])) {
      // local extremum of the residual without sign change: possible tangency
      auto mag = [&](double p) {
        const double v = residual(p);
        return std::isnan(v) ? kInfinity : std::abs(v);
      };
      const auto m =
          numerics::golden_section_minimize(mag, ps[k - 1], ps[k + 1], options.slope_tol);
      if (m.value <= 1e-8) roots.emplace_back(m.x, true);
    }
  }

  std::vector<SteadyState> solutions;
  auto add = [&](SteadyState s) {
    for (const auto& other : solutions) {
      double diff = 0.0;
      for (std::size_t j = 0; j < s.values.size(); ++j) {
        diff = std::max(diff, std::abs(s.values[j] - other.values[j]));
      }
      if (diff <= 1e-7) return;
    }
    solutions.push_back(std::move(s));
  };

  const bool equilibrium =
      a == b && (a == 0.0 || a == 1.0 || (model.bistable() && a == model.theta()));
  if (equilibrium) add(integrate_stationary(model, {a, 0.0}, length, n));

  IntegrateOptions admissible;
  admissible.box_slack = 1e-6;
  for (const auto& [p, low_confidence] : roots) {
    auto s = integrate_stationary(model, {a, p}, length, n, admissible);
    if (s.exited || std::abs(s.right_control - b) > 1e-6) continue;
    for (double& v : s.values) v = std::clamp(v, 0.0, 1.0);
    s.left_control = s.values.front();
    s.right_control = s.values.back();
    s.low_confidence = low_confidence;
    add(std::move(s));
  }
  std::sort(solutions.begin(), solutions.end(),
            [](const SteadyState& x, const SteadyState& y) { return x.init.wp < y.init.wp; });
  return solutions;
}

bool in_gamma(const ReactionModel& model, PhasePoint p) {
  if (!model.bistable()) throw KindError("in_gamma requires a bistable model");
  if (p.w < 0.0 || p.w > model.theta1() + 1e-12) {
    throw DomainError("in_gamma: w must lie in [0, theta1]");
  }
  return energy(model, p) <= 1e-12;
}

SteadyPath build_path_to_theta(const ReactionModel& model, const SteadyState& y_init,
                               double length, const PathOptions& options) {
  if (!model.bistable()) throw KindError("build_path_to_theta requires a bistable model");
  if (!in_gamma(model, y_init.init)) {
    throw InfeasibleError("build_path_to_theta: y_init does not lie in Gamma");
  }
  const double star = l_star(model).value;
  if (!(length < star)) {
    throw InfeasibleError("build_path_to_theta: L must be below L*");
  }
  const double theta = model.theta();
  const PhasePoint start = y_init.init;

  for (std::size_t n = options.n_steps;; n *= 2) {
    SteadyPath path;
    for (std::size_t k = 0; k <= n; ++k) {
      const double s = static_cast<double>(k) / static_cast<double>(n);
      const PhasePoint c{(1.0 - s) * start.w + s * theta, (1.0 - s) * start.wp};
      auto state = integrate_stationary(model, c, length, options.samples);
      const bool admissible = !state.exited && state.left_control > 0.0 &&
                              state.left_control < 1.0 && state.right_control > 0.0 &&
                              state.right_control < 1.0;
      if (!admissible) {
        std::ostringstream os;
        os << "build_path_to_theta: state at s = " << s
           << (state.exited ? " leaves [0, 1]" : " has boundary values outside (0, 1)");
        throw InfeasibleError(os.str());
      }
      if (!path.states.empty()) {
        const auto& prev = path.states.back().values;
        double gap = 0.0;
        for (std::size_t j = 0; j < prev.size(); ++j) {
          gap = std::max(gap, std::abs(prev[j] - state.values[j]));
        }
        path.max_gap = std::max(path.max_gap, gap);
      }
      path.s.push_back(s);
      path.controls.emplace_back(state.left_control, state.right_control);
      path.states.push_back(std::move(state));
    }
    if (path.max_gap <= options.max_gap || 2 * n > options.max_steps) return path;
  }
}

}  // namespace rdc
