#include "rdc/optimal_control.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "rdc/errors.hpp"

namespace rdc {

namespace {

struct Evaluation {
  double cost = 0.0;
  double error = 0.0;
  std::vector<double> gu;
  std::vector<double> gv;
  Field final_state;
};

double trapezoid_weight(std::size_t j, std::size_t n, double h) {
  return (j == 0 || j == n) ? 0.5 * h : h;
}

Evaluation evaluate(const OcpSpec& spec, const std::vector<double>& u, const std::vector<double>& v,
                    bool with_gradient) {
  const ImexStepper stepper(spec.model.term(), spec.length, spec.n_x, spec.dt(),
                            spec.implicitness);
  const std::size_t n = spec.n_x;
  const std::size_t steps = spec.n_t;
  const double h = spec.length / static_cast<double>(n);

  std::vector<std::vector<double>> states;
  std::vector<std::vector<char>> masks;
  if (with_gradient) {
    states.reserve(steps + 1);
    masks.resize(steps);
  }
  std::vector<double> cur = spec.y0.values;
  std::vector<double> next(n + 1);
  for (std::size_t k = 0; k < steps; ++k) {
    if (with_gradient) states.push_back(cur);
    stepper.advance(cur, next, u[k], v[k], with_gradient ? &masks[k] : nullptr);
    std::swap(cur, next);
  }

  Evaluation ev;
  std::vector<double> lambda(n + 1);
  for (std::size_t j = 0; j <= n; ++j) {
    const double d = cur[j] - spec.y_target.values[j];
    const double w = trapezoid_weight(j, n, h);
    ev.cost += w * d * d;
    ev.error = std::max(ev.error, std::abs(d));
    lambda[j] = 2.0 * w * d;
  }
  ev.final_state = Field(spec.length, cur);
  if (!with_gradient) return ev;

  // Backward sweep. For step k the interior update is
  //   M y+ = y + (1 - phi) r D2 y + dt f(y) + phi r (u e_1 + v e_m)
  // with y+_0 = u and y+_n = v; M is symmetric so M^-T = M^-1.
  ev.gu.assign(steps, 0.0);
  ev.gv.assign(steps, 0.0);
  const double phi = spec.implicitness;
  const double r = stepper.ratio();
  const double er = (1.0 - phi) * r;
  const double dt = spec.dt();
  const std::size_t m = n - 1;
  std::vector<double> mu(m);
  for (std::size_t k = steps; k-- > 0;) {
    const auto& mask = masks[k];
    for (std::size_t i = 1; i < n; ++i) mu[i - 1] = mask[i] ? 0.0 : lambda[i];
    stepper.solve(mu);
    ev.gu[k] = lambda[0] + phi * r * mu[0];
    ev.gv[k] = lambda[n] + phi * r * mu[m - 1];
    const auto& y = states[k];
    for (std::size_t i = 1; i < n; ++i) {
      const double left = i > 1 ? mu[i - 2] : 0.0;
      const double right = i < m ? mu[i] : 0.0;
      lambda[i] =
          mu[i - 1] * (1.0 - 2.0 * er + dt * spec.model.f_prime(y[i])) + er * (left + right);
    }
    lambda[0] = er * mu[0];
    lambda[n] = er * mu[m - 1];
  }
  return ev;
}

double project(double x) { return std::clamp(x, 0.0, 1.0); }

}  // namespace

OcpSpec::OcpSpec(ReactionModel model_, double length_, double horizon_, std::size_t n_x_,
                 std::size_t n_t_)
    : model(std::move(model_)),
      length(length_),
      horizon(horizon_),
      y0(Field::ramp(length_, n_x_)),
      y_target(Field::constant(length_, n_x_, model.bistable() ? model.theta() : 1.0)),
      n_x(n_x_),
      n_t(n_t_) {}

void OcpSpec::validate() const {
  if (n_x < 16 || n_t < 16) throw DomainError("OcpSpec: n_x and n_t must be at least 16");
  if (!(length > 0.0) || !(horizon > 0.0)) {
    throw DomainError("OcpSpec: length and horizon must be positive");
  }
  if (y0.values.size() != n_x + 1 || y_target.values.size() != n_x + 1) {
    throw DomainError("OcpSpec: y0 and y_target must have n_x + 1 samples");
  }
  if (!(0.0 <= u_min && u_min <= u_max && u_max <= 1.0 && 0.0 <= v_min && v_min <= v_max &&
        v_max <= 1.0)) {
    throw DomainError("OcpSpec: control bounds must be nested in [0, 1]");
  }
  if (tie_controls && std::max(u_min, v_min) > std::min(u_max, v_max)) {
    throw DomainError("OcpSpec: tied controls need overlapping bounds");
  }
  if (fixed_controls && !(*fixed_controls >= 0.0 && *fixed_controls <= 1.0)) {
    throw DomainError("OcpSpec: fixed control value must lie in [0, 1]");
  }
}

static void check_schedule(const OcpSpec& spec, const ControlSchedule& schedule) {
  spec.validate();
  if (schedule.steps() != spec.n_t || schedule.v.size() != spec.n_t) {
    std::ostringstream os;
    os << "schedule has " << schedule.steps() << " steps, spec expects " << spec.n_t;
    throw DomainError(os.str());
  }
}

static ControlSchedule effective(const OcpSpec& spec, const ControlSchedule& schedule) {
  ControlSchedule s = schedule;
  s.dt = spec.dt();
  if (spec.fixed_controls) {
    s.u.assign(spec.n_t, *spec.fixed_controls);
    s.v.assign(spec.n_t, *spec.fixed_controls);
  } else if (spec.tie_controls) {
    s.v = s.u;
  }
  return s;
}

Forward forward(const OcpSpec& spec, const ControlSchedule& schedule) {
  check_schedule(spec, schedule);
  const ControlSchedule s = effective(spec, schedule);
  SimulateOptions opt;
  opt.implicitness = spec.implicitness;
  opt.target = spec.y_target;
  Forward out;
  out.trajectory = simulate(spec.model, spec.y0, s, opt);
  const auto& y = out.trajectory.final().values;
  const double h = spec.length / static_cast<double>(spec.n_x);
  for (std::size_t j = 0; j <= spec.n_x; ++j) {
    const double d = y[j] - spec.y_target.values[j];
    out.cost += trapezoid_weight(j, spec.n_x, h) * d * d;
  }
  return out;
}

Gradient gradient(const OcpSpec& spec, const ControlSchedule& schedule) {
  check_schedule(spec, schedule);
  const ControlSchedule s = effective(spec, schedule);
  auto ev = evaluate(spec, s.u, s.v, true);
  Gradient g;
  g.cost = ev.cost;
  if (spec.fixed_controls) {
    g.u.assign(spec.n_t, 0.0);
    g.v.assign(spec.n_t, 0.0);
  } else if (spec.tie_controls) {
    g.u.resize(spec.n_t);
    for (std::size_t k = 0; k < spec.n_t; ++k) g.u[k] = ev.gu[k] + ev.gv[k];
    g.v = g.u;
  } else {
    g.u = std::move(ev.gu);
    g.v = std::move(ev.gv);
  }
  return g;
}

ControlSchedule default_schedule(const OcpSpec& spec) {
  const auto& t = spec.y_target.values;
  const double mean = std::accumulate(t.begin(), t.end(), 0.0) / static_cast<double>(t.size());
  return ControlSchedule::constant(spec.n_t, spec.dt(), project(mean), project(mean));
}

OptimResult solve_terminal(const OcpSpec& spec, const ControlSchedule& init,
                           const SolveOptions& options) {
  check_schedule(spec, init);
  const std::size_t nt = spec.n_t;
  const bool tied = spec.tie_controls;

  // Optimisation variable: u then v (only u when tied).
  const std::size_t dim = spec.fixed_controls ? 0 : (tied ? nt : 2 * nt);
  std::vector<double> x(dim);
  ControlSchedule start = effective(spec, init);
  const double lo_u = tied ? std::max(spec.u_min, spec.v_min) : spec.u_min;
  const double hi_u = tied ? std::min(spec.u_max, spec.v_max) : spec.u_max;
  auto proj = [&](std::size_t k, double z) {
    return k < nt ? std::clamp(z, lo_u, hi_u) : std::clamp(z, spec.v_min, spec.v_max);
  };
  for (std::size_t k = 0; k < dim; ++k) x[k] = proj(k, k < nt ? start.u[k] : start.v[k - nt]);

  auto unpack = [&](const std::vector<double>& z, std::vector<double>& u, std::vector<double>& v) {
    if (spec.fixed_controls) {
      u.assign(nt, *spec.fixed_controls);
      v.assign(nt, *spec.fixed_controls);
      return;
    }
    u.assign(z.begin(), z.begin() + static_cast<std::ptrdiff_t>(nt));
    if (tied) {
      v = u;
    } else {
      v.assign(z.begin() + static_cast<std::ptrdiff_t>(nt), z.end());
    }
  };
  std::vector<double> u, v;
  auto eval = [&](const std::vector<double>& z, bool grad) {
    unpack(z, u, v);
    auto ev = evaluate(spec, u, v, grad);
    if (grad && tied) {
      for (std::size_t k = 0; k < nt; ++k) ev.gu[k] += ev.gv[k];
    }
    return ev;
  };
  auto flat_gradient = [&](const Evaluation& ev) {
    std::vector<double> g(dim);
    for (std::size_t k = 0; k < dim; ++k) g[k] = k < nt ? ev.gu[k] : ev.gv[k - nt];
    return g;
  };

  OptimResult res;
  Evaluation ev = eval(x, dim > 0);
  res.cost_history.push_back(ev.cost);
  auto finish = [&](bool converged, double pg_norm) {
    unpack(x, u, v);
    res.schedule.dt = spec.dt();
    res.schedule.u = u;
    res.schedule.v = v;
    res.final_cost = ev.cost;
    res.terminal_error = ev.error;
    res.final_state = ev.final_state;
    res.grad_norm_final = pg_norm;
    res.converged = converged;
    return res;
  };
  auto target_met = [&] { return options.target_error && ev.error <= *options.target_error; };
  if (dim == 0) return finish(true, 0.0);

  std::vector<double> g = flat_gradient(ev);
  auto projected_norm = [&](const std::vector<double>& grad) {
    double nrm = 0.0;
    for (std::size_t k = 0; k < dim; ++k)
      nrm = std::max(nrm, std::abs(proj(k, x[k] - grad[k]) - x[k]));
    return nrm;
  };
  double pg = projected_norm(g);
  if (target_met()) return finish(true, pg);

  double gmax = 0.0;
  for (double gi : g) gmax = std::max(gmax, std::abs(gi));
  double alpha = gmax > 0.0 ? 0.1 / gmax : 1.0;
  std::vector<double> trial(dim);
  for (std::size_t it = 0; it < options.max_iters; ++it) {
    if (pg <= options.tol_grad) return finish(true, pg);
    bool accepted = false;
    Evaluation trial_ev;
    for (int bt = 0; bt < 60; ++bt) {
      double decrease = 0.0;
      for (std::size_t k = 0; k < dim; ++k) {
        trial[k] = proj(k, x[k] - alpha * g[k]);
        decrease += g[k] * (trial[k] - x[k]);
      }
      trial_ev = eval(trial, false);
      if (trial_ev.cost <= ev.cost + options.armijo * decrease && decrease < 0.0) {
        accepted = true;
        break;
      }
      if (decrease == 0.0) break;
      alpha *= 0.5;
    }
    if (!accepted) return finish(false, pg);

    Evaluation next = eval(trial, true);
    std::vector<double> g_next = flat_gradient(next);
    double ss = 0.0, sy = 0.0;
    for (std::size_t k = 0; k < dim; ++k) {
      const double s = trial[k] - x[k];
      const double y = g_next[k] - g[k];
      ss += s * s;
      sy += s * y;
    }
    x.swap(trial);
    g.swap(g_next);
    ev = std::move(next);
    res.cost_history.push_back(ev.cost);
    res.iterations = it + 1;
    pg = projected_norm(g);
    if (target_met()) return finish(true, pg);
    // Barzilai-Borwein step for the next trial; keep the old one on negative curvature.
    if (sy > 0.0) alpha = ss / sy;
    else alpha *= 2.0;
  }
  return finish(pg <= options.tol_grad, pg);
}

MinimalTime minimal_time(const OcpSpec& spec, const MinimalTimeOptions& options) {
  if (!(options.t_hi > options.t_lo && options.t_lo >= 0.0)) {
    throw DomainError("minimal_time: need 0 <= t_lo < t_hi");
  }
  MinimalTime out;
  SolveOptions solve = options.solve;
  solve.target_error = options.feas_tol;

  auto attempt = [&](double T, const ControlSchedule& warm) {
    OcpSpec s = spec;
    s.horizon = T;
    ControlSchedule init = warm;
    // Same number of steps, so rescaling the schedule in time keeps the values.
    init.dt = s.dt();
    auto r = solve_terminal(s, init, solve);
    const bool ok = r.terminal_error <= options.feas_tol;
    out.trials.emplace_back(T, ok);
    return std::make_pair(ok, std::move(r));
  };

  OcpSpec hi_spec = spec;
  hi_spec.horizon = options.t_hi;
  auto [ok_hi, best] =
      attempt(options.t_hi, options.init ? *options.init : default_schedule(hi_spec));
  if (!ok_hi) {
    std::ostringstream os;
    os << "minimal_time: horizon t_hi = " << options.t_hi << " is not feasible (terminal error "
       << best.terminal_error << " > " << options.feas_tol << ")";
    throw InfeasibleError(os.str());
  }
  double lo = options.t_lo;
  double hi = options.t_hi;
  for (std::size_t i = 0; i < options.max_bisect && hi - lo > options.bisect_tol; ++i) {
    const double mid = 0.5 * (lo + hi);
    auto [ok, r] = attempt(mid, best.schedule);
    if (ok) {
      hi = mid;
      best = std::move(r);
    } else {
      lo = mid;
    }
  }
  out.t_f = hi;
  out.result = std::move(best);
  return out;
}

}  // namespace rdc
