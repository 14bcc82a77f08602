#include "rdc/strategies.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <random>
#include <sstream>
#include <tuple>

#include "rdc/errors.hpp"

namespace rdc {

namespace {

std::size_t steps_for(double duration, double dt) {
  return static_cast<std::size_t>(std::llround(duration / dt));
}

// Advances one state and keeps the synthesized schedule and the recorded
// trajectory in step.
class Runner {
 public:
  Runner(const ReactionModel& model, const Field& y0, const StaircaseConfig& cfg)
      : stepper_(model.term(), y0.length, y0.intervals(), cfg.dt, cfg.implicitness),
        every_(std::max<std::size_t>(cfg.record_every, 1)),
        cur_(y0),
        next_(y0) {
    traj_.schedule.dt = cfg.dt;
    traj_.times.push_back(0.0);
    traj_.snapshots.push_back(y0);
  }

  void step(double u, double v) {
    const double excess = stepper_.advance(cur_.values, next_.values, u, v);
    if (excess > 0.0) {
      ++traj_.violations;
      traj_.max_violation = std::max(traj_.max_violation, excess);
    }
    std::swap(cur_, next_);
    traj_.schedule.u.push_back(u);
    traj_.schedule.v.push_back(v);
    ++count_;
    if (count_ % every_ == 0) record();
  }

  void run(const ControlSchedule& s) {
    for (std::size_t k = 0; k < s.steps(); ++k) step(s.u[k], s.v[k]);
  }

  void hold(double u, double v, std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) step(u, v);
  }

  const Field& state() const { return cur_; }
  double time() const { return traj_.schedule.dt * static_cast<double>(count_); }

  Trajectory finish() {
    if (traj_.times.back() < time()) record();
    return std::move(traj_);
  }

 private:
  void record() {
    traj_.times.push_back(time());
    traj_.snapshots.push_back(cur_);
  }

  ImexStepper stepper_;
  std::size_t every_;
  std::size_t count_ = 0;
  Field cur_;
  Field next_;
  Trajectory traj_;
};

void fill_outcome(StrategyOutcome& out, Runner& runner, double target) {
  out.final_error = max_distance(runner.state(), target);
  out.t_end = runner.time();
  out.trajectory = runner.finish();
  out.schedule = out.trajectory.schedule;
}

}  // namespace

void StaircaseConfig::validate(const ReactionModel& model) const {
  const double theta = model.bistable() ? model.theta() : 1.0;
  if (!(epsilon > 0.0 && epsilon < theta)) throw DomainError("epsilon must lie in (0, theta)");
  if (!(eta > 0.0)) throw DomainError("eta must be positive");
  if (!(tol_final > 0.0)) throw DomainError("tol_final must be positive");
  if (!(tau > 0.0) || !(steer_horizon > 0.0) || !(t_max > 0.0)) {
    throw DomainError("tau, steer_horizon and t_max must be positive");
  }
  if (!(steer_box > 0.0)) throw DomainError("steer_box must be positive");
  if (n_steps < 1) throw DomainError("n_steps must be at least 1");
  if (n_x < 16) throw DomainError("n_x must be at least 16");
  if (!(dt > 0.0)) throw DomainError("dt must be positive");
}

StrategyOutcome static_strategy(const ReactionModel& model, const Field& y0, double a, double T,
                                const StaircaseConfig& cfg) {
  if (!(T > 0.0)) throw DomainError("static_strategy: T must be positive");
  StrategyOutcome out;
  const double L = y0.length;
  if (a == 0.0) {
    out.threshold = l_star(model).value;
  } else if (a == 1.0) {
    out.threshold = kInfinity;
  } else if (model.bistable() && std::abs(a - model.theta()) <= 1e-12) {
    a = model.theta();
    out.threshold = l_theta(model).value;
  } else {
    throw DomainError("static_strategy: target must be 0, theta or 1");
  }
  out.below_threshold = L < out.threshold;

  Runner runner(model, y0, cfg);
  runner.hold(a, a, steps_for(T, cfg.dt));
  fill_outcome(out, runner, a);
  out.t0 = out.t1 = out.t_end;
  out.success = out.final_error <= cfg.tol_final;
  return out;
}

SteerResult local_steer(const ReactionModel& model, const Field& y_now, const Field& target,
                        double horizon, const StaircaseConfig& cfg) {
  const double dist = max_distance(y_now, target);
  if (dist > cfg.eta) {
    std::ostringstream os;
    os << "local_steer: distance " << dist << " to the target exceeds the capture radius "
       << cfg.eta;
    throw CaptureError(os.str());
  }
  SteerResult res;
  res.schedule.dt = cfg.dt;
  res.final_state = y_now;
  if (dist == 0.0) return res;

  const std::size_t n_t = std::max<std::size_t>(steps_for(horizon, cfg.dt), 16);
  OcpSpec spec(model, y_now.length, cfg.dt * static_cast<double>(n_t), y_now.intervals(), n_t);
  spec.y0 = y_now;
  spec.y_target = target;
  spec.implicitness = cfg.implicitness;
  spec.tie_controls = cfg.tie_controls;
  const double ub = target.values.front();
  const double vb = target.values.back();
  const double w = cfg.steer_box * cfg.eta;
  spec.u_min = std::max(0.0, ub - w);
  spec.u_max = std::min(1.0, ub + w);
  spec.v_min = std::max(0.0, vb - w);
  spec.v_max = std::min(1.0, vb + w);

  SolveOptions opt;
  opt.max_iters = 300;
  opt.target_error = 1e-5;
  const auto r = solve_terminal(spec, ControlSchedule::constant(n_t, cfg.dt, ub, vb), opt);
  res.schedule = r.schedule;
  res.achieved_error = r.terminal_error;
  res.final_state = r.final_state;
  return res;
}

InitState y_init(const ReactionModel& model, double length, const StaircaseConfig& cfg) {
  using Key = std::tuple<std::string, double, double, double, std::size_t, double, double>;
  static std::mutex mutex;
  static std::map<Key, InitState> cache;
  const Key key{model.name(), model.F1(), length, cfg.epsilon, cfg.n_x, cfg.dt, cfg.implicitness};
  {
    std::lock_guard lock(mutex);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }

  const double eps = cfg.epsilon;
  const ImexStepper stepper(model.term(), length, cfg.n_x, cfg.dt, cfg.implicitness);
  Field cur = Field::constant(length, cfg.n_x, eps);
  Field next = cur;
  Field mark = cur;
  const std::size_t chunk = std::max<std::size_t>(steps_for(10.0, cfg.dt), 1);
  const std::size_t limit = steps_for(std::max(cfg.t_max, 1000.0), cfg.dt);
  bool converged = false;
  for (std::size_t k = 1; k <= limit; ++k) {
    stepper.advance(cur.values, next.values, eps, eps);
    std::swap(cur, next);
    if (k % chunk == 0) {
      if (max_distance(cur, mark) <= 1e-12) {
        converged = true;
        break;
      }
      mark = cur;
    }
  }
  if (!converged) throw NumericalError("y_init: the static epsilon run did not settle");

  ShootingOptions shoot;
  shoot.samples = cfg.n_x;
  const auto sols = find_stationary_solutions(model, eps, eps, length, shoot);
  InitState st;
  st.field = cur;
  bool found = false;
  for (const auto& s : sols) {
    if (s.init.w > model.theta1() || !in_gamma(model, s.init)) continue;
    if (found) throw NumericalError("y_init: more than one steady state in Gamma");
    st.state = s;
    found = true;
  }
  if (!found) throw NumericalError("y_init: shooting found no steady state in Gamma");
  st.mismatch = max_distance(st.field, Field(length, st.state.values));
  if (st.mismatch > 1e-4) {
    std::ostringstream os;
    os << "y_init: long-run state and shooting solution differ by " << st.mismatch;
    throw NumericalError(os.str());
  }
  std::lock_guard lock(mutex);
  cache.emplace(key, st);
  return st;
}

double capture_time(const ReactionModel& model, const Field& y0, const Field& target,
                    const StaircaseConfig& cfg) {
  if (max_distance(y0, target) <= cfg.eta) return 0.0;
  const ImexStepper stepper(model.term(), y0.length, y0.intervals(), cfg.dt, cfg.implicitness);
  Field cur = y0, next = y0;
  const std::size_t limit = steps_for(cfg.t_max, cfg.dt);
  for (std::size_t k = 1; k <= limit; ++k) {
    stepper.advance(cur.values, next.values, cfg.epsilon, cfg.epsilon);
    std::swap(cur, next);
    if (max_distance(cur, target) <= cfg.eta) return cfg.dt * static_cast<double>(k);
  }
  return kInfinity;
}

StrategyOutcome staircase_to_theta(const ReactionModel& model, const Field& y0,
                                   const StaircaseConfig& cfg_in) {
  if (!model.bistable()) throw KindError("staircase_to_theta requires a bistable model");
  StaircaseConfig cfg = cfg_in;
  cfg.validate(model);
  const double L = y0.length;
  if (y0.intervals() != cfg.n_x) throw DomainError("staircase_to_theta: y0 grid differs from n_x");
  const double star = l_star(model).value;
  const bool feasible = L < star;
  if (!feasible && !cfg.override_gate) {
    std::ostringstream os;
    os << "staircase_to_theta: L = " << L << " is not below L* = " << star;
    throw InfeasibleError(os.str());
  }
  // Uniqueness of the Gamma steady state needs L below L^epsilon.
  if (feasible) {
    while (!(L < l_a(model, cfg.epsilon).value) && cfg.epsilon > 1e-6) cfg.epsilon *= 0.5;
  }

  const double theta = model.theta();
  StrategyOutcome out;
  out.threshold = star;
  out.below_threshold = feasible;
  Runner runner(model, y0, cfg);
  InitState init;
  try {
    init = y_init(model, L, cfg);
  } catch (const NumericalError& e) {
    if (!cfg.override_gate) throw;
    out.message = e.what();
    fill_outcome(out, runner, theta);
    return out;
  }

  // Phase 1: static epsilon controls until captured.
  const std::size_t limit = steps_for(cfg.t_max, cfg.dt);
  std::size_t k = 0;
  while (max_distance(runner.state(), init.field) > cfg.eta) {
    if (k++ >= limit) {
      std::ostringstream os;
      os << "staircase_to_theta: no capture within t_max = " << cfg.t_max;
      if (!cfg.override_gate) throw TimeoutError(os.str());
      out.message = os.str();
      fill_outcome(out, runner, theta);
      out.t0 = out.t1 = out.t_end;
      return out;
    }
    runner.step(cfg.epsilon, cfg.epsilon);
  }
  out.t0 = runner.time();

  // Phase 2: steer onto y_init.
  auto steer = [&](const Field& target) {
    const auto r = local_steer(model, runner.state(), target, cfg.steer_horizon, cfg);
    runner.run(r.schedule);
    ++out.corrections;
  };
  if (!feasible) {
    out.message = "L is not below L*: no path of steady states to theta";
    fill_outcome(out, runner, theta);
    out.t1 = out.t_end;
    return out;
  }
  steer(init.field);
  out.t1 = runner.time();

  // Phase 3: follow the path of steady states.
  PathOptions popt;
  popt.n_steps = cfg.n_steps;
  popt.samples = cfg.n_x;
  const SteadyPath path = build_path_to_theta(model, init.state, L, popt);
  const std::size_t dwell = std::max<std::size_t>(steps_for(cfg.tau, cfg.dt), 1);
  for (std::size_t i = 1; i < path.states.size(); ++i) {
    const auto [us, vs] = path.controls[i];
    const Field w(L, path.states[i].values);
    runner.hold(us, vs, dwell);
    double err = max_distance(runner.state(), w);
    out.dwell_errors.push_back(err);
    out.path_controls.emplace_back(us, vs);
    if (err > cfg.eta / 2.0) {
      try {
        steer(w);
      } catch (const CaptureError& e) {
        out.message = e.what();
        fill_outcome(out, runner, theta);
        return out;
      }
    }
  }
  // The last path state is theta itself; settle on it.
  fill_outcome(out, runner, theta);
  out.success = out.final_error <= cfg.tol_final &&
                stationary_residual(model, out.trajectory.final()) <= 10.0 * cfg.tol_final;
  if (!out.success && out.message.empty())
    out.message = "final state not within tol_final of theta";
  return out;
}

UniformTimeProbe uniform_time_probe(const ReactionModel& model, double length,
                                    const StaircaseConfig& cfg, std::uint64_t seed,
                                    std::size_t probes) {
  if (!model.bistable()) throw KindError("uniform_time_probe requires a bistable model");
  if (!(length < l_star(model).value)) {
    throw InfeasibleError("uniform_time_probe: L must be below L*");
  }
  const Field target = y_init(model, length, cfg).field;
  UniformTimeProbe p;
  p.t_zero = capture_time(model, Field::constant(length, cfg.n_x, 0.0), target, cfg);
  p.t_one = capture_time(model, Field::constant(length, cfg.n_x, 1.0), target, cfg);
  if (!std::isfinite(p.t_zero) || !std::isfinite(p.t_one)) {
    throw TimeoutError("uniform_time_probe: extremal data not captured within t_max");
  }
  p.t_star = std::max(p.t_zero, p.t_one);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  p.all_within = true;
  for (std::size_t i = 0; i < probes; ++i) {
    // Alternate rough (independent nodal values) and smooth random data.
    std::vector<double> v(cfg.n_x + 1);
    if (i % 2 == 0) {
      for (double& y : v) y = unit(rng);
    } else {
      const double a = unit(rng), b = unit(rng), c = unit(rng);
      for (std::size_t j = 0; j <= cfg.n_x; ++j) {
        const double x = static_cast<double>(j) / static_cast<double>(cfg.n_x);
        v[j] =
            std::clamp(a + (b - a) * x + c * std::sin(3.0 * std::numbers::pi * x) / 2.0, 0.0, 1.0);
      }
    }
    const double t = capture_time(model, Field(length, std::move(v)), target, cfg);
    p.times.push_back(t);
    if (!(t <= p.t_star)) p.all_within = false;
  }
  return p;
}

double minimal_time_lower_bound_check(const ReactionModel& model, const Field& y0,
                                      const StaircaseConfig& cfg, double margin) {
  if (!model.bistable())
    throw KindError("minimal_time_lower_bound_check requires a bistable model");
  const double theta = model.theta();
  const auto& v = y0.values;
  const bool above = std::any_of(v.begin(), v.end(), [&](double y) { return y > theta + margin; });
  const bool below = std::any_of(v.begin(), v.end(), [&](double y) { return y < theta - margin; });
  const ImexStepper stepper(model.term(), y0.length, y0.intervals(), cfg.dt, cfg.implicitness);
  const std::size_t limit = steps_for(cfg.t_max, cfg.dt);

  auto first_time = [&](double control, auto done) {
    Field cur = y0, next = y0;
    for (std::size_t k = 1; k <= limit; ++k) {
      stepper.advance(cur.values, next.values, control, control);
      std::swap(cur, next);
      if (done(cur)) return cfg.dt * static_cast<double>(k);
    }
    return kInfinity;
  };
  double t = 0.0;
  if (above) {
    t = std::max(t, first_time(0.0, [&](const Field& y) {
                   return std::all_of(y.values.begin(), y.values.end(),
                                      [&](double z) { return z <= theta + margin; });
                 }));
  }
  if (below) {
    t = std::max(t, first_time(1.0, [&](const Field& y) {
                   return std::all_of(y.values.begin(), y.values.end(),
                                      [&](double z) { return z >= theta - margin; });
                 }));
  }
  return t;
}

}  // namespace rdc
