#include "rdc/pde.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "rdc/errors.hpp"

namespace rdc {

Field::Field(double length_, std::vector<double> values_)
    : length(length_), values(std::move(values_)) {
  if (!(length > 0.0)) throw DomainError("Field: length must be positive");
  if (values.size() < 3) throw DomainError("Field: need at least two intervals");
}

Field Field::constant(double length, std::size_t intervals, double value) {
  return Field(length, std::vector<double>(intervals + 1, value));
}

Field Field::sample(double length, std::size_t intervals, const std::function<double(double)>& fn) {
  std::vector<double> v(intervals + 1);
  for (std::size_t j = 0; j <= intervals; ++j) {
    v[j] = fn(length * static_cast<double>(j) / static_cast<double>(intervals));
  }
  return Field(length, std::move(v));
}

Field Field::ramp(double length, std::size_t intervals) {
  return sample(length, intervals, [length](double x) {
    const double s = x / length;
    return 0.1 * s + 0.8 * (1.0 - s);
  });
}

std::vector<double> Field::grid() const {
  std::vector<double> g(values.size());
  for (std::size_t j = 0; j < g.size(); ++j) g[j] = x(j);
  return g;
}

double max_distance(const Field& a, const Field& b) {
  if (a.values.size() != b.values.size()) throw DomainError("max_distance: grid mismatch");
  double d = 0.0;
  for (std::size_t j = 0; j < a.values.size(); ++j) {
    d = std::max(d, std::abs(a.values[j] - b.values[j]));
  }
  return d;
}

double max_distance(const Field& a, double c) {
  double d = 0.0;
  for (double y : a.values) d = std::max(d, std::abs(y - c));
  return d;
}

ControlSchedule ControlSchedule::constant(std::size_t steps, double dt, double u, double v) {
  ControlSchedule s;
  s.dt = dt;
  s.u.assign(steps, u);
  s.v.assign(steps, v);
  return s;
}

void ControlSchedule::validate() const {
  if (!(dt > 0.0)) throw DomainError("ControlSchedule: dt must be positive");
  if (u.size() != v.size()) throw DomainError("ControlSchedule: u and v differ in length");
  for (std::size_t k = 0; k < u.size(); ++k) {
    if (!(u[k] >= 0.0 && u[k] <= 1.0 && v[k] >= 0.0 && v[k] <= 1.0)) {
      throw DomainError("ControlSchedule: controls must lie in [0, 1]");
    }
  }
}

void ControlSchedule::append(const ControlSchedule& other) {
  if (u.empty()) dt = other.dt;
  if (std::abs(other.dt - dt) > 1e-14 * dt) {
    throw DomainError("ControlSchedule::append: time steps differ");
  }
  u.insert(u.end(), other.u.begin(), other.u.end());
  v.insert(v.end(), other.v.begin(), other.v.end());
}

ImexStepper::ImexStepper(ReactionTerm reaction, double length, std::size_t intervals, double dt,
                         double implicitness)
    : reaction_(std::move(reaction)), n_(intervals), dt_(dt), phi_(implicitness) {
  if (intervals < 2) throw DomainError("ImexStepper: need at least two intervals");
  if (!(dt > 0.0)) throw DomainError("ImexStepper: dt must be positive");
  if (!(length > 0.0)) throw DomainError("ImexStepper: length must be positive");
  if (!(implicitness >= 0.5 && implicitness <= 1.0)) {
    throw DomainError("ImexStepper: implicitness must lie in [1/2, 1]");
  }
  const double h = length / static_cast<double>(intervals);
  r_ = dt / (h * h);
  const std::size_t m = n_ - 1;
  const double diag = 1.0 + 2.0 * phi_ * r_;
  const double off = -phi_ * r_;
  c_prime_.resize(m);
  inv_denom_.resize(m);
  double prev = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double denom = diag - off * prev;
    inv_denom_[i] = 1.0 / denom;
    prev = off / denom;
    c_prime_[i] = prev;
  }
}

void ImexStepper::solve(std::vector<double>& d) const {
  const double off = -phi_ * r_;
  const std::size_t m = n_ - 1;
  d[0] *= inv_denom_[0];
  for (std::size_t i = 1; i < m; ++i) d[i] = (d[i] - off * d[i - 1]) * inv_denom_[i];
  for (std::size_t i = m - 1; i-- > 0;) d[i] -= c_prime_[i] * d[i + 1];
}

double ImexStepper::advance(const std::vector<double>& in, std::vector<double>& out, double u,
                            double v, std::vector<char>* clamped) const {
  if (in.size() != n_ + 1) throw DomainError("ImexStepper::advance: state size mismatch");
  const double explicit_r = (1.0 - phi_) * r_;
  const std::size_t m = n_ - 1;
  thread_local std::vector<double> rhs;
  rhs.resize(m);
  for (std::size_t i = 1; i < n_; ++i) {
    const double y = in[i];
    if (!std::isfinite(y)) throw NumericalError("ImexStepper: non-finite state");
    rhs[i - 1] = y + explicit_r * (in[i - 1] - 2.0 * y + in[i + 1]) + dt_ * reaction_.f(y);
  }
  rhs[0] += phi_ * r_ * u;
  rhs[m - 1] += phi_ * r_ * v;
  solve(rhs);

  out.resize(n_ + 1);
  out[0] = u;
  out[n_] = v;
  if (clamped != nullptr) clamped->assign(n_ + 1, 0);
  double excess = 0.0;
  for (std::size_t i = 1; i < n_; ++i) {
    double y = rhs[i - 1];
    if (y < -kClampSlack || y > 1.0 + kClampSlack) {
      excess = std::max(excess, y < 0.0 ? -kClampSlack - y : y - 1.0 - kClampSlack);
      y = std::clamp(y, -kClampSlack, 1.0 + kClampSlack);
      if (clamped != nullptr) (*clamped)[i] = 1;
    }
    out[i] = y;
  }
  return excess;
}

double monotone_dt(const ReactionModel& model, double length, std::size_t intervals,
                   double implicitness) {
  const double h = length / static_cast<double>(intervals);
  const double rate =
      2.0 * (1.0 - implicitness) / (h * h) + std::max(0.0, -model.min_f_prime());
  return rate > 0.0 ? 1.0 / rate : std::numeric_limits<double>::infinity();
}

double reference_dt(const ReactionModel& model, double length, std::size_t intervals,
                    double implicitness) {
  return std::min(1e-3, 0.9 * monotone_dt(model, length, intervals, implicitness));
}

Field step(const ReactionModel& model, const Field& y, double u, double v, double dt,
           double implicitness) {
  const ImexStepper stepper(model.term(), y.length, y.intervals(), dt, implicitness);
  Field out = y;
  stepper.advance(y.values, out.values, u, v);
  return out;
}

Trajectory simulate(const ReactionModel& model, const Field& y0, const ControlSchedule& schedule,
                    const SimulateOptions& options) {
  schedule.validate();
  if (options.target && options.target->values.size() != y0.values.size()) {
    throw DomainError("simulate: target grid differs from the initial datum");
  }
  const std::size_t every = std::max<std::size_t>(options.record_every, 1);
  Trajectory traj;
  traj.schedule = schedule;
  auto record = [&](double t, const Field& y) {
    traj.times.push_back(t);
    traj.snapshots.push_back(y);
    if (options.target) traj.distance.push_back(max_distance(y, *options.target));
    if (options.lyapunov) traj.lyapunov.push_back(lyapunov_v(y));
  };
  record(0.0, y0);
  if (schedule.steps() == 0) return traj;

  const ImexStepper stepper(model.term(), y0.length, y0.intervals(), schedule.dt,
                            options.implicitness);
  Field cur = y0;
  Field next = y0;
  for (std::size_t k = 0; k < schedule.steps(); ++k) {
    const double excess = stepper.advance(cur.values, next.values, schedule.u[k], schedule.v[k]);
    if (excess > 0.0) {
      ++traj.violations;
      traj.max_violation = std::max(traj.max_violation, excess);
    }
    std::swap(cur, next);
    if ((k + 1) % every == 0 || k + 1 == schedule.steps()) record(schedule.time(k + 1), cur);
  }
  return traj;
}

double stationary_residual(const ReactionModel& model, const Field& y) {
  const double h = y.spacing();
  double res = 0.0;
  for (std::size_t j = 1; j + 1 < y.values.size(); ++j) {
    const double lap = (y.values[j + 1] - 2.0 * y.values[j] + y.values[j - 1]) / (h * h);
    res = std::max(res, std::abs(lap + model.f(y.values[j])));
  }
  return res;
}

std::optional<Field> detect_convergence(const ReactionModel& model, const Trajectory& traj,
                                        double window, double tol) {
  if (traj.snapshots.empty()) return std::nullopt;
  const double t_end = traj.times.back();
  const double t_start = t_end - window;
  const auto& sched = traj.schedule;
  if (sched.steps() > 0) {
    const std::size_t last = sched.steps() - 1;
    for (std::size_t k = sched.steps(); k-- > 0;) {
      if (sched.time(k + 1) <= t_start) break;
      if (sched.u[k] != sched.u[last] || sched.v[k] != sched.v[last]) return std::nullopt;
    }
  }
  const Field& final = traj.snapshots.back();
  double change = 0.0;
  for (std::size_t i = traj.snapshots.size(); i-- > 0;) {
    if (traj.times[i] < t_start - 1e-12) break;
    change = std::max(change, max_distance(traj.snapshots[i], final));
  }
  if (change > tol) return std::nullopt;
  if (stationary_residual(model, final) > 10.0 * tol) return std::nullopt;
  return final;
}

double lyapunov_v(const Field& y) {
  const double h = y.spacing();
  double sum = 0.0;
  const std::size_t n = y.values.size();
  for (std::size_t j = 0; j < n; ++j) {
    const double v = y.values[j];
    if (!(v > 1e-14)) throw DomainError("lyapunov_v: state must be positive");
    const double w = (j == 0 || j + 1 == n) ? 0.5 : 1.0;
    sum += w * (v - 1.0 - std::log(v));
  }
  return sum * h;
}

ComparisonReport check_comparison(const ReactionModel& model, const Field& y0_low,
                                  const Field& y0_high, const ControlSchedule& schedule,
                                  double implicitness) {
  schedule.validate();
  if (y0_low.values.size() != y0_high.values.size()) {
    throw DomainError("check_comparison: grid mismatch");
  }
  const ImexStepper stepper(model.term(), y0_low.length, y0_low.intervals(), schedule.dt,
                            implicitness);
  ComparisonReport rep;
  auto gap = [](const Field& lo, const Field& hi) {
    double g = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < lo.values.size(); ++j) g = std::max(g, lo.values[j] - hi.values[j]);
    return g;
  };
  Field lo = y0_low, hi = y0_high, lo_next = y0_low, hi_next = y0_high;
  rep.max_gap = gap(lo, hi);
  for (std::size_t k = 0; k < schedule.steps(); ++k) {
    stepper.advance(lo.values, lo_next.values, schedule.u[k], schedule.v[k]);
    stepper.advance(hi.values, hi_next.values, schedule.u[k], schedule.v[k]);
    std::swap(lo, lo_next);
    std::swap(hi, hi_next);
    const double g = gap(lo, hi);
    if (g > rep.max_gap) {
      rep.max_gap = g;
      rep.time_of_max = schedule.time(k + 1);
    }
  }
  rep.final_low = std::move(lo);
  rep.final_high = std::move(hi);
  return rep;
}

}  // namespace rdc
