#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "rdc/reaction.hpp"

namespace rdc {

/// Samples of y(t, .) at x_j = j L / n, j = 0..n.
struct Field {
  double length = 0.0;
  std::vector<double> values;

  Field() = default;
  Field(double length_, std::vector<double> values_);

  static Field constant(double length, std::size_t intervals, double value);
  static Field sample(double length, std::size_t intervals,
                      const std::function<double(double)>& fn);
  /// 0.1 x/L + 0.8 (1 - x/L), the default initial datum of the experiments.
  static Field ramp(double length, std::size_t intervals);

  std::size_t intervals() const { return values.empty() ? 0 : values.size() - 1; }
  double spacing() const { return length / static_cast<double>(intervals()); }
  double x(std::size_t j) const { return spacing() * static_cast<double>(j); }
  std::vector<double> grid() const;
};

double max_distance(const Field& a, const Field& b);
/// max_j |y_j - c|
double max_distance(const Field& a, double c);

/// Piecewise constant boundary controls: u[k], v[k] act on [k dt, (k+1) dt).
struct ControlSchedule {
  double dt = 0.0;
  std::vector<double> u;
  std::vector<double> v;

  static ControlSchedule constant(std::size_t steps, double dt, double u, double v);

  std::size_t steps() const { return u.size(); }
  double horizon() const { return dt * static_cast<double>(u.size()); }
  double time(std::size_t k) const { return dt * static_cast<double>(k); }

  /// DomainError unless sizes agree, dt > 0 and every value is in [0, 1].
  void validate() const;
  void append(const ControlSchedule& other);
};

struct Trajectory {
  std::vector<double> times;
  std::vector<Field> snapshots;
  ControlSchedule schedule;
  /// max-norm distance of each snapshot to SimulateOptions::target, if given
  std::vector<double> distance;
  /// lyapunov_v of each snapshot when requested
  std::vector<double> lyapunov;
  /// steps whose raw update left [-1e-10, 1 + 1e-10], and the worst excess
  std::size_t violations = 0;
  double max_violation = 0.0;

  const Field& final() const { return snapshots.back(); }
};

/// Theta-weighted IMEX step for y_t - y_xx = f(y): diffusion with weight phi
/// on the new level (phi = 1/2 Crank-Nicolson, phi = 1 backward Euler),
/// reaction explicit, boundary nodes pinned to the controls.
///
/// The update is monotone (order preserving) and keeps [0, 1] invariant when
/// dt (2 (1 - phi) / h^2 + max(0, -min f')) <= 1; see monotone_dt.
class ImexStepper {
 public:
  ImexStepper(ReactionTerm reaction, double length, std::size_t intervals, double dt,
              double implicitness = 0.5);

  /// One step from `in` to `out` (both n + 1 long, may not alias). Nodes
  /// whose raw value was clamped get clamped[j] = 1 when `clamped` is given.
  /// Returns the largest excess beyond [-1e-10, 1 + 1e-10], 0 if none.
  double advance(const std::vector<double>& in, std::vector<double>& out, double u, double v,
                 std::vector<char>* clamped = nullptr) const;

  /// Solves M x = rhs on the interior nodes in place, M = I - phi dt D2.
  void solve(std::vector<double>& rhs) const;

  std::size_t intervals() const { return n_; }
  double dt() const { return dt_; }
  double ratio() const { return r_; }
  double implicitness() const { return phi_; }
  const ReactionTerm& reaction() const { return reaction_; }

 private:
  ReactionTerm reaction_;
  std::size_t n_;
  double dt_;
  double r_;
  double phi_;
  // Thomas factorisation of the constant interior matrix
  std::vector<double> c_prime_;
  std::vector<double> inv_denom_;
};

inline constexpr double kClampSlack = 1e-10;

/// Largest dt for which the IMEX step is monotone.
double monotone_dt(const ReactionModel& model, double length, std::size_t intervals,
                   double implicitness);

/// min(1e-3, 0.9 monotone_dt): the step used for property checks.
double reference_dt(const ReactionModel& model, double length, std::size_t intervals,
                    double implicitness);

/// Single step convenience wrapper.
Field step(const ReactionModel& model, const Field& y, double u, double v, double dt,
           double implicitness = 0.5);

struct SimulateOptions {
  std::size_t record_every = 1;
  double implicitness = 0.5;
  std::optional<Field> target;
  bool lyapunov = false;
};

/// Runs the whole schedule. Snapshots at every record_every steps and at the
/// final time.
Trajectory simulate(const ReactionModel& model, const Field& y0, const ControlSchedule& schedule,
                    const SimulateOptions& options = {});

/// max_j |-(y_{j+1} - 2 y_j + y_{j-1}) / h^2 - f(y_j)| over interior nodes.
double stationary_residual(const ReactionModel& model, const Field& y);

/// Trailing snapshot if the controls are constant over the last `window`
/// time units, the state moved by at most tol over it and its stationary
/// residual is at most 10 tol.
std::optional<Field> detect_convergence(const ReactionModel& model, const Trajectory& traj,
                                        double window, double tol);

/// Trapezoidal integral of y - 1 - ln y. DomainError if some y <= 1e-14.
double lyapunov_v(const Field& y);

struct ComparisonReport {
  /// max over time and space of low - high
  double max_gap = 0.0;
  double time_of_max = 0.0;
  Field final_low;
  Field final_high;
};

/// Runs both initial data with the same controls and monitors the order.
ComparisonReport check_comparison(const ReactionModel& model, const Field& y0_low,
                                  const Field& y0_high, const ControlSchedule& schedule,
                                  double implicitness = 1.0);

}  // namespace rdc
