#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rdc/optimal_control.hpp"
#include "rdc/pde.hpp"
#include "rdc/phase_plane.hpp"

namespace rdc {

struct StaircaseConfig {
  /// boundary value of the static first phase
  double epsilon = 0.02;
  /// capture radius for local steering
  double eta = 0.01;
  /// dwell per path step
  double tau = 1.0;
  /// success: max-norm distance to theta at the end
  double tol_final = 1e-2;
  std::size_t n_steps = 64;
  /// horizon of each local steering problem
  double steer_horizon = 1.0;
  /// steering box half-width is steer_box * eta around the target's controls
  double steer_box = 5.0;
  /// give up on the first phase after this long
  double t_max = 500.0;
  /// run even when L >= L* (to exhibit the obstruction)
  bool override_gate = false;
  bool tie_controls = false;

  // discretisation shared by all phases
  std::size_t n_x = 100;
  double dt = 0.01;
  double implicitness = 1.0;
  /// snapshot spacing of the recorded trajectory, in steps
  std::size_t record_every = 10;

  /// DomainError on out-of-range values.
  void validate(const ReactionModel& model) const;
};

struct StrategyOutcome {
  bool success = false;
  ControlSchedule schedule;
  /// end of the static phase, end of the first steering, end of the run
  double t0 = 0.0;
  double t1 = 0.0;
  double t_end = 0.0;
  double final_error = 0.0;
  Trajectory trajectory;
  /// static strategy: whether L is below the threshold of its target
  bool below_threshold = false;
  double threshold = kInfinity;
  /// staircase: max-norm distance to w_s at the end of each dwell (before
  /// any correction) and the number of corrections made
  std::vector<double> dwell_errors;
  std::size_t corrections = 0;
  std::vector<std::pair<double, double>> path_controls;
  std::string message;
};

/// Constant controls u = v = a on [0, T]. `a` must be 0, 1 or theta.
StrategyOutcome static_strategy(const ReactionModel& model, const Field& y0, double a, double T,
                                const StaircaseConfig& cfg = {});

struct SteerResult {
  ControlSchedule schedule;
  double achieved_error = 0.0;
  Field final_state;
};

/// Terminal-cost steering from y_now onto `target` over `horizon`, with
/// controls kept within steer_box * eta of the target's boundary values.
/// CaptureError if ||y_now - target|| > eta.
SteerResult local_steer(const ReactionModel& model, const Field& y_now, const Field& target,
                        double horizon, const StaircaseConfig& cfg);

/// The unique steady state in Gamma with boundary values epsilon, from a
/// long static run, cross-checked against shooting. Cached per model, L,
/// epsilon and grid.
struct InitState {
  Field field;
  SteadyState state;
  /// max-norm gap between the two constructions
  double mismatch = 0.0;
};
InitState y_init(const ReactionModel& model, double length, const StaircaseConfig& cfg);

/// Static epsilon phase, local steering onto y_init, then path following
/// to theta with local corrections.
StrategyOutcome staircase_to_theta(const ReactionModel& model, const Field& y0,
                                   const StaircaseConfig& cfg = {});

struct UniformTimeProbe {
  double t_star = 0.0;
  double t_zero = 0.0;
  double t_one = 0.0;
  /// capture times of the random intermediate initial data
  std::vector<double> times;
  bool all_within = false;
};

/// First-phase capture times from the extremal data 0 and 1 and from
/// `probes` random data in between.
UniformTimeProbe uniform_time_probe(const ReactionModel& model, double length,
                                    const StaircaseConfig& cfg = {}, std::uint64_t seed = 1,
                                    std::size_t probes = 10);

/// Time needed by the zero (resp. one) control run to get uniformly below
/// (resp. above) theta, a lower bound for reaching theta; the larger of the
/// two when both apply, +inf if not reached before cfg.t_max. With a
/// margin m the levels are theta + m and theta - m, which bounds the time to
/// come within m of theta in max norm.
double minimal_time_lower_bound_check(const ReactionModel& model, const Field& y0,
                                      const StaircaseConfig& cfg = {}, double margin = 0.0);

/// First time the static epsilon run from y0 comes within eta of y_init;
/// +inf if not before cfg.t_max.
double capture_time(const ReactionModel& model, const Field& y0, const Field& target,
                    const StaircaseConfig& cfg);

}  // namespace rdc
