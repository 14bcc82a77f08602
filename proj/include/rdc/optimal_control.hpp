#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "rdc/pde.hpp"
#include "rdc/reaction.hpp"

namespace rdc {

/// Terminal-cost boundary control problem
///   min sum_j w_j (y_j(T) - target_j)^2  over  u_min <= u_k <= u_max, same for v
/// on the discrete IMEX scheme (w_j trapezoid weights).
struct OcpSpec {
  ReactionModel model;
  double length;
  double horizon;
  Field y0;
  Field y_target;
  std::size_t n_x;
  std::size_t n_t;
  /// optimise a single control with u = v
  bool tie_controls = false;
  /// freeze both controls at this value
  std::optional<double> fixed_controls;
  double implicitness = 1.0;
  /// box for each control; [0, 1] unless narrowed (local steering)
  double u_min = 0.0, u_max = 1.0;
  double v_min = 0.0, v_max = 1.0;

  /// Ramp initial datum and constant target theta (bistable) or 1
  /// (monostable) on an n_x grid.
  OcpSpec(ReactionModel model, double length, double horizon, std::size_t n_x = 60,
          std::size_t n_t = 400);

  double dt() const { return horizon / static_cast<double>(n_t); }
  /// DomainError on inconsistent sizes or bounds.
  void validate() const;
};

struct OptimResult {
  ControlSchedule schedule;
  std::vector<double> cost_history;
  double final_cost = 0.0;
  double grad_norm_final = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  /// max-norm distance of y(T) to the target
  double terminal_error = 0.0;
  Field final_state;
};

struct Forward {
  Trajectory trajectory;
  double cost = 0.0;
};

/// Simulates the spec with `schedule` (every step recorded).
Forward forward(const OcpSpec& spec, const ControlSchedule& schedule);

struct Gradient {
  std::vector<double> u;
  std::vector<double> v;
  double cost = 0.0;
};

/// Exact gradient of the discrete cost by the adjoint of the IMEX scheme.
/// With tie_controls both components hold d/dw of the tied control; with
/// fixed_controls both are zero.
Gradient gradient(const OcpSpec& spec, const ControlSchedule& schedule);

struct SolveOptions {
  std::size_t max_iters = 500;
  /// stop when the projected gradient step has this max norm
  double tol_grad = 1e-9;
  /// stop as soon as the terminal max-norm error is at most this
  std::optional<double> target_error;
  double armijo = 1e-4;
};

/// Projected gradient descent with Barzilai-Borwein trial steps and Armijo
/// backtracking. Deterministic for a given start.
OptimResult solve_terminal(const OcpSpec& spec, const ControlSchedule& init,
                           const SolveOptions& options = {});

/// Constant schedule at the target's mean value (theta for the default target).
ControlSchedule default_schedule(const OcpSpec& spec);

struct MinimalTime {
  double t_f = 0.0;
  OptimResult result;
  /// (T, feasible) in the order tried
  std::vector<std::pair<double, bool>> trials;
};

struct MinimalTimeOptions {
  double t_lo = 0.0;
  double t_hi = 20.0;
  /// feasibility: max-norm terminal error at most this
  double feas_tol = 2e-2;
  double bisect_tol = 0.05;
  std::size_t max_bisect = 40;
  SolveOptions solve;
  /// starting schedule at t_hi; default_schedule when empty
  std::optional<ControlSchedule> init;
};

/// Smallest horizon, to bisect_tol, at which solve_terminal meets feas_tol.
/// The horizon in `spec` is ignored; n_t stays fixed so dt scales with T.
/// InfeasibleError if t_hi is not feasible.
MinimalTime minimal_time(const OcpSpec& spec, const MinimalTimeOptions& options = {});

}  // namespace rdc
