#pragma once

#include <cstddef>
#include <limits>
#include <utility>
#include <vector>

#include "rdc/reaction.hpp"

namespace rdc {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Lengths above this are reported as +infinity.
inline constexpr double kLengthOverflow = 1e6;

/// A point (w, w') of the phase plane of -w'' = f(w).
struct PhasePoint {
  double w = 0.0;
  double wp = 0.0;
};

/// 1/2 w'^2 + F(w), conserved along stationary trajectories.
double energy(const ReactionModel& model, PhasePoint p);

/// Stationary profile sampled on a uniform grid of [0, L].
struct SteadyState {
  std::vector<double> grid;
  std::vector<double> values;
  std::vector<double> slopes;  // w' from the integrator, not differenced
  double left_control = 0.0;
  double right_control = 0.0;
  PhasePoint init;
  double energy = 0.0;
  /// The trajectory left the admissible box before x = L; samples stop there.
  bool exited = false;
  double exit_x = kInfinity;
  /// Root found as a tangency of the shooting residual rather than a sign change.
  bool low_confidence = false;

  double length() const { return grid.empty() ? 0.0 : grid.back(); }
};

/// Ordered family of steady states w_s, s = 0, 1/N, ..., 1, with their
/// boundary controls (u_s, v_s) = (w_s(0), w_s(L)).
struct SteadyPath {
  std::vector<double> s;
  std::vector<SteadyState> states;
  std::vector<std::pair<double, double>> controls;
  /// max over consecutive pairs of the sup-norm distance
  double max_gap = 0.0;
};

/// Infimum of a length functional together with where it is reached.
struct Threshold {
  double value = kInfinity;
  /// false when the infimum is a limit at the edge of the parameter range
  bool attained = false;
  /// minimizing alpha (l_star) or turning point beta (l_theta, l_a)
  double argmin = 0.0;
};

// -- length functionals -------------------------------------------------------

/// Length sqrt(2) |int_base^turn dy / sqrt(F(turn) - F(y))| of the stationary
/// arc that leaves `base` and turns back at `turn`. Requires F(turn) > F(y)
/// strictly between the two points. Returns kInfinity past kLengthOverflow.
double arc_length(const ReactionModel& model, double base, double turn);

/// L(alpha): length of the arc launched at (0, sqrt(2 alpha)) until it comes
/// back to w = 0. DomainError unless 0 < alpha <= F(1); L(F(1)) = +inf.
double length_of_alpha(const ReactionModel& model, double alpha);

/// L* = inf over alpha in (0, F(1)) of L(alpha). +inf for bistable models
/// with F(1) = 0. For monostable models whose infimum sits at alpha -> 0 the
/// extrapolated limit is returned with attained = false.
Threshold l_star(const ReactionModel& model);

/// pi / sqrt(max_{0<y<=1} f(y)/y).
double l_star_lower_bound(const ReactionModel& model);

/// L_theta = inf over beta != theta of arc_length(theta, beta).
Threshold l_theta(const ReactionModel& model);

/// pi / sqrt(max_{y != theta} f(y)/(y - theta)), the analogue of
/// l_star_lower_bound after shifting the base state to theta.
double l_theta_lower_bound(const ReactionModel& model);

/// L^a: minimal return length to w = a over trajectories leaving a with
/// sqrt(-2F(a)) <= w'(0) <= sqrt(2(F(1) - F(a))). Equals l_star at a = 0.
/// For a above theta1 arbitrarily short returns exist and 0 is returned.
Threshold l_a(const ReactionModel& model, double a);

// -- stationary trajectories --------------------------------------------------

struct IntegrateOptions {
  /// max-norm tolerance of the Richardson comparison
  double tol = 1e-9;
  /// admissible box for w; leaving it stops the integration
  double lower = 0.0;
  double upper = 1.0;
  double box_slack = 1e-9;
  int max_substeps = 4096;
};

/// Integrates w' = z, z' = -f(w) from `init` over [0, L] with a symmetric
/// sixth-order composition of Stormer-Verlet, n output intervals, doubling
/// the substeps per interval until two successive resolutions agree to
/// `tol`. NumericalError if that never happens.
SteadyState integrate_stationary(const ReactionModel& model, PhasePoint init, double length,
                                 std::size_t n, const IntegrateOptions& options = {});

/// max |-(w_{j+1} - 2 w_j + w_{j-1}) / h^2 - f(w_j)| over interior samples.
double stationary_residual(const ReactionModel& model, const SteadyState& state);

struct ShootingOptions {
  std::size_t slopes = 2048;
  std::size_t samples = 512;
  double slope_tol = 1e-10;
};

/// All solutions 0 <= w <= 1 of -w'' = f(w), w(0) = a, w(L) = b found by
/// shooting on w'(0).
std::vector<SteadyState> find_stationary_solutions(const ReactionModel& model, double a, double b,
                                                   double length,
                                                   const ShootingOptions& options = {});

/// Whether p lies in the region bounded by the homoclinic orbit,
/// 1/2 wp^2 + F(w) <= 0. DomainError if p.w > theta1.
bool in_gamma(const ReactionModel& model, PhasePoint p);

struct PathOptions {
  std::size_t n_steps = 64;
  /// refine until consecutive states are this close in sup norm
  double max_gap = 0.02;
  /// samples per state
  std::size_t samples = 256;
  std::size_t max_steps = 4096;
};

/// Straight segment in the phase plane from y_init.init to (theta, 0), each
/// point integrated over [0, L]. InfeasibleError naming the first s whose
/// state leaves [0, 1] or whose controls are not strictly inside (0, 1).
SteadyPath build_path_to_theta(const ReactionModel& model, const SteadyState& y_init,
                               double length, const PathOptions& options = {});

}  // namespace rdc
