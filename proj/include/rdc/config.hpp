#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rdc/reaction.hpp"
#include "rdc/strategies.hpp"

namespace rdc::config {

/// Control value given as a number or as the string "theta".
struct ControlValue {
  bool theta = false;
  double value = 0.0;
  double resolve(const ReactionModel& model) const;
};

struct ModelSpec {
  std::string kind = "cubic";
  double theta = 1.0 / 3.0;
  ReactionModel build() const;
};

struct InitialData {
  /// "ramp" (0.1 x/L + 0.8 (1 - x/L)), "constant" or "linear"
  std::string kind = "ramp";
  double value = 0.0;
  double left = 0.0;
  double right = 0.0;
  Field sample(double length, std::size_t intervals) const;
};

struct SimulateParams {
  double T = 20.0;
  ControlValue u{true, 0.0};
  ControlValue v{true, 0.0};
  std::size_t n_x = 200;
  double dt = 1e-3;
  double implicitness = 1.0;
  std::size_t snapshots = 100;
  std::vector<double> profile_times{0.0, 0.25, 0.5, 0.75, 1.0};
};

struct OptimizeParams {
  double T = 20.0;
  std::size_t n_x = 60;
  std::size_t n_t = 400;
  bool tie_controls = false;
  std::optional<ControlValue> fixed_controls;
  /// starting schedule: "theta", "zero" or a number in [0, 1]
  std::optional<ControlValue> init;
  std::size_t max_iters = 3000;
  double tol_grad = 1e-9;
  std::optional<double> target_error;
  std::vector<double> profile_times{0.0, 0.25, 0.5, 0.75, 1.0};
};

struct MintimeParams {
  double t_lo = 0.0;
  double t_hi = 20.0;
  double feas_tol = 2e-2;
  double bisect_tol = 0.05;
  std::size_t max_bisect = 40;
  std::size_t n_x = 60;
  std::size_t n_t = 400;
  bool tie_controls = false;
  std::optional<ControlValue> init;
  std::size_t max_iters = 2000;
  std::vector<double> profile_times{0.0, 0.6, 0.7, 0.8, 0.9, 1.0};
};

struct StationaryParams {
  ControlValue a{false, 0.0};
  ControlValue b{false, 0.0};
  std::size_t slopes = 2048;
  std::size_t samples = 512;
};

struct ExperimentConfig {
  ModelSpec model;
  double L = 8.0;
  InitialData y0;
  std::uint64_t seed = 1;
  std::string out = "out";
  SimulateParams simulate;
  StaircaseConfig staircase;
  std::vector<double> staircase_profile_times{0.0, 0.25, 0.5, 0.75, 1.0};
  /// random initial data for the uniform capture-time probe (uses seed)
  std::size_t staircase_probes = 0;
  OptimizeParams optimize;
  MintimeParams mintime;
  StationaryParams stationary;
};

/// Recursive object merge; values of `over` win.
nlohmann::json merge(nlohmann::json base, const nlohmann::json& over);

/// Names accepted by preset().
const std::vector<std::string>& preset_names();

/// Configuration document of a named figure regime. ConfigError if unknown.
nlohmann::json preset(const std::string& name);

/// Parses JSON text. Syntax errors and schema violations (unknown keys,
/// wrong types, out-of-range values) raise ConfigError with a line number
/// when it can be located in `text`.
nlohmann::json parse_text(const std::string& text, const std::string& source);

/// Validates a merged document and converts it. `text` is used only to
/// locate offending keys for diagnostics.
ExperimentConfig from_json(const nlohmann::json& doc, const std::string& text = "",
                           const std::string& source = "config");

}  // namespace rdc::config
