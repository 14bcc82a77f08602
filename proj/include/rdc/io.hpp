#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "rdc/optimal_control.hpp"
#include "rdc/pde.hpp"
#include "rdc/phase_plane.hpp"

namespace rdc::io {

using Json = nlohmann::ordered_json;

/// Shortest round-trip text for a double; "inf", "-inf" and "nan" otherwise.
std::string format_number(double x);
/// JSON number, or the strings "inf" / "-inf" / "nan".
Json number(double x);

/// Long format, header t,x,y.
void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj);

/// "RDTJ1", uint64 N_x (intervals), uint64 N_t (snapshots), double L,
/// double dt (snapshot spacing), then N_t rows of N_x + 1 doubles, all
/// little-endian.
void write_trajectory_binary(const std::filesystem::path& path, const Trajectory& traj);

struct BinaryTrajectory {
  std::uint64_t intervals = 0;
  std::uint64_t snapshots = 0;
  double length = 0.0;
  double dt = 0.0;
  std::vector<double> data;
};
BinaryTrajectory read_trajectory_binary(const std::filesystem::path& path);

/// Header t,u,v; one row per step at its left endpoint.
void write_schedule_csv(const std::filesystem::path& path, const ControlSchedule& schedule);

/// Header iter,cost.
void write_cost_history_csv(const std::filesystem::path& path, const std::vector<double>& costs);

/// Header x followed by one column per requested time (nearest snapshot).
void write_profiles_csv(const std::filesystem::path& path, const Trajectory& traj,
                        const std::vector<double>& times);

/// Header x followed by one column w<k> per stationary solution.
void write_stationary_csv(const std::filesystem::path& path,
                          const std::vector<SteadyState>& states);

void write_json(const std::filesystem::path& path, const Json& doc);

}  // namespace rdc::io
