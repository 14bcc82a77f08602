#include "rdc/io.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

#include <fmt/format.h>

#include "rdc/errors.hpp"

namespace rdc::io {

namespace {

constexpr char kMagic[5] = {'R', 'D', 'T', 'J', '1'};

std::ofstream open_out(const std::filesystem::path& path, bool binary = false) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path, binary ? std::ios::binary : std::ios::out);
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  return os;
}

template <typename T>
void put_le(std::ofstream& os, T value) {
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) {
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(bytes[i], bytes[sizeof(T) - 1 - i]);
  }
  os.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <typename T>
T get_le(std::ifstream& is) {
  unsigned char bytes[sizeof(T)];
  if (!is.read(reinterpret_cast<char*>(bytes), sizeof(T))) {
    throw std::runtime_error("truncated trajectory file");
  }
  if constexpr (std::endian::native == std::endian::big) {
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(bytes[i], bytes[sizeof(T) - 1 - i]);
  }
  T value;
  std::memcpy(&value, bytes, sizeof(T));
  return value;
}

}  // namespace

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return fmt::format("{}", x);
}

Json number(double x) {
  if (std::isfinite(x)) return x;
  return format_number(x);
}

void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj) {
  auto os = open_out(path);
  os << "t,x,y\n";
  for (std::size_t i = 0; i < traj.snapshots.size(); ++i) {
    const Field& y = traj.snapshots[i];
    const std::string t = format_number(traj.times[i]);
    for (std::size_t j = 0; j < y.values.size(); ++j) {
      os << t << ',' << format_number(y.x(j)) << ',' << format_number(y.values[j]) << '\n';
    }
  }
}

void write_trajectory_binary(const std::filesystem::path& path, const Trajectory& traj) {
  if (traj.snapshots.empty()) throw DomainError("write_trajectory_binary: empty trajectory");
  auto os = open_out(path, true);
  os.write(kMagic, sizeof(kMagic));
  const Field& first = traj.snapshots.front();
  put_le<std::uint64_t>(os, first.intervals());
  put_le<std::uint64_t>(os, traj.snapshots.size());
  put_le<double>(os, first.length);
  put_le<double>(os, traj.times.size() > 1 ? traj.times[1] - traj.times[0] : 0.0);
  for (const Field& y : traj.snapshots) {
    for (double v : y.values) put_le<double>(os, v);
  }
}

BinaryTrajectory read_trajectory_binary(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path.string());
  char magic[sizeof(kMagic)];
  if (!is.read(magic, sizeof(magic)) || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw std::runtime_error(path.string() + " is not an RDTJ1 trajectory");
  }
  BinaryTrajectory b;
  b.intervals = get_le<std::uint64_t>(is);
  b.snapshots = get_le<std::uint64_t>(is);
  b.length = get_le<double>(is);
  b.dt = get_le<double>(is);
  b.data.resize((b.intervals + 1) * b.snapshots);
  for (double& v : b.data) v = get_le<double>(is);
  return b;
}

void write_schedule_csv(const std::filesystem::path& path, const ControlSchedule& schedule) {
  auto os = open_out(path);
  os << "t,u,v\n";
  for (std::size_t k = 0; k < schedule.steps(); ++k) {
    os << format_number(schedule.time(k)) << ',' << format_number(schedule.u[k]) << ','
       << format_number(schedule.v[k]) << '\n';
  }
}

void write_cost_history_csv(const std::filesystem::path& path, const std::vector<double>& costs) {
  auto os = open_out(path);
  os << "iter,cost\n";
  for (std::size_t i = 0; i < costs.size(); ++i) os << i << ',' << format_number(costs[i]) << '\n';
}

void write_profiles_csv(const std::filesystem::path& path, const Trajectory& traj,
                        const std::vector<double>& times) {
  if (traj.snapshots.empty()) throw DomainError("write_profiles_csv: empty trajectory");
  std::vector<std::size_t> pick;
  for (double t : times) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < traj.times.size(); ++i) {
      if (std::abs(traj.times[i] - t) < std::abs(traj.times[best] - t)) best = i;
    }
    pick.push_back(best);
  }
  auto os = open_out(path);
  os << 'x';
  for (std::size_t i : pick) os << ",t=" << format_number(traj.times[i]);
  os << '\n';
  const Field& first = traj.snapshots.front();
  for (std::size_t j = 0; j < first.values.size(); ++j) {
    os << format_number(first.x(j));
    for (std::size_t i : pick) os << ',' << format_number(traj.snapshots[i].values[j]);
    os << '\n';
  }
}

void write_stationary_csv(const std::filesystem::path& path,
                          const std::vector<SteadyState>& states) {
  auto os = open_out(path);
  os << 'x';
  for (std::size_t k = 0; k < states.size(); ++k) os << ",w" << k;
  os << '\n';
  if (states.empty()) return;
  for (std::size_t j = 0; j < states.front().grid.size(); ++j) {
    os << format_number(states.front().grid[j]);
    for (const auto& s : states) os << ',' << format_number(s.values[j]);
    os << '\n';
  }
}

void write_json(const std::filesystem::path& path, const Json& doc) {
  auto os = open_out(path);
  os << doc.dump(2) << '\n';
}

}  // namespace rdc::io
