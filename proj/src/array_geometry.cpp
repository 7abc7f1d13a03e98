// SPDX-License-Identifier: Apache-2.0
#include "cri/array_geometry.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <numbers>
#include <sstream>
#include <unordered_map>

#include "cri/errors.hpp"

namespace cri {

namespace {
constexpr double kVlaArmExponent = 1.716;
constexpr double kFiveHoursRad = 5.0 * (2.0 * std::numbers::pi / 24.0);
}  // namespace

void ArrayLayout::validate() const {
  if (num_antennas() < 2) throw ConfigError("array: need at least 2 antennas");
  if (num_batches < 1) throw ConfigError("array: num_batches must be >= 1");
  if (!(wavelength > 0.0)) throw ConfigError("array: wavelength must be > 0");
  if (!(hour_angle_end >= hour_angle_start))
    throw ConfigError("array: hour angle span is reversed");
  for (std::size_t i = 0; i < antennas.size(); ++i)
    for (std::size_t j = i + 1; j < antennas.size(); ++j)
      if ((antennas[i] - antennas[j]).norm() == 0.0)
        throw ConfigError("array: duplicate antenna positions");
}

ArrayLayout make_vla_like(int per_arm, double r_max) {
  if (per_arm < 1) throw ConfigError("make_vla_like: per_arm must be >= 1");
  if (!(r_max > 0.0)) throw ConfigError("make_vla_like: r_max must be > 0");
  ArrayLayout layout;
  layout.hour_angle_start = -kFiveHoursRad / 2.0;
  layout.hour_angle_end = kFiveHoursRad / 2.0;
  // Arms toward north, south-east, south-west.
  const double arm_az[3] = {std::numbers::pi / 2.0,
                            std::numbers::pi / 2.0 + 2.0 * std::numbers::pi / 3.0,
                            std::numbers::pi / 2.0 + 4.0 * std::numbers::pi / 3.0};
  for (int arm = 0; arm < 3; ++arm) {
    for (int i = 1; i <= per_arm; ++i) {
      const double r =
          r_max * std::pow(static_cast<double>(i) / per_arm, kVlaArmExponent);
      Eigen::Vector3d enu(r * std::cos(arm_az[arm]), r * std::sin(arm_az[arm]),
                          0.0);
      layout.antennas.push_back(enu);
      layout.names.push_back("A" + std::to_string(arm * per_arm + i));
    }
  }
  layout.validate();
  return layout;
}

Eigen::Vector2d project_uv(const Eigen::Vector3d& enu, double hour_angle,
                           double declination, double latitude) {
  // ENU -> equatorial (X toward meridian/equator intersection, Y east,
  // Z celestial pole), then the standard synthesis rotation; w discarded.
  const double e = enu.x(), n = enu.y(), u = enu.z();
  const double x = -std::sin(latitude) * n + std::cos(latitude) * u;
  const double y = e;
  const double z = std::cos(latitude) * n + std::sin(latitude) * u;
  const double sh = std::sin(hour_angle), ch = std::cos(hour_angle);
  const double sd = std::sin(declination), cd = std::cos(declination);
  Eigen::Vector2d uv;
  uv.x() = sh * x + ch * y;
  uv.y() = -sd * ch * x + sd * sh * y + cd * z;
  return uv;
}

std::vector<BatchGeometry> synthesize_batches(const ArrayLayout& layout) {
  // Q = 1 is tolerated here (empty baseline sets); the Q >= 2 invariant is
  // enforced where a layout enters an experiment.
  if (layout.num_antennas() < 1) throw ConfigError("array: no antennas");
  if (layout.num_batches < 1) throw ConfigError("array: num_batches must be >= 1");
  if (!(layout.wavelength > 0.0)) throw ConfigError("array: wavelength must be > 0");
  if (layout.num_antennas() >= 2) layout.validate();
  const int q = layout.num_antennas();
  const int b_count = layout.num_batches;
  const double span = layout.hour_angle_end - layout.hour_angle_start;
  std::vector<BatchGeometry> out;
  out.reserve(static_cast<std::size_t>(b_count));
  for (int b = 1; b <= b_count; ++b) {
    const double h =
        layout.hour_angle_start + span * (static_cast<double>(b) - 0.5) / b_count;
    BatchGeometry geom;
    geom.batch_index = b;
    geom.positions.resize(2, q);
    for (int i = 0; i < q; ++i) {
      geom.positions.col(i) =
          project_uv(layout.antennas[static_cast<std::size_t>(i)], h,
                     layout.declination, layout.latitude) /
          layout.wavelength;
    }
    geom.baselines.resize(2, static_cast<Eigen::Index>(q) * (q - 1));
    geom.pairs.reserve(static_cast<std::size_t>(q) * (q - 1));
    Eigen::Index col = 0;
    for (int j = 0; j < q; ++j) {
      for (int k = 0; k < q; ++k) {
        if (j == k) continue;
        geom.baselines.col(col++) = geom.positions.col(j) - geom.positions.col(k);
        geom.pairs.emplace_back(j, k);
      }
    }
    out.push_back(std::move(geom));
  }
  return out;
}

CollisionReport check_distinct_visibilities(
    const std::vector<BatchGeometry>& batches, double tolerance, double scale) {
  if (batches.empty())
    throw ConfigError("check_distinct_visibilities: no batches");
  CollisionReport report;
  report.tolerance = tolerance;

  std::vector<Eigen::Vector2d> pts;
  for (const auto& geom : batches)
    for (Eigen::Index c = 0; c < geom.baselines.cols(); ++c)
      pts.push_back(scale * geom.baselines.col(c));
  report.total_baselines = pts.size();
  if (tolerance <= 0.0 || pts.empty()) return report;

  // Hash grid with cell size = tolerance; only the 3x3 neighborhood of a
  // point can contain partners closer than the tolerance.
  const double cell = tolerance;
  auto key = [cell](const Eigen::Vector2d& p) {
    const auto ix = static_cast<std::int64_t>(std::floor(p.x() / cell));
    const auto iy = static_cast<std::int64_t>(std::floor(p.y() / cell));
    return (static_cast<std::uint64_t>(ix) << 32) ^
           (static_cast<std::uint64_t>(iy) & 0xffffffffULL);
  };
  std::unordered_map<std::uint64_t, std::vector<std::size_t>> grid;
  grid.reserve(pts.size() * 2);
  for (std::size_t i = 0; i < pts.size(); ++i) grid[key(pts[i])].push_back(i);

  std::size_t collisions = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto ix = static_cast<std::int64_t>(std::floor(pts[i].x() / cell));
    const auto iy = static_cast<std::int64_t>(std::floor(pts[i].y() / cell));
    for (std::int64_t dx = -1; dx <= 1; ++dx) {
      for (std::int64_t dy = -1; dy <= 1; ++dy) {
        const std::uint64_t k = (static_cast<std::uint64_t>(ix + dx) << 32) ^
                                (static_cast<std::uint64_t>(iy + dy) & 0xffffffffULL);
        auto it = grid.find(k);
        if (it == grid.end()) continue;
        for (std::size_t j : it->second) {
          if (j <= i) continue;
          if ((pts[i] - pts[j]).norm() < tolerance) ++collisions;
        }
      }
    }
  }
  report.collision_pairs = collisions;
  return report;
}

ArrayLayout load_array_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open array CSV: " + path);
  std::string line;
  if (!std::getline(in, line))
    throw ConfigError("array CSV is empty: " + path);
  auto strip = [](std::string s) {
    while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.pop_back();
    std::size_t b = 0;
    while (b < s.size() && s[b] == ' ') ++b;
    return s.substr(b);
  };
  if (strip(line) != "name,east_m,north_m,up_m")
    throw ConfigError("array CSV header must be name,east_m,north_m,up_m");
  ArrayLayout layout;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    line = strip(line);
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string name, e, n, u;
    if (!std::getline(ss, name, ',') || !std::getline(ss, e, ',') ||
        !std::getline(ss, n, ',') || !std::getline(ss, u, ','))
      throw ConfigError("array CSV: malformed line " + std::to_string(lineno));
    try {
      layout.antennas.emplace_back(std::stod(e), std::stod(n), std::stod(u));
    } catch (const std::exception&) {
      throw ConfigError("array CSV: bad number on line " + std::to_string(lineno));
    }
    layout.names.push_back(name);
  }
  return layout;
}

void save_array_csv(const std::string& path, const ArrayLayout& layout) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write array CSV: " + path);
  out << "name,east_m,north_m,up_m\n";
  out.precision(17);
  for (std::size_t i = 0; i < layout.antennas.size(); ++i) {
    const std::string name =
        i < layout.names.size() ? layout.names[i] : "A" + std::to_string(i + 1);
    const auto& a = layout.antennas[i];
    out << name << ',' << a.x() << ',' << a.y() << ',' << a.z() << '\n';
  }
}

}  // namespace cri
