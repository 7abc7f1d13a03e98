// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace cri {

// Antenna array plus earth-rotation synthesis parameters. Positions are
// east-north-up meters at the site; the uv projection additionally needs the
// site latitude (default: VLA).
struct ArrayLayout {
  std::vector<Eigen::Vector3d> antennas;  // ENU, meters
  std::vector<std::string> names;         // optional, parallel to antennas
  double wavelength = 0.21;               // meters
  double declination = 0.7853981633974483;  // rad (45 deg)
  double latitude = 0.5948404909784201;     // rad (34.0784 deg, VLA site)
  double hour_angle_start = 0.0;          // rad
  double hour_angle_end = 0.0;            // rad
  int num_batches = 1;

  int num_antennas() const { return static_cast<int>(antennas.size()); }

  // Throws ConfigError when invariants are violated (Q >= 2, B >= 1,
  // lambda > 0, all positions distinct).
  void validate() const;
};

// Per-batch projected geometry, all in wavelength-normalized units.
struct BatchGeometry {
  int batch_index = 0;          // 1-based
  Eigen::Matrix2Xd positions;   // 2 x Q: projected (u, v) / lambda
  Eigen::Matrix2Xd baselines;   // 2 x Q(Q-1): nu_jk = pos_j - pos_k, j != k
  std::vector<std::pair<int, int>> pairs;  // (j, k) per baseline column, 0-based
};

// Y-shaped array: three arms at 120 degrees, antenna i of each arm at radius
// r_max * (i / per_arm)^1.716. Hour-angle span defaults to five hours
// centered on transit.
ArrayLayout make_vla_like(int per_arm, double r_max);

// Deterministic synthesis: batch b observes at the midpoint hour angle of the
// b-th of B equal subdivisions of the span; antenna ENU positions are
// projected onto the (u, v) plane at (h_b, declination) and divided by the
// wavelength. Baselines are all ordered off-diagonal differences.
std::vector<BatchGeometry> synthesize_batches(const ArrayLayout& layout);

// Projected (u, v) of one ENU position, in meters (not yet / lambda).
Eigen::Vector2d project_uv(const Eigen::Vector3d& enu, double hour_angle,
                           double declination, double latitude);

struct CollisionReport {
  std::size_t collision_pairs = 0;  // distinct baseline pairs closer than tol
  std::size_t total_baselines = 0;
  double tolerance = 0.0;  // in grid units
};

// Counts baseline pairs (across all batches) closer than `tolerance` grid
// units, where grid coordinates are `scale * nu`. Zero collisions means the
// distinct-visibility assumption holds numerically.
CollisionReport check_distinct_visibilities(
    const std::vector<BatchGeometry>& batches, double tolerance,
    double scale = 1.0);

// CSV with header: name,east_m,north_m,up_m. Other layout parameters keep
// their defaults and can be overridden afterwards.
ArrayLayout load_array_csv(const std::string& path);
void save_array_csv(const std::string& path, const ArrayLayout& layout);

}  // namespace cri
