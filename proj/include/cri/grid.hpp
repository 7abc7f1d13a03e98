// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <complex>
#include <numbers>

#include <Eigen/Dense>

namespace cri {

// Signed coordinate of pixel/bin index j on an axis of length n:
// {0, 1, ..., n/2-1, -n/2, ..., -1}. Index 0 is the origin.
inline int signed_coord(int j, int n) { return j < n / 2 ? j : j - n; }

// Row-major pixel n = row * n1 + col has 2-D grid coordinate
// (x, y) = (signed_coord(col), signed_coord(row)).
inline Eigen::Vector2d pixel_coord(Eigen::Index n, int n1) {
  const int row = static_cast<int>(n) / n1;
  const int col = static_cast<int>(n) % n1;
  return {static_cast<double>(signed_coord(col, n1)),
          static_cast<double>(signed_coord(row, n1))};
}

// exp(sign * i * 2 pi * f * signed_coord(j, n1) / n1) for j = 0..n1-1.
inline Eigen::VectorXcd axis_phases(double f, int n1, double sign) {
  Eigen::VectorXcd v(n1);
  const double step = sign * 2.0 * std::numbers::pi / n1;
  for (int j = 0; j < n1; ++j) {
    const double ph = step * f * signed_coord(j, n1);
    v(j) = {std::cos(ph), std::sin(ph)};
  }
  return v;
}

}  // namespace cri
