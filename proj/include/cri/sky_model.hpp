// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace cri {

// Discretized nonnegative sky intensity on an n1 x n1 grid, vectorized
// row-major. Grid positions are signed: index j on an axis corresponds to the
// coordinate (j < n1/2 ? j : j - n1) * (fov / n1), so index 0 is the origin.
struct SkyImage {
  int n1 = 0;
  double fov = 1.0;  // direction-cosine extent L of the grid
  Eigen::VectorXd values;

  Eigen::Index pixel_count() const { return values.size(); }
  std::vector<int> support() const;

  // Throws std::invalid_argument on violated invariants (even side,
  // nonnegative intensities, length n1^2).
  void validate() const;
};

// Exactly k pixels set to 1, support drawn uniformly without replacement.
SkyImage random_sparse_sky(int n1, int k, std::uint64_t seed, double fov = 1.0);

// Zero-frequency coefficient of the unitary 2-D DFT: sum(values) / n1.
double dc_component(const SkyImage& img);

// 20 log10(||truth|| / ||truth - estimate||), capped at 300 dB.
// Throws std::invalid_argument for an all-zero truth or length mismatch.
double snr_db(const Eigen::VectorXd& truth, const Eigen::VectorXd& estimate);

}  // namespace cri
