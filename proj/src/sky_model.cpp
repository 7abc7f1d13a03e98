// SPDX-License-Identifier: Apache-2.0
#include "cri/sky_model.hpp"

#include <cmath>
#include <stdexcept>

#include "cri/rng.hpp"

namespace cri {

std::vector<int> SkyImage::support() const {
  std::vector<int> s;
  for (Eigen::Index i = 0; i < values.size(); ++i)
    if (values(i) != 0.0) s.push_back(static_cast<int>(i));
  return s;
}

void SkyImage::validate() const {
  if (n1 <= 0 || n1 % 2 != 0)
    throw std::invalid_argument("sky: side must be positive and even");
  if (values.size() != static_cast<Eigen::Index>(n1) * n1)
    throw std::invalid_argument("sky: value vector length is not n1^2");
  if ((values.array() < 0.0).any())
    throw std::invalid_argument("sky: intensities must be nonnegative");
  if (!(fov > 0.0)) throw std::invalid_argument("sky: fov must be positive");
}

SkyImage random_sparse_sky(int n1, int k, std::uint64_t seed, double fov) {
  const Eigen::Index n = static_cast<Eigen::Index>(n1) * n1;
  if (k < 0 || static_cast<Eigen::Index>(k) > n)
    throw std::invalid_argument("random_sparse_sky: k out of range");
  SkyImage img;
  img.n1 = n1;
  img.fov = fov;
  img.values = Eigen::VectorXd::Zero(n);
  Rng rng(seed);
  for (int idx : rng.sample_without_replacement(static_cast<int>(n), k))
    img.values(idx) = 1.0;
  img.validate();
  return img;
}

double dc_component(const SkyImage& img) {
  return img.values.sum() / static_cast<double>(img.n1);
}

double snr_db(const Eigen::VectorXd& truth, const Eigen::VectorXd& estimate) {
  if (truth.size() != estimate.size())
    throw std::invalid_argument("snr_db: length mismatch");
  const double nt = truth.norm();
  if (nt == 0.0) throw std::invalid_argument("snr_db: truth is all-zero");
  const double nr = (truth - estimate).norm();
  if (nr == 0.0) return 300.0;
  return std::min(300.0, 20.0 * std::log10(nt / nr));
}

}  // namespace cri
