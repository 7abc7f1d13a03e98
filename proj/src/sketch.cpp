// SPDX-License-Identifier: Apache-2.0
#include "cri/sketch.hpp"

#include <cmath>
#include <stdexcept>

#include "cri/rng.hpp"

namespace cri {

void SketchEnsemble::validate() const {
  if (q < 1 || p < 1 || num_batches < 1 || m < 1)
    throw std::invalid_argument("sketches: all dimensions must be positive");
  if (static_cast<int>(alphas.size()) != num_batches ||
      static_cast<int>(betas.size()) != num_batches)
    throw std::invalid_argument("sketches: batch count mismatch");
  for (int b = 0; b < num_batches; ++b) {
    if (alphas[b].rows() != q || alphas[b].cols() != p ||
        betas[b].rows() != q || betas[b].cols() != p)
      throw std::invalid_argument("sketches: vector shape mismatch");
  }
  if (gamma.rows() != num_batches || gamma.cols() != m)
    throw std::invalid_argument("sketches: modulation shape mismatch");
  if (((gamma.array() != 1.0) && (gamma.array() != -1.0)).any())
    throw std::invalid_argument("sketches: modulations must be +-1");
}

SketchEnsemble draw_sketches(int q, int p, int num_batches, int m,
                             std::uint64_t seed,
                             SketchEnsemble::Distribution dist) {
  SketchEnsemble s;
  s.q = q;
  s.p = p;
  s.num_batches = num_batches;
  s.m = m;
  s.dist = dist;
  s.seed = seed;
  s.alphas.resize(static_cast<std::size_t>(num_batches));
  s.betas.resize(static_cast<std::size_t>(num_batches));
  for (int b = 0; b < num_batches; ++b) {
    Rng rng(derive_seed(seed, {0x5e7c, static_cast<std::uint64_t>(b)}));
    auto draw = [&](Eigen::MatrixXcd& mat) {
      mat.resize(q, p);
      for (int col = 0; col < p; ++col)
        for (int row = 0; row < q; ++row)
          mat(row, col) = dist == SketchEnsemble::Distribution::UnitPhase
                              ? rng.unit_phase()
                              : rng.cnormal();
    };
    draw(s.alphas[static_cast<std::size_t>(b)]);
    draw(s.betas[static_cast<std::size_t>(b)]);
  }
  Rng grng(derive_seed(seed, {0xf00d}));
  s.gamma.resize(num_batches, m);
  for (int col = 0; col < m; ++col)
    for (int row = 0; row < num_batches; ++row)
      s.gamma(row, col) = grng.rademacher();
  s.validate();
  return s;
}

}  // namespace cri
