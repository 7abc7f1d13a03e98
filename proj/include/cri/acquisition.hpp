// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "cri/linop.hpp"
#include "cri/nufft.hpp"
#include "cri/sketch.hpp"
#include "cri/sky_model.hpp"

namespace cri {

// One short-time-integration interval of antenna samples.
struct SignalBatch {
  int batch_index = 0;        // 0-based into the plan
  Eigen::MatrixXcd samples;   // Q x I
  Eigen::Index sample_count() const { return samples.cols(); }
};

// Antenna signals for one batch: x_b[i] = A_b s[i] + n[i], with per-pixel
// source variance Delta^2 * x_j (quadrature normalization, so E[x x^*]
// reproduces the interferometric matrix exactly) and noise CN(0, noise_cov).
// Throws ResourceError when Q * N * I exceeds `budget` products.
SignalBatch simulate_batch(const SkyImage& img, const VisibilityPlan& plan,
                           int batch, Eigen::Index num_samples,
                           const Eigen::MatrixXcd& noise_cov,
                           std::uint64_t seed, double budget = 1e10);

// (1/I) sum_i x_i x_i^*; exactly Hermitian by construction.
Eigen::MatrixXcd sample_covariance(const SignalBatch& batch);

// Classical acquisition: concatenated vec(C_b - noise_cov), length Q^2 B.
cvec classical_acquire(const std::vector<SignalBatch>& batches,
                       const Eigen::MatrixXcd& noise_cov);

// Compressive acquisition: beamformed sketches, per-batch rank-one
// projections with the noise bias removed, then modulated aggregation.
// Streaming contract: O(P Q) work per sample and O(P M) state; no Q x Q
// covariance matrix is ever materialized.
cvec compressive_acquire(const std::vector<SignalBatch>& batches,
                         const SketchEnsemble& sketches,
                         const Eigen::MatrixXcd& noise_cov);

// DC estimate from single-antenna autocorrelations:
// mean over (q, b) of (C_b)_qq - (noise_cov)_qq, divided by varpi = L^2/sqrt(N).
double estimate_dc(const std::vector<SignalBatch>& batches,
                   const Eigen::MatrixXcd& noise_cov, double varpi);

// Same estimate computed from already-formed (possibly exact) covariances.
double estimate_dc_from_covariances(const std::vector<Eigen::MatrixXcd>& covs,
                                    const Eigen::MatrixXcd& noise_cov,
                                    double varpi);

}  // namespace cri
