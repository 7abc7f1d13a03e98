// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace cri {

// Random sketching vectors and modulation signs shared by the acquisition
// simulator and the forward imaging operators. Per-batch streams are derived
// from the master seed, so batches can be generated independently in any
// order with identical results.
struct SketchEnsemble {
  enum class Distribution { UnitPhase, Gaussian };

  int q = 0;        // antennas
  int p = 0;        // projections per batch
  int num_batches = 0;
  int m = 0;        // modulations
  Distribution dist = Distribution::UnitPhase;
  std::uint64_t seed = 0;

  std::vector<Eigen::MatrixXcd> alphas;  // per batch: Q x P, column p = alpha_pb
  std::vector<Eigen::MatrixXcd> betas;   // per batch: Q x P
  Eigen::MatrixXd gamma;                 // B x M, entries exactly +-1

  void validate() const;
};

SketchEnsemble draw_sketches(
    int q, int p, int num_batches, int m, std::uint64_t seed,
    SketchEnsemble::Distribution dist = SketchEnsemble::Distribution::UnitPhase);

}  // namespace cri
