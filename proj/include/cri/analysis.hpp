// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "cri/linop.hpp"
#include "cri/nufft.hpp"
#include "cri/sketch.hpp"
#include "cri/solver.hpp"

namespace cri {

// Empirical restricted-isometry distortion of the DC-excluded visibility
// sampling on unit-norm sparse vectors.
struct RipReport {
  int sparsity = 0;
  int trials = 0;
  double max_distortion = 0.0;       // max |ratio - 1|
  double scaling_constant = 0.0;     // N / (varpi^2 V), applies to Delta^2-gain rows
  std::vector<double> ratios;        // scaled squared norms, one per trial
};

// `plan` must exclude DC rows. Samples Rademacher-signed unit vectors on
// uniform supports of size `sparsity` and records N/(varpi^2 V) ||G0 F v||^2
// (computed on the exact sampling path).
RipReport measure_rip_l2l2(const VisibilityPlan& plan, int sparsity, int trials,
                           std::uint64_t seed);

// Concentration of (1/P) ||A(J)||_1 around ||J||_F over random rank-one
// sketches, as a function of P.
struct ConcentrationReport {
  struct PerP {
    int p = 0;
    double min_ratio = 0.0;
    double median_ratio = 0.0;
    double max_ratio = 0.0;
  };
  int trials = 0;
  std::vector<PerP> results;
  double bracket_lo = 0.0;  // min over all P of min_ratio
  double bracket_hi = 0.0;  // max over all P of max_ratio
};

// `matrix_source(t)` supplies the t-th Hermitian test matrix (zero matrices
// are skipped). Fresh unit-phase sketch pairs are drawn per trial.
ConcentrationReport measure_rop_concentration(
    const std::function<cmat(int)>& matrix_source, Eigen::Index dim,
    const std::vector<int>& p_list, int trials, std::uint64_t seed);

// Equivalence suite between the operator compositions and the dense
// block-diagonal interferometric oracles.
struct EquivalenceReport {
  double max_entry_dev = 0.0;   // per-batch oracle entries vs exact sampling
  double max_irop_dev = 0.0;    // integrated ROP vs plain global ROP
  double max_mrop_dev = 0.0;    // modulated ROP vs sign-structured global ROP
  double max_frob_dev = 0.0;    // hollowed Frobenius norm vs ||G0 F x||
  bool pass = false;
  std::string failure;          // name of the first failing check
};

EquivalenceReport verify_appendix_equivalences(int q, int num_batches, int n1,
                                               int p, int m,
                                               std::uint64_t seed);

// Monte Carlo phase-transition sweep. Exactly one axis of {K, P, M} is fixed
// (a single-element list); the other two span the diagram.
struct SweepAxes {
  std::vector<int> k_values{25};
  std::vector<int> p_values{10};
  std::vector<int> m_values{10};
};

struct PhaseDiagram {
  std::string axis1_name, axis2_name;
  std::vector<int> axis1, axis2;
  std::string fixed_name;
  int fixed_value = 0;
  Eigen::MatrixXd rate;  // axis1.size() x axis2.size()
  int trials_per_cell = 0;
  double threshold_db = 40.0;
  std::uint64_t master_seed = 0;
};

// Called after each finished cell (serialized); used for checkpointing.
using CellCallback =
    std::function<void(int i1, int i2, double rate)>;

// Runs S reconstruction trials per cell from the noiseless modulated-ROP
// imaging model over the given plan (full Q^2-rows), marking success when the
// reconstruction SNR reaches threshold_db. Per-cell-and-trial seeds derive
// from master_seed, so results are independent of scheduling; `resume` cells
// are taken as-is and not recomputed.
PhaseDiagram phase_transition_sweep(
    const SweepAxes& axes, std::shared_ptr<const VisibilityPlan> plan,
    bool exact_operator, const SolverConfig& solver_cfg, int trials,
    double threshold_db, std::uint64_t master_seed, unsigned threads,
    const std::map<std::pair<int, int>, double>& resume = {},
    const CellCallback& on_cell = nullptr);

// Percentage of visibilities saved: 100 (1 - P M / (Q (Q-1) B)).
double compression_factor(int p, int m, int q, int num_batches);

// 50%-crossing of each axis1 row along axis2, by linear interpolation
// between grid cells; NaN when the row never crosses.
std::vector<std::pair<int, double>> frontier_crossings(const PhaseDiagram& d);

// Least-squares slope of log(y) against log(x); pairs with nonpositive or
// NaN entries are dropped. Returns NaN when fewer than two points remain.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace cri
