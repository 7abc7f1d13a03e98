// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <memory>

#include "cri/linop.hpp"
#include "cri/nufft.hpp"
#include "cri/sketch.hpp"
#include "cri/sky_model.hpp"

namespace cri {

// Rank-one projections of one batch: maps the vectorized Q x Q visibility
// matrix v_b to y_b in C^P with y_pb = alpha_pb^* unvec(v_b) beta_pb. Applied
// as two matrix-vector products per projection; the adjoint accumulates
// rank-one terms sum_p y_p alpha_p beta_p^*. `hollow` zeroes the diagonal of
// unvec(v_b) in both directions (the DC-row-removed variant).
class RopBlockOp final : public LinearOp {
 public:
  RopBlockOp(std::shared_ptr<const SketchEnsemble> sketches, int batch,
             bool hollow = false);

  Eigen::Index rows() const override { return sketches_->p; }
  Eigen::Index cols() const override {
    return static_cast<Eigen::Index>(sketches_->q) * sketches_->q;
  }
  void apply(const cvec& in, cvec& out) const override;
  void apply_adjoint(const cvec& in, cvec& out) const override;
  std::string name() const override { return "rop-block"; }

 private:
  std::shared_ptr<const SketchEnsemble> sketches_;
  int batch_;
  bool hollow_;
};

// Block-diagonal concatenation over batches: C^{Q^2 B} -> C^{P B}.
class BlockRopOp final : public LinearOp {
 public:
  explicit BlockRopOp(std::shared_ptr<const SketchEnsemble> sketches,
                      bool hollow = false);

  Eigen::Index rows() const override;
  Eigen::Index cols() const override;
  void apply(const cvec& in, cvec& out) const override;
  void apply_adjoint(const cvec& in, cvec& out) const override;
  std::string name() const override { return "block-rop"; }

 private:
  std::shared_ptr<const SketchEnsemble> sketches_;
  bool hollow_;
  std::vector<RopBlockOp> blocks_;  // one per batch, built once
};

// Modulation aggregation z_m = sum_b gamma_bm y_b on P-blocks:
// C^{P B} -> C^{P M}. Equal to (Gamma^T kron Id_P) as a dense matrix.
class ModulationOp final : public LinearOp {
 public:
  ModulationOp(Eigen::MatrixXd gamma, int p);

  Eigen::Index rows() const override { return p_ * gamma_.cols(); }
  Eigen::Index cols() const override { return p_ * gamma_.rows(); }
  void apply(const cvec& in, cvec& out) const override;
  void apply_adjoint(const cvec& in, cvec& out) const override;
  std::string name() const override { return "modulation"; }

 private:
  Eigen::MatrixXd gamma_;  // B x M
  cmat gamma_c_;           // same values, complex scalar type
  Eigen::Index p_;
};

// Modulated-ROP forward imaging operator: image -> C^{P M}, the composition
// modulation . block-ROP . visibility sampling. `vis` must map images to the
// full Q^2-rows-per-batch visibility vector of the same plan the sketches
// were drawn for.
class MropOp final : public LinearOp {
 public:
  MropOp(std::shared_ptr<const LinearOp> vis,
         std::shared_ptr<const SketchEnsemble> sketches);

  Eigen::Index rows() const override;
  Eigen::Index cols() const override { return vis_->cols(); }
  void apply(const cvec& in, cvec& out) const override;
  void apply_adjoint(const cvec& in, cvec& out) const override;
  std::string name() const override { return "mrop"; }

 private:
  std::shared_ptr<const LinearOp> vis_;
  std::shared_ptr<const SketchEnsemble> sketches_;
  BlockRopOp block_rop_;
  ModulationOp modulation_;
};

// Integrated-ROP operator: image -> C^P, z = sum_b R_b v_b. With
// `hollow` the per-batch diagonal (DC) rows are removed first, which is the
// centered variant sensing only off-diagonal visibilities.
class IropOp final : public LinearOp {
 public:
  IropOp(std::shared_ptr<const LinearOp> vis,
         std::shared_ptr<const SketchEnsemble> sketches, bool hollow);

  Eigen::Index rows() const override { return sketches_->p; }
  Eigen::Index cols() const override { return vis_->cols(); }
  void apply(const cvec& in, cvec& out) const override;
  void apply_adjoint(const cvec& in, cvec& out) const override;
  std::string name() const override { return hollow_ ? "irop-centered" : "irop"; }

 private:
  std::shared_ptr<const LinearOp> vis_;
  std::shared_ptr<const SketchEnsemble> sketches_;
  bool hollow_;
  BlockRopOp block_rop_;
};

// Forward map of the pure-DC spectrum through `forward_img_op` (an image ->
// measurements operator): the measurement template of one unit of DC
// component. Subtracting dc * template removes the DC-bin contribution
// exactly, by linearity.
cvec dc_template(const LinearOp& forward_img_op, int n1);

// z - dc * template.
cvec center_measurements(const cvec& z, double dc, const cvec& templ);

// Interferometric matrix oracle: builds the dense steering matrix
// (Gamma_b)_{q,n} = sqrt(gain) e^{+i 2 pi chi_q . c(n) / n1} explicitly and
// returns Gamma_b D_x Gamma_b^*. Hermitian PSD for nonnegative images; entries
// match the exact visibility operator on the same batch.
cmat interferometric_matrix(const Eigen::VectorXd& image, int n1,
                            const Eigen::Matrix2Xd& antenna_grid, double gain);

// Dense steering matrix with unit row gain (used by the signal simulator),
// restricted to the given pixel indices.
cmat steering_matrix(const std::vector<int>& pixels, int n1,
                     const Eigen::Matrix2Xd& antenna_grid);

// Global rank-one projections of a QB x QB Hermitian block matrix with
// stacked sketching vectors, z_p = a_p^* H b_p (Appendix-style oracle).
cvec global_rop(const cmat& h, const cmat& a_stack, const cmat& b_stack);

// Post-sensing Gaussian compression y = A v with A_jk ~ CN(0, 1/P), generated
// row-wise from the seed and never stored.
class GaussianPostSensingOp final : public LinearOp {
 public:
  GaussianPostSensingOp(Eigen::Index input_size, int p, std::uint64_t seed);

  Eigen::Index rows() const override { return p_; }
  Eigen::Index cols() const override { return input_size_; }
  void apply(const cvec& in, cvec& out) const override;
  void apply_adjoint(const cvec& in, cvec& out) const override;
  std::string name() const override { return "gaussian-postsensing"; }

 private:
  cvec row(int p) const;
  Eigen::Index input_size_;
  int p_;
  std::uint64_t seed_;
};

// Baseline-dependent averaging: visibilities of pairs whose baseline norm
// stays below `freq_threshold` (wavelength units, max over batches) are
// averaged over groups of `group_size` consecutive batches; all other entries
// pass through. Output rows appear in input (batch-major) walk order, group
// means at the position of the group's first member, so a threshold of zero
// yields the identity.
class BaselineAveragingOp final : public LinearOp {
 public:
  BaselineAveragingOp(std::shared_ptr<const VisibilityPlan> plan,
                      double freq_threshold, int group_size);

  Eigen::Index rows() const override { return static_cast<Eigen::Index>(rows_.size()); }
  Eigen::Index cols() const override { return plan_->total_rows(); }
  void apply(const cvec& in, cvec& out) const override;
  void apply_adjoint(const cvec& in, cvec& out) const override;
  std::string name() const override { return "baseline-averaging"; }

  int reduced_batches() const { return reduced_batches_; }

 private:
  struct Row {
    Eigen::Index first_input;  // index of the first averaged input entry
    int count;                 // 1 for passthrough, group length otherwise
    Eigen::Index stride;       // input stride between group members
  };
  std::shared_ptr<const VisibilityPlan> plan_;
  std::vector<Row> rows_;
  int reduced_batches_ = 0;
};

// v + iid CN(0, sigma^2) noise, Hermitian-symmetrized per Q x Q batch block
// so that perturbed matrices stay Hermitian. sigma = 0 returns v unchanged.
cvec add_visibility_noise(const cvec& v, int q, double sigma,
                          std::uint64_t seed);

}  // namespace cri
