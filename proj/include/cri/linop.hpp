// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace cri {

using cvec = Eigen::VectorXcd;
using rvec = Eigen::VectorXd;
using cmat = Eigen::MatrixXcd;
using rmat = Eigen::MatrixXd;

// Matrix-free complex linear map with an exact adjoint. Implementations must
// be immutable after construction and reentrant: forward/adjoint may be
// called concurrently from several threads.
class LinearOp {
 public:
  virtual ~LinearOp() = default;

  virtual Eigen::Index rows() const = 0;
  virtual Eigen::Index cols() const = 0;

  virtual void apply(const cvec& in, cvec& out) const = 0;
  virtual void apply_adjoint(const cvec& in, cvec& out) const = 0;

  virtual std::string name() const { return "linear-op"; }

  cvec forward(const cvec& in) const {
    cvec out;
    apply(in, out);
    return out;
  }
  cvec adjoint(const cvec& in) const {
    cvec out;
    apply_adjoint(in, out);
    return out;
  }
};

// Dense matrix wrapper, mostly for oracles and small tests.
class MatrixOp final : public LinearOp {
 public:
  explicit MatrixOp(cmat m, std::string label = "matrix")
      : m_(std::move(m)), label_(std::move(label)) {}

  Eigen::Index rows() const override { return m_.rows(); }
  Eigen::Index cols() const override { return m_.cols(); }
  void apply(const cvec& in, cvec& out) const override { out = m_ * in; }
  void apply_adjoint(const cvec& in, cvec& out) const override {
    out = m_.adjoint() * in;
  }
  std::string name() const override { return label_; }
  const cmat& matrix() const { return m_; }

 private:
  cmat m_;
  std::string label_;
};

// C = A * B (apply B first).
class ComposedOp final : public LinearOp {
 public:
  ComposedOp(std::shared_ptr<const LinearOp> a, std::shared_ptr<const LinearOp> b)
      : a_(std::move(a)), b_(std::move(b)) {}

  Eigen::Index rows() const override { return a_->rows(); }
  Eigen::Index cols() const override { return b_->cols(); }
  void apply(const cvec& in, cvec& out) const override {
    cvec mid;
    b_->apply(in, mid);
    a_->apply(mid, out);
  }
  void apply_adjoint(const cvec& in, cvec& out) const override {
    cvec mid;
    a_->apply_adjoint(in, mid);
    b_->apply_adjoint(mid, out);
  }
  std::string name() const override {
    return a_->name() + "*" + b_->name();
  }

 private:
  std::shared_ptr<const LinearOp> a_, b_;
};

class ScaledOp final : public LinearOp {
 public:
  ScaledOp(std::complex<double> scale, std::shared_ptr<const LinearOp> a)
      : scale_(scale), a_(std::move(a)) {}

  Eigen::Index rows() const override { return a_->rows(); }
  Eigen::Index cols() const override { return a_->cols(); }
  void apply(const cvec& in, cvec& out) const override {
    a_->apply(in, out);
    out *= scale_;
  }
  void apply_adjoint(const cvec& in, cvec& out) const override {
    a_->apply_adjoint(in, out);
    out *= std::conj(scale_);
  }
  std::string name() const override { return "scaled(" + a_->name() + ")"; }

 private:
  std::complex<double> scale_;
  std::shared_ptr<const LinearOp> a_;
};

// Vertical stack [A1; A2; ...]: all blocks share the domain.
class StackedOp final : public LinearOp {
 public:
  explicit StackedOp(std::vector<std::shared_ptr<const LinearOp>> blocks);

  Eigen::Index rows() const override { return rows_; }
  Eigen::Index cols() const override { return cols_; }
  void apply(const cvec& in, cvec& out) const override;
  void apply_adjoint(const cvec& in, cvec& out) const override;
  std::string name() const override { return "stacked"; }

 private:
  std::vector<std::shared_ptr<const LinearOp>> blocks_;
  Eigen::Index rows_ = 0, cols_ = 0;
};

// Largest singular value estimate by power iteration on A*A from a seeded
// start. `converged` reports Rayleigh-quotient stagnation below rel 1e-4.
double operator_norm_estimate(const LinearOp& op, int iters, std::uint64_t seed,
                              bool* converged = nullptr);

struct AdjointCheckResult {
  bool pass = false;
  double max_violation = 0.0;  // relative to ||u|| ||v|| ||A||_est
  std::string op_name;
};

// Verifies <A u, v> == <u, A* v> on random complex pairs.
AdjointCheckResult check_adjoint(const LinearOp& op, int pairs, double tol,
                                 std::uint64_t seed);

// Materializes op as a dense matrix by applying it to canonical basis
// vectors. Oracle/test helper; cost rows x cols.
cmat densify(const LinearOp& op);

}  // namespace cri
