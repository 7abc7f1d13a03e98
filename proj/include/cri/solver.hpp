// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <memory>
#include <ostream>

#include "cri/linop.hpp"

namespace cri {

// Real-domain view of a complex measurement operator: forward embeds the
// real image, the adjoint takes the real part (the imaginary part is
// orthogonal noise for consistent data).
class RealMeasOp {
 public:
  explicit RealMeasOp(std::shared_ptr<const LinearOp> op) : op_(std::move(op)) {}

  Eigen::Index rows() const { return op_->rows(); }
  Eigen::Index cols() const { return op_->cols(); }

  void forward(const rvec& x, cvec& out) const {
    cvec xc(x.size());
    xc.real() = x;
    xc.imag().setZero();
    op_->apply(xc, out);
  }
  void adjoint_real(const cvec& y, rvec& out) const {
    cvec w;
    op_->apply_adjoint(y, w);
    out = w.real();
  }
  const LinearOp& op() const { return *op_; }

 private:
  std::shared_ptr<const LinearOp> op_;
};

struct SolverConfig {
  double epsilon = 1e-2;    // l2 fidelity radius
  int max_outer = 30;       // continuation steps
  int max_inner = 2000;     // iterations per lambda
  double rel_tol = 1e-6;    // inner stopping on relative iterate change
  bool nonneg = true;
  int power_iters = 50;     // Lipschitz estimation budget
  std::uint64_t seed = 1;   // seeds the power iteration start
  std::ostream* diagnostics = nullptr;  // optional JSON-lines stream
};

struct SolverResult {
  rvec estimate;
  double residual_l2 = 0.0;
  double final_lambda = 0.0;
  int inner_iterations = 0;
  int outer_steps = 0;
  bool converged = false;
};

// Largest squared singular value of the real-domain operator, by power
// iteration from a seeded start. Returns 0 (flagged not converged) for the
// zero operator. `converged` reports Rayleigh-quotient stagnation.
double estimate_lipschitz(const RealMeasOp& a, int power_iters,
                          std::uint64_t seed, bool* converged = nullptr);

// Accelerated proximal gradient for lambda ||x||_1 + 1/2 ||z - A x||_2^2
// with an optional nonnegativity constraint folded into the prox. `lipschitz`
// seeds the step size; backtracking doubles it when the majorization fails.
// Stops on relative iterate change <= rel_tol, after max_inner iterations, or
// as soon as the residual reaches `residual_target` (0 disables); throws on
// detected divergence (objective rising over 10 consecutive steps after a
// restart).
rvec fista_lasso(const RealMeasOp& a, const cvec& z, double lambda,
                 const rvec& x_init, const SolverConfig& cfg, double lipschitz,
                 int* iterations = nullptr, double residual_target = 0.0);

// l2-fidelity basis-pursuit denoising via lambda-continuation: starts at
// 0.9 ||A^T z||_inf, halves lambda with warm starts until the residual fits
// in the epsilon ball, then runs one refinement pass at 4x inner budget.
SolverResult solve_bpdn(const RealMeasOp& a, const cvec& z,
                        const SolverConfig& cfg);

}  // namespace cri
