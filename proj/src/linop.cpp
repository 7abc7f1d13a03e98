// SPDX-License-Identifier: Apache-2.0
#include "cri/linop.hpp"

#include <cmath>
#include <stdexcept>

#include "cri/rng.hpp"

namespace cri {

StackedOp::StackedOp(std::vector<std::shared_ptr<const LinearOp>> blocks)
    : blocks_(std::move(blocks)) {
  if (blocks_.empty()) throw std::invalid_argument("StackedOp: no blocks");
  cols_ = blocks_.front()->cols();
  for (const auto& b : blocks_) {
    if (b->cols() != cols_)
      throw std::invalid_argument("StackedOp: inconsistent domain sizes");
    rows_ += b->rows();
  }
}

void StackedOp::apply(const cvec& in, cvec& out) const {
  out.resize(rows_);
  Eigen::Index offset = 0;
  cvec block;
  for (const auto& b : blocks_) {
    b->apply(in, block);
    out.segment(offset, b->rows()) = block;
    offset += b->rows();
  }
}

void StackedOp::apply_adjoint(const cvec& in, cvec& out) const {
  out = cvec::Zero(cols_);
  Eigen::Index offset = 0;
  cvec block;
  for (const auto& b : blocks_) {
    b->apply_adjoint(in.segment(offset, b->rows()), block);
    out += block;
    offset += b->rows();
  }
}

double operator_norm_estimate(const LinearOp& op, int iters, std::uint64_t seed,
                              bool* converged) {
  Rng rng(seed);
  cvec x = rng.cnormal_vector(op.cols());
  double nx = x.norm();
  if (nx == 0.0) {
    if (converged) *converged = false;
    return 0.0;
  }
  x /= nx;
  double lambda = 0.0;
  bool stagnated = false;
  cvec ax, atax;
  for (int it = 0; it < iters; ++it) {
    op.apply(x, ax);
    op.apply_adjoint(ax, atax);
    const double next = atax.norm();  // Rayleigh quotient of A*A at unit x
    if (next == 0.0) {
      if (converged) *converged = true;
      return 0.0;
    }
    if (it > 0 && std::abs(next - lambda) <= 1e-4 * next) {
      lambda = next;
      stagnated = true;
      break;
    }
    lambda = next;
    x = atax / next;
  }
  if (converged) *converged = stagnated;
  return std::sqrt(lambda);  // sigma_max estimate
}

AdjointCheckResult check_adjoint(const LinearOp& op, int pairs, double tol,
                                 std::uint64_t seed) {
  AdjointCheckResult res;
  res.op_name = op.name();
  const double norm_est =
      std::max(operator_norm_estimate(op, 30, derive_seed(seed, {0xad01})), 1e-300);
  Rng rng(derive_seed(seed, {0xad02}));
  double worst = 0.0;
  cvec au, atv;
  for (int t = 0; t < pairs; ++t) {
    const cvec u = rng.cnormal_vector(op.cols());
    const cvec v = rng.cnormal_vector(op.rows());
    op.apply(u, au);
    op.apply_adjoint(v, atv);
    const std::complex<double> lhs = v.dot(au);   // <Au, v> = v^H (A u)
    const std::complex<double> rhs = atv.dot(u);  // <u, A*v> = (A*v)^H u
    const double denom = u.norm() * v.norm() * norm_est;
    if (denom == 0.0) continue;
    worst = std::max(worst, std::abs(lhs - rhs) / denom);
  }
  res.max_violation = worst;
  res.pass = worst <= tol;
  return res;
}

cmat densify(const LinearOp& op) {
  cmat m(op.rows(), op.cols());
  cvec e = cvec::Zero(op.cols());
  cvec col;
  for (Eigen::Index j = 0; j < op.cols(); ++j) {
    e(j) = 1.0;
    op.apply(e, col);
    m.col(j) = col;
    e(j) = 0.0;
  }
  return m;
}

}  // namespace cri
