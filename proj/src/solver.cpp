// SPDX-License-Identifier: Apache-2.0
#include "cri/solver.hpp"

#include <cmath>
#include <stdexcept>

#include "cri/rng.hpp"

namespace cri {

namespace {

void prox_l1(rvec& x, double threshold, bool nonneg) {
  if (nonneg) {
    x = (x.array() - threshold).max(0.0);
    return;
  }
  x = x.array().sign() * (x.array().abs() - threshold).max(0.0);
}

double objective(const RealMeasOp& a, const cvec& z, double lambda,
                 const rvec& x, cvec& ax) {
  a.forward(x, ax);
  return lambda * x.lpNorm<1>() + 0.5 * (z - ax).squaredNorm();
}

}  // namespace

double estimate_lipschitz(const RealMeasOp& a, int power_iters,
                          std::uint64_t seed, bool* converged) {
  Rng rng(derive_seed(seed, {0x11b5}));
  rvec x = rng.normal_vector(a.cols());
  const double nx = x.norm();
  if (nx == 0.0) {
    if (converged) *converged = false;
    return 0.0;
  }
  x /= nx;
  double lambda = 0.0;
  bool stagnated = false;
  cvec ax;
  rvec atax;
  for (int it = 0; it < power_iters; ++it) {
    a.forward(x, ax);
    a.adjoint_real(ax, atax);
    const double next = atax.norm();
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
  return lambda;  // sigma_max^2 of the real-domain operator
}

rvec fista_lasso(const RealMeasOp& a, const cvec& z, double lambda,
                 const rvec& x_init, const SolverConfig& cfg, double lipschitz,
                 int* iterations, double residual_target) {
  if (!(lambda > 0.0)) throw std::invalid_argument("fista: lambda must be > 0");
  if (!(lipschitz > 0.0))
    throw std::invalid_argument("fista: Lipschitz constant must be > 0");
  double lip = 1.01 * lipschitz;

  rvec x = x_init;
  rvec y = x;
  double t = 1.0;
  cvec ay, ax;
  rvec grad, x_prev, x_cand;
  double prev_obj = objective(a, z, lambda, x, ax);
  int rising = 0;
  int it = 0;
  for (; it < cfg.max_inner; ++it) {
    a.forward(y, ay);
    const double f_y = 0.5 * (z - ay).squaredNorm();
    a.adjoint_real(ay - z, grad);
    x_prev = x;
    // Backtracking on the step: the power-iteration estimate may be slightly
    // low, which would break the majorization.
    for (int bt = 0;; ++bt) {
      x_cand = y - grad / lip;
      prox_l1(x_cand, lambda / lip, cfg.nonneg);
      a.forward(x_cand, ax);
      const double f_cand = 0.5 * (z - ax).squaredNorm();
      const rvec d = x_cand - y;
      const double quad = f_y + grad.dot(d) + 0.5 * lip * d.squaredNorm();
      if (f_cand <= quad + 1e-12 * std::abs(quad) || bt >= 20) break;
      lip *= 2.0;
    }
    x = x_cand;

    const double obj = lambda * x.lpNorm<1>() + 0.5 * (z - ax).squaredNorm();
    if (std::isnan(obj))
      throw std::runtime_error("fista: diverging (objective is NaN)");
    const double obj_change = std::abs(obj - prev_obj);
    if (obj > prev_obj * (1.0 + 1e-12)) {
      // Function-value restart of the momentum sequence. A restarted step is
      // a plain descent step, so repeated consecutive rises mean divergence.
      t = 1.0;
      y = x;
      if (++rising > 10)
        throw std::runtime_error("fista: diverging (objective keeps rising)");
    } else {
      rising = 0;
      const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
      y = x + ((t - 1.0) / t_next) * (x - x_prev);
      t = t_next;
    }
    prev_obj = obj;

    if (residual_target > 0.0 && (z - ax).norm() <= residual_target) {
      ++it;
      break;
    }
    // Stop only when both the iterate and the objective have stagnated;
    // slow steady descent (small steps, steady objective drop) must continue.
    const double dx = (x - x_prev).norm();
    const double nx = std::max(x.norm(), 1e-30);
    if (dx <= cfg.rel_tol * nx &&
        obj_change <= cfg.rel_tol * std::max(obj, 1e-300)) {
      ++it;
      break;
    }
  }
  if (iterations) *iterations = it;
  return x;
}

SolverResult solve_bpdn(const RealMeasOp& a, const cvec& z,
                        const SolverConfig& cfg) {
  if (cfg.epsilon < 0.0)
    throw std::invalid_argument("solve_bpdn: epsilon must be >= 0");
  SolverResult res;
  res.estimate = rvec::Zero(a.cols());

  // Trivial feasibility at x = 0.
  if (z.norm() <= cfg.epsilon) {
    res.residual_l2 = z.norm();
    res.converged = true;
    return res;
  }

  bool lip_ok = false;
  const double lipschitz =
      estimate_lipschitz(a, cfg.power_iters, cfg.seed, &lip_ok);
  if (lipschitz <= 0.0) {
    // Zero operator and nonzero data: infeasible by construction.
    res.residual_l2 = z.norm();
    res.converged = false;
    return res;
  }

  rvec corr;
  a.adjoint_real(z, corr);
  double lambda = 0.9 * corr.cwiseAbs().maxCoeff();
  if (!(lambda > 0.0)) {
    res.residual_l2 = z.norm();
    res.converged = false;
    return res;
  }

  rvec x = rvec::Zero(a.cols());
  cvec ax;
  bool feasible = false;
  // Inner solves may stop as soon as they are feasible; the refinement pass
  // below polishes the accepted iterate.
  const double target = cfg.epsilon > 0.0 ? 0.999 * cfg.epsilon : 0.0;
  for (int outer = 0; outer < cfg.max_outer; ++outer) {
    int inner = 0;
    x = fista_lasso(a, z, lambda, x, cfg, lipschitz, &inner, target);
    res.inner_iterations += inner;
    res.outer_steps = outer + 1;
    a.forward(x, ax);
    const double residual = (z - ax).norm();
    if (cfg.diagnostics) {
      (*cfg.diagnostics) << "{\"outer\":" << outer << ",\"lambda\":" << lambda
                         << ",\"residual\":" << residual
                         << ",\"inner\":" << inner << "}\n";
    }
    if (residual <= cfg.epsilon) {
      feasible = true;
      res.estimate = x;
      res.residual_l2 = residual;
      res.final_lambda = lambda;
      // Refinement pass at the accepted lambda with a larger budget.
      SolverConfig refine = cfg;
      refine.max_inner = 4 * cfg.max_inner;
      int refine_inner = 0;
      const rvec x_ref =
          fista_lasso(a, z, lambda, x, refine, lipschitz, &refine_inner,
                      0.5 * target);
      res.inner_iterations += refine_inner;
      a.forward(x_ref, ax);
      const double refined_residual = (z - ax).norm();
      if (refined_residual <= cfg.epsilon) {
        res.estimate = x_ref;
        res.residual_l2 = refined_residual;
      }
      break;
    }
    lambda *= 0.5;
  }
  if (!feasible) {
    res.estimate = x;
    a.forward(x, ax);
    res.residual_l2 = (z - ax).norm();
    res.final_lambda = lambda * 2.0;
  }
  res.converged = feasible;
  return res;
}

}  // namespace cri
