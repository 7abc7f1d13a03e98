// SPDX-License-Identifier: Apache-2.0
#include "cri/acquisition.hpp"

#include <cmath>
#include <stdexcept>

#include "cri/errors.hpp"
#include "cri/rng.hpp"
#include "cri/rop_ops.hpp"

namespace cri {

namespace {

// Factor of a Hermitian PSD matrix used to color iid CN(0,1) draws. Zero
// matrix yields an empty factor (noise skipped). Small negative eigenvalues
// from rounding are clamped.
cmat noise_factor(const Eigen::MatrixXcd& cov) {
  if (cov.size() == 0 || cov.norm() == 0.0) return {};
  if ((cov - cov.adjoint()).norm() > 1e-10 * cov.norm())
    throw std::invalid_argument("noise covariance must be Hermitian");
  Eigen::SelfAdjointEigenSolver<cmat> es(cov);
  Eigen::VectorXd ev = es.eigenvalues();
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev(i) < -1e-10 * std::abs(ev(ev.size() - 1)))
      throw std::invalid_argument("noise covariance must be PSD");
    ev(i) = std::max(ev(i), 0.0);
  }
  return es.eigenvectors() * ev.cwiseSqrt().asDiagonal();
}

}  // namespace

SignalBatch simulate_batch(const SkyImage& img, const VisibilityPlan& plan,
                           int batch, Eigen::Index num_samples,
                           const Eigen::MatrixXcd& noise_cov,
                           std::uint64_t seed, double budget) {
  img.validate();
  if (img.n1 != plan.n1)
    throw std::invalid_argument("simulate_batch: image/plan grid mismatch");
  if (num_samples < 1)
    throw std::invalid_argument("simulate_batch: need at least one sample");
  const int q = plan.q;
  const double cost = static_cast<double>(q) *
                      static_cast<double>(img.pixel_count()) *
                      static_cast<double>(num_samples);
  if (cost > budget)
    throw ResourceError("simulate_batch: Q*N*I exceeds the desk-scale budget");

  const auto support = img.support();
  const auto& grid =
      plan.batches.at(static_cast<std::size_t>(batch)).antenna_grid;
  const cmat a = steering_matrix(support, plan.n1, grid);
  Eigen::VectorXd amp(static_cast<Eigen::Index>(support.size()));
  for (std::size_t t = 0; t < support.size(); ++t)
    amp(static_cast<Eigen::Index>(t)) =
        std::sqrt(plan.quadrature_gain() * img.values(support[t]));

  const cmat nf = noise_factor(noise_cov);
  if (nf.size() > 0 && nf.rows() != q)
    throw std::invalid_argument("simulate_batch: noise covariance is not Q x Q");

  SignalBatch out;
  out.batch_index = batch;
  out.samples.resize(q, num_samples);
  Rng rng(derive_seed(seed, {0x51b7, static_cast<std::uint64_t>(batch)}));
  cvec s(static_cast<Eigen::Index>(support.size()));
  for (Eigen::Index i = 0; i < num_samples; ++i) {
    for (Eigen::Index t = 0; t < s.size(); ++t) s(t) = amp(t) * rng.cnormal();
    out.samples.col(i).noalias() = a * s;
    if (nf.size() > 0) out.samples.col(i).noalias() += nf * rng.cnormal_vector(q);
  }
  return out;
}

Eigen::MatrixXcd sample_covariance(const SignalBatch& batch) {
  const Eigen::Index count = batch.sample_count();
  if (count < 1)
    throw std::invalid_argument("sample_covariance: empty batch");
  const Eigen::Index q = batch.samples.rows();
  cmat c = cmat::Zero(q, q);
  c.selfadjointView<Eigen::Lower>().rankUpdate(batch.samples,
                                               1.0 / static_cast<double>(count));
  // Mirror the computed triangle; the result is Hermitian to the last bit.
  cmat full = cmat(c.selfadjointView<Eigen::Lower>());
  full.diagonal() = full.diagonal().real().cast<std::complex<double>>();
  return full;
}

cvec classical_acquire(const std::vector<SignalBatch>& batches,
                       const Eigen::MatrixXcd& noise_cov) {
  if (batches.empty())
    throw std::invalid_argument("classical_acquire: no batches");
  const Eigen::Index q = batches.front().samples.rows();
  const Eigen::Index q2 = q * q;
  cvec v(q2 * static_cast<Eigen::Index>(batches.size()));
  for (std::size_t b = 0; b < batches.size(); ++b) {
    if (batches[b].samples.rows() != q)
      throw std::invalid_argument("classical_acquire: inconsistent Q");
    cmat c = sample_covariance(batches[b]);
    if (noise_cov.size() > 0) c -= noise_cov;
    Eigen::Map<const cvec> vc(c.data(), q2);
    v.segment(static_cast<Eigen::Index>(b) * q2, q2) = vc;
  }
  return v;
}

cvec compressive_acquire(const std::vector<SignalBatch>& batches,
                         const SketchEnsemble& sketches,
                         const Eigen::MatrixXcd& noise_cov) {
  sketches.validate();
  if (static_cast<int>(batches.size()) != sketches.num_batches)
    throw std::invalid_argument("compressive_acquire: batch count mismatch");
  const int p = sketches.p;
  const int m = sketches.m;
  cmat z = cmat::Zero(p, m);
  cvec y(p);
  for (int b = 0; b < sketches.num_batches; ++b) {
    const auto& x = batches[static_cast<std::size_t>(b)].samples;
    if (x.rows() != sketches.q)
      throw std::invalid_argument("compressive_acquire: antenna count mismatch");
    const Eigen::Index count = x.cols();
    if (count < 1)
      throw std::invalid_argument("compressive_acquire: empty batch");
    const auto& alpha = sketches.alphas[static_cast<std::size_t>(b)];
    const auto& beta = sketches.betas[static_cast<std::size_t>(b)];
    y.setZero();
    // Streamed: sketches mu = alpha^* x_i, nu = beta^* x_i per sample, then
    // y_p += mu_p conj(nu_p). O(P Q) per sample, never forming x x^*.
    cvec mu(p), nu(p);
    for (Eigen::Index i = 0; i < count; ++i) {
      mu.noalias() = alpha.adjoint() * x.col(i);
      nu.noalias() = beta.adjoint() * x.col(i);
      y += mu.cwiseProduct(nu.conjugate());
    }
    y /= static_cast<double>(count);
    if (noise_cov.size() > 0) {
      for (int pp = 0; pp < p; ++pp)
        y(pp) -= alpha.col(pp).dot(noise_cov * beta.col(pp));
    }
    // Modulated aggregation into the fixed P x M state.
    z.noalias() += y * sketches.gamma.row(b).cast<std::complex<double>>();
  }
  return Eigen::Map<const cvec>(z.data(), z.size());
}

double estimate_dc(const std::vector<SignalBatch>& batches,
                   const Eigen::MatrixXcd& noise_cov, double varpi) {
  if (batches.empty()) throw std::invalid_argument("estimate_dc: no batches");
  if (!(varpi > 0.0)) throw std::invalid_argument("estimate_dc: varpi must be > 0");
  double acc = 0.0;
  std::size_t terms = 0;
  for (const auto& batch : batches) {
    const Eigen::Index q = batch.samples.rows();
    const Eigen::Index count = batch.sample_count();
    for (Eigen::Index qq = 0; qq < q; ++qq) {
      double auto_corr = batch.samples.row(qq).squaredNorm() /
                         static_cast<double>(count);
      if (noise_cov.size() > 0) auto_corr -= noise_cov(qq, qq).real();
      acc += auto_corr;
      ++terms;
    }
  }
  return acc / (static_cast<double>(terms) * varpi);
}

double estimate_dc_from_covariances(const std::vector<Eigen::MatrixXcd>& covs,
                                    const Eigen::MatrixXcd& noise_cov,
                                    double varpi) {
  if (covs.empty())
    throw std::invalid_argument("estimate_dc: no covariances");
  if (!(varpi > 0.0)) throw std::invalid_argument("estimate_dc: varpi must be > 0");
  double acc = 0.0;
  std::size_t terms = 0;
  for (const auto& c : covs) {
    for (Eigen::Index qq = 0; qq < c.rows(); ++qq) {
      double d = c(qq, qq).real();
      if (noise_cov.size() > 0) d -= noise_cov(qq, qq).real();
      acc += d;
      ++terms;
    }
  }
  return acc / (static_cast<double>(terms) * varpi);
}

}  // namespace cri
