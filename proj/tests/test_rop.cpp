// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <memory>

#include "cri/fft.hpp"
#include "cri/grid.hpp"
#include "cri/linop.hpp"
#include "cri/rng.hpp"
#include "cri/rop_ops.hpp"
#include "cri/sketch.hpp"
#include "cri/sky_model.hpp"
#include "test_helpers.hpp"

using namespace cri;

namespace {

// Canonical-sketch ensemble: alpha_pb = e_j, beta_pb = e_k reads entry (j,k).
std::shared_ptr<SketchEnsemble> canonical_sketches(int q, int b_count) {
  auto s = std::make_shared<SketchEnsemble>();
  s->q = q;
  s->p = 1;
  s->num_batches = b_count;
  s->m = 1;
  s->alphas.assign(b_count, cmat::Zero(q, 1));
  s->betas.assign(b_count, cmat::Zero(q, 1));
  for (int b = 0; b < b_count; ++b) {
    s->alphas[b](0, 0) = 1.0;
    s->betas[b](0, 0) = 1.0;
  }
  s->gamma = Eigen::MatrixXd::Ones(b_count, 1);
  return s;
}

}  // namespace

TEST_CASE("rop block") {
  const int q = 4, p = 6;
  auto sketches = std::make_shared<SketchEnsemble>(draw_sketches(q, p, 1, 1, 7));
  RopBlockOp op(sketches, 0);
  Rng rng(3);
  const cvec v = rng.cnormal_vector(q * q);
  Eigen::Map<const cmat> vm(v.data(), q, q);

  SUBCASE("canonical sketches select a matrix entry") {
    auto canon = canonical_sketches(q, 1);
    canon->alphas[0].setZero();
    canon->betas[0].setZero();
    canon->alphas[0](1, 0) = 1.0;  // e_j with j=1
    canon->betas[0](3, 0) = 1.0;   // e_k with k=3
    RopBlockOp sel(canon, 0);
    const cvec y = sel.forward(v);
    CHECK(std::abs(y(0) - vm(1, 3)) < 1e-15);
  }
  SUBCASE("matches the dense rank-one rows") {
    // Row p acts as sum_{jk} conj(alpha_j) beta_k V_{jk}.
    cmat dense(p, q * q);
    for (int pp = 0; pp < p; ++pp) {
      const cmat outer = sketches->alphas[0].col(pp).conjugate() *
                         sketches->betas[0].col(pp).transpose();
      dense.row(pp) = Eigen::Map<const cvec>(outer.data(), q * q).transpose();
    }
    const cvec want = dense * v;
    const cvec got = op.forward(v);
    CHECK((got - want).norm() < 1e-12 * want.norm());
  }
  SUBCASE("adjoint accumulates rank-one terms") {
    CHECK(check_adjoint(op, 20, 1e-10, 17).pass);
    const cvec y = rng.cnormal_vector(p);
    cmat acc = cmat::Zero(q, q);
    for (int pp = 0; pp < p; ++pp)
      acc += y(pp) * sketches->alphas[0].col(pp) *
             sketches->betas[0].col(pp).adjoint();
    const cvec adj = op.adjoint(y);
    CHECK((adj - Eigen::Map<const cvec>(acc.data(), q * q)).norm() <
          1e-12 * acc.norm());
  }
  SUBCASE("hollow variant ignores the diagonal") {
    RopBlockOp hollow(sketches, 0, true);
    cmat vh = vm;
    vh.diagonal().setZero();
    const cvec vh_vec = Eigen::Map<const cvec>(vh.data(), q * q);
    CHECK((hollow.forward(v) - op.forward(vh_vec)).norm() < 1e-13);
    CHECK(check_adjoint(hollow, 20, 1e-10, 18).pass);
  }
}

TEST_CASE("modulation operator") {
  const int p = 3, b_count = 4, m = 2;
  auto sketches =
      std::make_shared<SketchEnsemble>(draw_sketches(2, p, b_count, m, 5));
  ModulationOp op(sketches->gamma, p);
  Rng rng(6);
  const cvec y = rng.cnormal_vector(p * b_count);

  SUBCASE("all-ones column sums the batches") {
    ModulationOp irop(Eigen::MatrixXd::Ones(b_count, 1), p);
    const cvec z = irop.forward(y);
    cvec want = cvec::Zero(p);
    for (int b = 0; b < b_count; ++b) want += y.segment(b * p, p);
    CHECK((z - want).norm() < 1e-14 * want.norm());
  }
  SUBCASE("signed identity permutes blocks") {
    Eigen::MatrixXd g = Eigen::MatrixXd::Identity(b_count, b_count);
    g(1, 1) = -1.0;
    ModulationOp perm(g, p);
    const cvec z = perm.forward(y);
    CHECK((z.segment(0, p) - y.segment(0, p)).norm() == 0.0);
    CHECK((z.segment(p, p) + y.segment(p, p)).norm() == 0.0);
    CHECK((z.segment(2 * p, p) - y.segment(2 * p, p)).norm() == 0.0);
  }
  SUBCASE("matches the dense Kronecker product") {
    // Dense (Gamma^T kron Id_P).
    cmat dense = cmat::Zero(p * m, p * b_count);
    for (int mm = 0; mm < m; ++mm)
      for (int b = 0; b < b_count; ++b)
        dense.block(mm * p, b * p, p, p) =
            sketches->gamma(b, mm) * cmat::Identity(p, p);
    CHECK((op.forward(y) - dense * y).norm() < 1e-12 * y.norm());
    CHECK(check_adjoint(op, 20, 1e-10, 19).pass);
  }
}

TEST_CASE("forward mrop composition") {
  const int q = 4, b_count = 3, n1 = 8, p = 5, m = 3;
  auto plan = testing::disc_plan(q, b_count, n1, 33);
  auto nudft = std::make_shared<NudftOp>(plan, plan->quadrature_gain());
  auto sketches =
      std::make_shared<SketchEnsemble>(draw_sketches(q, p, b_count, m, 44));
  MropOp mrop(nudft, sketches);

  SUBCASE("zero image") {
    CHECK(mrop.forward(cvec::Zero(n1 * n1)).norm() == 0.0);
  }
  SUBCASE("matches the explicit dense product M D G F") {
    Dft2Op fop(n1);
    const cmat f = densify(fop);
    const cmat gf = densify(*nudft);            // fused G F
    const cmat g = gf * f.adjoint();            // dense G alone
    cmat d = cmat::Zero(p * b_count, q * q * b_count);
    for (int b = 0; b < b_count; ++b) {
      RopBlockOp block(sketches, b);
      d.block(b * p, b * q * q, p, q * q) = densify(block);
    }
    ModulationOp mod(sketches->gamma, p);
    const cmat mm_dense = densify(mod);
    const cmat full = mm_dense * d * g * f;
    Rng rng(10);
    const cvec x = rng.cnormal_vector(n1 * n1);
    const cvec want = full * x;
    const cvec got = mrop.forward(x);
    CHECK((got - want).norm() < 1e-10 * want.norm());
  }
  SUBCASE("adjoint contract for the full composition") {
    CHECK(check_adjoint(mrop, 20, 1e-10, 20).pass);
  }
  SUBCASE("gridded and exact compositions agree") {
    // The modulated aggregation can cancel signal, so the composed relative
    // error is looser than the 1e-6 visibility-level gate.
    auto kb = std::make_shared<KbNufftOp>(plan, plan->quadrature_gain());
    MropOp fast(kb, sketches);
    Rng rng(11);
    const cvec x = rng.cnormal_vector(n1 * n1);
    const cvec a = mrop.forward(x);
    const cvec b = fast.forward(x);
    CHECK((a - b).norm() < 1e-5 * a.norm());
  }
}

TEST_CASE("integrated rop and centering") {
  const int q = 4, b_count = 2, n1 = 8, p = 6;
  auto plan = testing::disc_plan(q, b_count, n1, 60);
  auto nudft = std::make_shared<NudftOp>(plan, plan->quadrature_gain());
  auto sketches =
      std::make_shared<SketchEnsemble>(draw_sketches(q, p, b_count, 1, 61));

  SUBCASE("irop equals mrop with all-ones modulations") {
    auto ones = std::make_shared<SketchEnsemble>(*sketches);
    ones->gamma = Eigen::MatrixXd::Ones(b_count, 1);
    ones->m = 1;
    MropOp mrop(nudft, ones);
    IropOp irop(nudft, sketches, false);
    Rng rng(12);
    const cvec x = rng.cnormal_vector(n1 * n1);
    CHECK((mrop.forward(x) - irop.forward(x)).norm() <
          1e-12 * irop.forward(x).norm());
  }
  SUBCASE("1-sparse image matches the dense composed product") {
    IropOp irop(nudft, sketches, true);
    Dft2Op fop(n1);
    const cmat f = densify(fop);
    const cmat g0f = [&] {
      // Hollow sampling: zero the diagonal rows of each batch block.
      cmat gf = densify(*nudft);
      return gf;
    }();
    cmat r = cmat::Zero(p, q * q * b_count);
    for (int b = 0; b < b_count; ++b) {
      RopBlockOp block(sketches, b, true);
      r.block(0, b * q * q, p, q * q) = densify(block);
    }
    const cmat full = r * g0f;  // hollow is inside the rop blocks
    const SkyImage sky = random_sparse_sky(n1, 1, 62);
    const cvec x = sky.values.cast<std::complex<double>>();
    CHECK((irop.forward(x) - full * x).norm() <=
          1e-10 * (full * x).norm());
    CHECK(check_adjoint(irop, 20, 1e-10, 63).pass);
  }
  SUBCASE("template subtraction cancels a constant image exactly") {
    MropOp mrop(nudft, sketches);
    const cvec templ = dc_template(mrop, n1);
    SkyImage constant;
    constant.n1 = n1;
    constant.values = Eigen::VectorXd::Constant(n1 * n1, 0.37);
    const double dc = dc_component(constant);
    const cvec z = mrop.forward(constant.values.cast<std::complex<double>>());
    const cvec centered = center_measurements(z, dc, templ);
    CHECK(centered.norm() <= 1e-10 * z.norm());
  }
  SUBCASE("centering with zero dc is the identity") {
    Rng rng(64);
    const cvec z = rng.cnormal_vector(p);
    const cvec templ = rng.cnormal_vector(p);
    CHECK((center_measurements(z, 0.0, templ) - z).norm() == 0.0);
  }
  SUBCASE("centering is linear in the dc value") {
    Rng rng(65);
    const cvec z = rng.cnormal_vector(p);
    const cvec templ = rng.cnormal_vector(p);
    const cvec a = center_measurements(z, 0.3, templ);
    const cvec b = center_measurements(z, 0.7, templ);
    const cvec mid = center_measurements(z, 0.5, templ);
    CHECK((0.5 * (a + b) - mid).norm() < 1e-14);
  }
}

TEST_CASE("interferometric matrix oracle") {
  const int q = 5, n1 = 12;
  auto plan = testing::disc_plan(q, 1, n1, 70);
  const SkyImage sky = random_sparse_sky(n1, 6, 71);
  const cmat ib = interferometric_matrix(sky.values, n1,
                                         plan->batches[0].antenna_grid,
                                         plan->quadrature_gain());
  SUBCASE("zero image gives the zero matrix") {
    const cmat z = interferometric_matrix(Eigen::VectorXd::Zero(n1 * n1), n1,
                                          plan->batches[0].antenna_grid, 1.0);
    CHECK(z.norm() == 0.0);
  }
  SUBCASE("entries equal the exact sampling on the same baselines") {
    NudftOp op(plan, plan->quadrature_gain());
    const cvec v = op.forward(sky.values.cast<std::complex<double>>());
    Eigen::Map<const cvec> ib_vec(ib.data(), q * q);
    CHECK((v - ib_vec).norm() < 1e-12 * ib_vec.norm());
  }
  SUBCASE("psd for nonnegative images") {
    Eigen::SelfAdjointEigenSolver<cmat> es(ib);
    CHECK(es.eigenvalues().minCoeff() >= -1e-10 * es.eigenvalues().maxCoeff());
    CHECK((ib - ib.adjoint()).norm() == 0.0);
  }
}

TEST_CASE("gaussian post-sensing compression") {
  const Eigen::Index n = 48;
  GaussianPostSensingOp op(n, 8, 123);
  Rng rng(14);
  const cvec v = rng.cnormal_vector(n);
  SUBCASE("zero maps to zero") { CHECK(op.forward(cvec::Zero(n)).norm() == 0.0); }
  SUBCASE("linearity") {
    const cvec w = rng.cnormal_vector(n);
    const cvec lhs = op.forward((v + 2.0 * w).eval());
    const cvec rhs = op.forward(v) + 2.0 * op.forward(w);
    CHECK((lhs - rhs).norm() < 1e-12 * rhs.norm());
  }
  SUBCASE("rows have variance 1/P: energy is preserved on average") {
    double acc = 0.0;
    const int seeds = 400;
    for (int s = 0; s < seeds; ++s) {
      GaussianPostSensingOp trial(n, 8, 1000 + s);
      acc += trial.forward(v).squaredNorm();
    }
    acc /= seeds;
    CHECK(acc == doctest::Approx(v.squaredNorm()).epsilon(0.10));
  }
  SUBCASE("adjoint and determinism") {
    CHECK(check_adjoint(op, 20, 1e-10, 15).pass);
    GaussianPostSensingOp again(n, 8, 123);
    CHECK((again.forward(v) - op.forward(v)).norm() == 0.0);
  }
}

TEST_CASE("baseline-dependent averaging") {
  const int q = 4, b_count = 6, n1 = 16;
  auto plan = testing::disc_plan(q, b_count, n1, 80);
  Rng rng(16);
  const cvec v = rng.cnormal_vector(plan->total_rows());

  SUBCASE("zero threshold is the identity") {
    BaselineAveragingOp op(plan, 0.0, 3);
    CHECK(op.rows() == op.cols());
    CHECK((op.forward(v) - v).norm() == 0.0);
  }
  SUBCASE("infinite threshold and full group collapse to one value per pair") {
    BaselineAveragingOp op(plan, 1e300, b_count);
    CHECK(op.rows() == plan->rows_per_batch());
    const cvec y = op.forward(v);
    // Each output is the mean across batches of one pair.
    for (Eigen::Index r = 0; r < plan->rows_per_batch(); ++r) {
      std::complex<double> mean{0.0, 0.0};
      for (int b = 0; b < b_count; ++b)
        mean += v(b * plan->rows_per_batch() + r);
      mean /= static_cast<double>(b_count);
      CHECK(std::abs(y(r) - mean) < 1e-14);
    }
  }
  SUBCASE("averaging constant-in-batch data is lossless") {
    cvec vc(plan->total_rows());
    Rng r2(17);
    const cvec base = r2.cnormal_vector(plan->rows_per_batch());
    for (int b = 0; b < b_count; ++b)
      vc.segment(b * plan->rows_per_batch(), plan->rows_per_batch()) = base;
    BaselineAveragingOp op(plan, 1e300, 2);
    const cvec y = op.forward(vc);
    CHECK(op.rows() == 3 * plan->rows_per_batch());
    for (Eigen::Index i = 0; i < y.size(); ++i)
      CHECK(std::abs(y(i) - base(i % plan->rows_per_batch())) < 1e-14);
  }
  SUBCASE("adjoint contract") {
    BaselineAveragingOp op(plan, 0.4 * plan->max_grid_freq() / plan->scale, 2);
    CHECK(check_adjoint(op, 20, 1e-10, 18).pass);
  }
}

TEST_CASE("visibility noise") {
  const int q = 5, b_count = 3;
  Rng rng(19);
  const cvec v = rng.cnormal_vector(q * q * b_count);
  SUBCASE("sigma zero is the identity") {
    CHECK((add_visibility_noise(v, q, 0.0, 1) - v).norm() == 0.0);
  }
  SUBCASE("hermitian blocks stay hermitian") {
    // Start from Hermitian blocks and check the perturbed blocks too.
    cvec vh(q * q * b_count);
    for (int b = 0; b < b_count; ++b) {
      cmat h = cmat::Random(q, q);
      h = 0.5 * (h + cmat(h.adjoint()));
      vh.segment(b * q * q, q * q) = Eigen::Map<const cvec>(h.data(), q * q);
    }
    const cvec noisy = add_visibility_noise(vh, q, 0.3, 2);
    for (int b = 0; b < b_count; ++b) {
      Eigen::Map<const cmat> blk(noisy.data() + b * q * q, q, q);
      CHECK((blk - blk.adjoint()).norm() < 1e-12);
    }
  }
  SUBCASE("per-entry variance is sigma^2 within 10 percent") {
    const double sigma = 0.7;
    double acc = 0.0;
    int count = 0;
    for (int s = 0; s < 400; ++s) {
      const cvec noisy = add_visibility_noise(v, q, sigma, 100 + s);
      const cvec diff = noisy - v;
      // Off-diagonal entries of the first block.
      for (int k = 0; k < q; ++k)
        for (int j = 0; j < q; ++j)
          if (j != k) {
            acc += std::norm(diff(k * q + j));
            ++count;
          }
    }
    CHECK(acc / count == doctest::Approx(sigma * sigma).epsilon(0.10));
  }
}
