// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <memory>

#include "cri/acquisition.hpp"
#include "cri/errors.hpp"
#include "cri/rng.hpp"
#include "cri/rop_ops.hpp"
#include "test_helpers.hpp"

using namespace cri;

TEST_CASE("signal simulation") {
  const int q = 3, n1 = 8;
  auto plan = testing::disc_plan(q, 2, n1, 90);
  SUBCASE("zero sky and zero noise give zero samples") {
    SkyImage img;
    img.n1 = n1;
    img.values = Eigen::VectorXd::Zero(n1 * n1);
    const auto batch = simulate_batch(img, *plan, 0, 50, {}, 1);
    CHECK(batch.samples.norm() == 0.0);
  }
  SUBCASE("budget guard") {
    const SkyImage img = random_sparse_sky(n1, 2, 3);
    CHECK_THROWS_AS(
        (void)simulate_batch(img, *plan, 0, 1000, {}, 1, /*budget=*/1e3),
        ResourceError);
  }
  SUBCASE("sample covariance approaches the interferometric matrix") {
    const SkyImage img = random_sparse_sky(n1, 4, 5);
    const Eigen::Index samples = 100000;
    const auto batch = simulate_batch(img, *plan, 0, samples, {}, 7);
    const cmat c = sample_covariance(batch);
    const cmat want = interferometric_matrix(
        img.values, n1, plan->batches[0].antenna_grid, plan->quadrature_gain());
    const double rel = (c - want).norm() / want.norm();
    CHECK(rel <= 10.0 / std::sqrt(static_cast<double>(samples)));
  }
  SUBCASE("single antenna variance check") {
    // Q = 1, single unit pixel at the origin: x_1[i] is CN(0, Delta^2).
    ArrayLayout layout;
    layout.antennas = {Eigen::Vector3d(0, 0, 0), Eigen::Vector3d(40, 0, 0)};
    layout.num_batches = 1;
    layout.hour_angle_end = 0.1;
    auto plan1 = std::make_shared<VisibilityPlan>(
        make_plan(synthesize_batches(layout), n1, true));
    SkyImage img;
    img.n1 = n1;
    img.values = Eigen::VectorXd::Zero(n1 * n1);
    img.values(0) = 1.0;
    const Eigen::Index samples = 100000;
    const auto batch = simulate_batch(img, *plan1, 0, samples, {}, 9);
    const double var = batch.samples.row(0).squaredNorm() / samples;
    const double want = plan1->quadrature_gain();
    CHECK(std::abs(var - want) / want <= 5.0 / std::sqrt(double(samples)));
  }
}

TEST_CASE("sample covariance") {
  SUBCASE("single sample is the outer product") {
    SignalBatch batch;
    batch.samples.resize(2, 1);
    batch.samples(0, 0) = {1.0, 0.0};
    batch.samples(1, 0) = {0.0, 1.0};  // x = (1, i)
    const cmat c = sample_covariance(batch);
    // x x^* = [[1, -i], [i, 1]].
    CHECK(std::abs(c(0, 0) - std::complex<double>(1, 0)) < 1e-15);
    CHECK(std::abs(c(0, 1) - std::complex<double>(0, -1)) < 1e-15);
    CHECK(std::abs(c(1, 0) - std::complex<double>(0, 1)) < 1e-15);
    CHECK(std::abs(c(1, 1) - std::complex<double>(1, 0)) < 1e-15);
  }
  SUBCASE("repeated basis vector") {
    SignalBatch batch;
    batch.samples = cmat::Zero(3, 5);
    batch.samples.row(0).setConstant(1.0);
    const cmat c = sample_covariance(batch);
    cmat want = cmat::Zero(3, 3);
    want(0, 0) = 1.0;
    CHECK((c - want).norm() == 0.0);
  }
  SUBCASE("exact hermitian symmetry") {
    Rng rng(21);
    SignalBatch batch;
    batch.samples = cmat::Zero(4, 64);
    for (Eigen::Index i = 0; i < batch.samples.size(); ++i)
      batch.samples.data()[i] = rng.cnormal();
    const cmat c = sample_covariance(batch);
    CHECK((c - c.adjoint()).norm() == 0.0);
  }
}

TEST_CASE("classical acquisition") {
  SUBCASE("two antennas, one sample, by hand") {
    SignalBatch batch;
    batch.samples.resize(2, 1);
    batch.samples(0, 0) = {1.0, 0.0};
    batch.samples(1, 0) = {0.0, 1.0};
    cmat noise = cmat::Zero(2, 2);
    noise(0, 0) = 0.25;
    const cvec v = classical_acquire({batch}, noise);
    REQUIRE(v.size() == 4);
    // Column-major vec of [[1 - 0.25, -i], [i, 1]].
    CHECK(std::abs(v(0) - std::complex<double>(0.75, 0.0)) < 1e-15);
    CHECK(std::abs(v(1) - std::complex<double>(0.0, 1.0)) < 1e-15);
    CHECK(std::abs(v(2) - std::complex<double>(0.0, -1.0)) < 1e-15);
    CHECK(std::abs(v(3) - std::complex<double>(1.0, 0.0)) < 1e-15);
  }
  SUBCASE("zero signal with known noise covariance") {
    SignalBatch batch;
    batch.samples = cmat::Zero(3, 10);
    const cvec v = classical_acquire({batch}, cmat::Zero(3, 3));
    CHECK(v.norm() == 0.0);
  }
}

TEST_CASE("compressive acquisition") {
  const int q = 4, b_count = 3, n1 = 8, p = 5, m = 2;
  auto plan = testing::disc_plan(q, b_count, n1, 95);
  const SkyImage img = random_sparse_sky(n1, 3, 96);
  const auto sketches = draw_sketches(q, p, b_count, m, 97);
  cmat noise = 0.04 * cmat::Identity(q, q);

  std::vector<SignalBatch> batches;
  for (int b = 0; b < b_count; ++b)
    batches.push_back(simulate_batch(img, *plan, b, 2000, noise, 98));

  SUBCASE("identical to the rop-of-sample-covariance path") {
    const cvec z = compressive_acquire(batches, sketches, noise);
    // Reference: form C_b explicitly, apply rank-one projections, modulate.
    auto sk = std::make_shared<SketchEnsemble>(sketches);
    cvec y(static_cast<Eigen::Index>(p) * b_count);
    for (int b = 0; b < b_count; ++b) {
      const cmat c = sample_covariance(batches[b]) - noise;
      RopBlockOp rop(sk, b);
      y.segment(b * p, p) =
          rop.forward(Eigen::Map<const cvec>(c.data(), q * q));
    }
    ModulationOp mod(sketches.gamma, p);
    const cvec wanted = mod.forward(y);
    CHECK((z - wanted).norm() <= 1e-12 * wanted.norm());
  }
  SUBCASE("canonical sketches read the covariance entry") {
    auto canon = draw_sketches(q, 1, b_count, 1, 1);
    for (int b = 0; b < b_count; ++b) {
      canon.alphas[b].setZero();
      canon.betas[b].setZero();
      canon.alphas[b](0, 0) = 1.0;
      canon.betas[b](0, 0) = 1.0;
    }
    canon.gamma = Eigen::MatrixXd::Ones(b_count, 1);
    const cvec z = compressive_acquire(batches, canon, noise);
    std::complex<double> want{0.0, 0.0};
    for (int b = 0; b < b_count; ++b)
      want += sample_covariance(batches[b])(0, 0) - noise(0, 0);
    CHECK(std::abs(z(0) - want) < 1e-12 * std::abs(want));
  }
  SUBCASE("same seeds give identical measurements") {
    std::vector<SignalBatch> again;
    for (int b = 0; b < b_count; ++b)
      again.push_back(simulate_batch(img, *plan, b, 2000, noise, 98));
    CHECK((compressive_acquire(again, sketches, noise) -
           compressive_acquire(batches, sketches, noise))
              .norm() == 0.0);
  }
}

TEST_CASE("bias removal: zero sky with noise is centered") {
  const int q = 3, b_count = 2, n1 = 8, p = 4, m = 2;
  auto plan = testing::disc_plan(q, b_count, n1, 99);
  SkyImage img;
  img.n1 = n1;
  img.values = Eigen::VectorXd::Zero(n1 * n1);
  cmat noise = 0.5 * cmat::Identity(q, q);
  const int trials = 200;
  const Eigen::Index samples = 400;
  cvec mean = cvec::Zero(p * m);
  double second = 0.0;
  for (int t = 0; t < trials; ++t) {
    std::vector<SignalBatch> batches;
    for (int b = 0; b < b_count; ++b)
      batches.push_back(simulate_batch(img, *plan, b, samples, noise, 7000 + t));
    const auto sketches = draw_sketches(q, p, b_count, m, 8000 + t);
    const cvec z = compressive_acquire(batches, sketches, noise);
    mean += z;
    second += z.squaredNorm() / (p * m);
  }
  mean /= static_cast<double>(trials);
  // Standard error of each averaged component.
  const double se = std::sqrt(second / trials / trials);
  for (Eigen::Index i = 0; i < mean.size(); ++i)
    CHECK(std::abs(mean(i)) <= 5.0 * se);
}

TEST_CASE("dc estimation") {
  const int q = 4, b_count = 2, n1 = 16;
  auto plan = testing::disc_plan(q, b_count, n1, 101);
  const SkyImage img = random_sparse_sky(n1, 6, 102);
  const double dc = dc_component(img);

  SUBCASE("exact covariances recover the dc component") {
    std::vector<cmat> covs;
    for (int b = 0; b < b_count; ++b)
      covs.push_back(interferometric_matrix(img.values, n1,
                                            plan->batches[b].antenna_grid,
                                            plan->quadrature_gain()));
    const double est = estimate_dc_from_covariances(covs, {}, plan->varpi());
    CHECK(std::abs(est - dc) <= 1e-10 * std::abs(dc));
  }
  SUBCASE("zero image estimates zero") {
    SkyImage zero;
    zero.n1 = n1;
    zero.values = Eigen::VectorXd::Zero(n1 * n1);
    std::vector<SignalBatch> batches;
    for (int b = 0; b < b_count; ++b)
      batches.push_back(simulate_batch(zero, *plan, b, 100, {}, 5));
    CHECK(estimate_dc(batches, {}, plan->varpi()) == 0.0);
  }
  SUBCASE("finite samples land within the statistical envelope") {
    const Eigen::Index samples = 100000;
    std::vector<SignalBatch> batches;
    for (int b = 0; b < b_count; ++b)
      batches.push_back(simulate_batch(img, *plan, b, samples, {}, 505));
    const double est = estimate_dc(batches, {}, plan->varpi());
    CHECK(std::abs(est - dc) / std::abs(dc) <=
          10.0 / std::sqrt(static_cast<double>(samples)));
  }
}
