// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "cri/fft.hpp"
#include "cri/grid.hpp"
#include "cri/linop.hpp"
#include "cri/rng.hpp"

using namespace cri;

TEST_CASE("unitary dft2") {
  Dft2Op f(8);
  SUBCASE("delta at the grid origin has flat spectrum 1/n1") {
    cvec x = cvec::Zero(64);
    x(0) = 1.0;  // index 0 is the origin pixel
    const cvec s = f.forward(x);
    for (Eigen::Index i = 0; i < s.size(); ++i)
      CHECK(std::abs(s(i) - std::complex<double>(1.0 / 8.0, 0.0)) < 1e-14);
  }
  SUBCASE("norm preservation on random input") {
    Rng rng(3);
    const cvec x = rng.cnormal_vector(64);
    CHECK(f.forward(x).norm() == doctest::Approx(x.norm()).epsilon(1e-12));
    CHECK(f.adjoint(x).norm() == doctest::Approx(x.norm()).epsilon(1e-12));
  }
  SUBCASE("inverse recovers the input") {
    Rng rng(4);
    const cvec x = rng.cnormal_vector(64);
    CHECK((f.adjoint(f.forward(x)) - x).norm() < 1e-12 * x.norm());
  }
  SUBCASE("adjoint contract") {
    const auto res = check_adjoint(f, 20, 1e-10, 77);
    CHECK(res.pass);
  }
}

TEST_CASE("hand-computed 4-point dft column") {
  // For a 1-D delta at index 2 the 4-point unitary DFT is
  // (1/2) e^{-i 2 pi 2 k / 4}. In 2-D, place the delta at pixel (0, 2): the
  // spectrum depends only on the column frequency.
  Dft2Op f(4);
  cvec x = cvec::Zero(16);
  x(2) = 1.0;  // row 0, col 2
  const cvec s = f.forward(x);
  for (int krow = 0; krow < 4; ++krow) {
    for (int kcol = 0; kcol < 4; ++kcol) {
      const double phase = -2.0 * std::numbers::pi * kcol * 2.0 / 4.0;
      const std::complex<double> expected =
          0.25 * std::complex<double>(std::cos(phase), std::sin(phase));
      CHECK(std::abs(s(krow * 4 + kcol) - expected) < 1e-14);
    }
  }
}

TEST_CASE("dft2 rejects non-square lengths") {
  Dft2Op f(8);
  cvec bad = cvec::Zero(63);
  cvec out;
  CHECK_THROWS_AS(f.apply(bad, out), std::invalid_argument);
}

TEST_CASE("dc bin equals sum over n1") {
  Dft2Op f(16);
  Rng rng(5);
  cvec x = rng.cnormal_vector(256);
  const cvec s = f.forward(x);
  CHECK(std::abs(s(0) - x.sum() / 16.0) < 1e-12);
}
