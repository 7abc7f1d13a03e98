// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <memory>

#include "cri/linop.hpp"

namespace cri {

// Thin FFTW wrapper for complex 2-D transforms on row-major n0 x n1 arrays.
// Plans are created once (FFTW_ESTIMATE, deterministic) under a global lock;
// execution through the new-array interface is reentrant.
class Fft2d {
 public:
  Fft2d(int n0, int n1);
  ~Fft2d();

  Fft2d(const Fft2d&) = delete;
  Fft2d& operator=(const Fft2d&) = delete;

  int n0() const { return n0_; }
  int n1() const { return n1_; }

  // Unnormalized sum with e^{-i2pi ...} (forward) / e^{+i2pi ...} (backward).
  void forward(const std::complex<double>* in, std::complex<double>* out) const;
  void backward(const std::complex<double>* in, std::complex<double>* out) const;

 private:
  int n0_, n1_;
  void* plan_fwd_;
  void* plan_bwd_;
};

// Unitary 2-D DFT on n1 x n1 images (row-major vectorization, length n1^2).
// Forward divides the raw FFT by n1 so that ||F x|| = ||x||; the adjoint is
// the inverse transform.
class Dft2Op final : public LinearOp {
 public:
  explicit Dft2Op(int n1);

  Eigen::Index rows() const override { return n_; }
  Eigen::Index cols() const override { return n_; }
  void apply(const cvec& in, cvec& out) const override;
  void apply_adjoint(const cvec& in, cvec& out) const override;
  std::string name() const override { return "dft2"; }

  int side() const { return n1_; }

 private:
  int n1_;
  Eigen::Index n_;
  std::shared_ptr<Fft2d> fft_;
};

}  // namespace cri
