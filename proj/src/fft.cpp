// SPDX-License-Identifier: Apache-2.0
#include "cri/fft.hpp"

#include <fftw3.h>

#include <mutex>
#include <stdexcept>
#include <vector>

namespace cri {

namespace {
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

Fft2d::Fft2d(int n0, int n1) : n0_(n0), n1_(n1) {
  if (n0 <= 0 || n1 <= 0) throw std::invalid_argument("Fft2d: bad size");
  // Planned out-of-place; all executions must keep in != out.
  std::vector<std::complex<double>> bin(static_cast<std::size_t>(n0) * n1);
  std::vector<std::complex<double>> bout(bin.size());
  auto* pi = reinterpret_cast<fftw_complex*>(bin.data());
  auto* po = reinterpret_cast<fftw_complex*>(bout.data());
  std::lock_guard<std::mutex> lock(planner_mutex());
  plan_fwd_ = fftw_plan_dft_2d(n0, n1, pi, po, FFTW_FORWARD,
                               FFTW_ESTIMATE | FFTW_UNALIGNED);
  plan_bwd_ = fftw_plan_dft_2d(n0, n1, pi, po, FFTW_BACKWARD,
                               FFTW_ESTIMATE | FFTW_UNALIGNED);
  if (plan_fwd_ == nullptr || plan_bwd_ == nullptr)
    throw std::runtime_error("Fft2d: planning failed");
}

Fft2d::~Fft2d() {
  std::lock_guard<std::mutex> lock(planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(plan_fwd_));
  fftw_destroy_plan(static_cast<fftw_plan>(plan_bwd_));
}

void Fft2d::forward(const std::complex<double>* in,
                    std::complex<double>* out) const {
  fftw_execute_dft(static_cast<fftw_plan>(plan_fwd_),
                   reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(in)),
                   reinterpret_cast<fftw_complex*>(out));
}

void Fft2d::backward(const std::complex<double>* in,
                     std::complex<double>* out) const {
  fftw_execute_dft(static_cast<fftw_plan>(plan_bwd_),
                   reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(in)),
                   reinterpret_cast<fftw_complex*>(out));
}

Dft2Op::Dft2Op(int n1)
    : n1_(n1),
      n_(static_cast<Eigen::Index>(n1) * n1),
      fft_(std::make_shared<Fft2d>(n1, n1)) {
  if (n1 <= 0) throw std::invalid_argument("Dft2Op: side must be positive");
}

void Dft2Op::apply(const cvec& in, cvec& out) const {
  if (in.size() != n_) throw std::invalid_argument("dft2: length is not n1^2");
  out.resize(n_);
  fft_->forward(in.data(), out.data());
  out /= static_cast<double>(n1_);
}

void Dft2Op::apply_adjoint(const cvec& in, cvec& out) const {
  if (in.size() != n_) throw std::invalid_argument("dft2: length is not n1^2");
  out.resize(n_);
  fft_->backward(in.data(), out.data());
  out /= static_cast<double>(n1_);
}

}  // namespace cri
