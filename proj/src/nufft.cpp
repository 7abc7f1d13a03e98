// SPDX-License-Identifier: Apache-2.0
#include "cri/nufft.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "cri/errors.hpp"
#include "cri/grid.hpp"

namespace cri {

namespace {

// Modified Bessel function of the first kind, order zero.
double bessel_i0(double x) {
#if defined(__cpp_lib_math_special_functions) || defined(__GNUC__)
  return std::cyl_bessel_i(0.0, x);
#else
  // Abramowitz-Stegun polynomial fallback.
  double ax = std::fabs(x);
  if (ax < 3.75) {
    double y = (x / 3.75) * (x / 3.75);
    return 1.0 + y * (3.5156229 + y * (3.0899424 + y * (1.2067492 +
           y * (0.2659732 + y * (0.360768e-1 + y * 0.45813e-2)))));
  }
  double y = 3.75 / ax;
  return (std::exp(ax) / std::sqrt(ax)) *
         (0.39894228 + y * (0.1328592e-1 + y * (0.225319e-2 + y * (-0.157565e-2 +
          y * (0.916281e-2 + y * (-0.2057706e-1 + y * (0.2635537e-1 +
          y * (-0.1647633e-1 + y * 0.392377e-2))))))));
#endif
}

// Kaiser-Bessel kernel, support |u| <= width / 2.
inline double kb_kernel(double u, double beta, int width) {
  const double t = 2.0 * u / width;
  const double arg = 1.0 - t * t;
  if (arg <= 0.0) return 0.0;
  return bessel_i0(beta * std::sqrt(arg));
}

// Continuous Fourier transform of the (unnormalized) Kaiser-Bessel kernel at
// frequency xi (cycles per grid step).
inline double kb_fourier(double xi, double beta, int width) {
  const double t = std::numbers::pi * width * xi;
  const double d = beta * beta - t * t;
  if (d > 0.0) {
    const double s = std::sqrt(d);
    return width * std::sinh(s) / s;
  }
  const double s = std::sqrt(-d);
  if (s == 0.0) return static_cast<double>(width);
  return width * std::sin(s) / s;
}

}  // namespace

double VisibilityPlan::max_grid_freq() const {
  double m = 0.0;
  for (const auto& b : batches)
    if (b.row_freq.cols() > 0)
      m = std::max(m, b.row_freq.cwiseAbs().maxCoeff());
  return m;
}

void VisibilityPlan::validate() const {
  if (n1 <= 0 || n1 % 2 != 0)
    throw ConfigError("plan: image side must be positive and even");
  if (q < 1) throw ConfigError("plan: need at least one antenna");
  if (batches.empty()) throw ConfigError("plan: no batches");
  if (max_grid_freq() > 0.45 * n1)
    throw ConfigError("plan: frequencies exceed the 0.45*n1 in-band margin");
}

VisibilityPlan make_plan(const std::vector<BatchGeometry>& batches, int n1,
                         bool include_dc_rows, double scale, double margin) {
  if (batches.empty()) throw ConfigError("make_plan: no batches");
  if (!(margin > 0.0) || margin > 0.9)
    throw ConfigError("make_plan: margin out of range (0, 0.9]");
  VisibilityPlan plan;
  plan.n1 = n1;
  plan.q = static_cast<int>(batches.front().positions.cols());
  plan.include_dc_rows = include_dc_rows;

  if (scale <= 0.0) {
    double max_nu = 0.0;
    for (const auto& g : batches)
      for (Eigen::Index c = 0; c < g.baselines.cols(); ++c)
        max_nu = std::max(max_nu, g.baselines.col(c).norm());
    scale = max_nu > 0.0 ? margin * (n1 / 2.0) / max_nu : 1.0;
  }
  plan.scale = scale;

  const int q = plan.q;
  for (const auto& g : batches) {
    if (g.positions.cols() != q)
      throw ConfigError("make_plan: inconsistent antenna count across batches");
    VisibilityPlan::Batch pb;
    pb.antenna_grid = scale * g.positions;
    const Eigen::Index rows = include_dc_rows
                                  ? static_cast<Eigen::Index>(q) * q
                                  : static_cast<Eigen::Index>(q) * (q - 1);
    pb.row_freq.resize(2, rows);
    pb.row_pair.reserve(static_cast<std::size_t>(rows));
    Eigen::Index r = 0;
    for (int k = 0; k < q; ++k) {
      for (int j = 0; j < q; ++j) {
        if (!include_dc_rows && j == k) continue;
        pb.row_freq.col(r) = pb.antenna_grid.col(k) - pb.antenna_grid.col(j);
        pb.row_pair.emplace_back(j, k);
        ++r;
      }
    }
    plan.batches.push_back(std::move(pb));
  }
  plan.validate();
  return plan;
}

VisibilityPlan single_batch_plan(const VisibilityPlan& plan, int b) {
  VisibilityPlan out;
  out.n1 = plan.n1;
  out.q = plan.q;
  out.scale = plan.scale;
  out.include_dc_rows = plan.include_dc_rows;
  out.batches.push_back(plan.batches.at(static_cast<std::size_t>(b)));
  return out;
}

NudftOp::NudftOp(std::shared_ptr<const VisibilityPlan> plan, double gain)
    : plan_(std::move(plan)), gain_(gain) {
  plan_->validate();
}

void NudftOp::apply(const cvec& in, cvec& out) const {
  const int n1 = plan_->n1;
  if (in.size() != plan_->pixel_count())
    throw std::invalid_argument("nudft: image length mismatch");
  out.resize(plan_->total_rows());
  // The 2-D exponential factors into per-axis phase vectors; the pixel sum
  // becomes one pass of row reductions per visibility.
  Eigen::Map<const cmat> img(in.data(), n1, n1);  // (col, row) storage
  Eigen::Index offset = 0;
  for (const auto& batch : plan_->batches) {
    const Eigen::Index rows = batch.row_freq.cols();
    for (Eigen::Index r = 0; r < rows; ++r) {
      const cvec ex = axis_phases(batch.row_freq(0, r), n1, -1.0);
      const cvec ey = axis_phases(batch.row_freq(1, r), n1, -1.0);
      // img(col, row): column-major map of the row-major image buffer.
      const cvec t = img.transpose() * ex;  // t(row) = sum_col x * ex
      out(offset + r) = gain_ * t.cwiseProduct(ey).sum();
    }
    offset += rows;
  }
}

void NudftOp::apply_adjoint(const cvec& in, cvec& out) const {
  const int n1 = plan_->n1;
  if (in.size() != plan_->total_rows())
    throw std::invalid_argument("nudft adjoint: measurement length mismatch");
  out = cvec::Zero(plan_->pixel_count());
  Eigen::Map<cmat> img(out.data(), n1, n1);
  Eigen::Index offset = 0;
  for (const auto& batch : plan_->batches) {
    const Eigen::Index rows = batch.row_freq.cols();
    for (Eigen::Index r = 0; r < rows; ++r) {
      const std::complex<double> yv = gain_ * in(offset + r);
      if (yv == std::complex<double>{0.0, 0.0}) continue;
      const cvec ex = axis_phases(batch.row_freq(0, r), n1, 1.0);
      const cvec ey = axis_phases(batch.row_freq(1, r), n1, 1.0);
      img.noalias() += ex * (yv * ey).transpose();
    }
    offset += rows;
  }
}

KbNufftOp::KbNufftOp(std::shared_ptr<const VisibilityPlan> plan, double gain)
    : KbNufftOp(std::move(plan), gain, Params{}) {}

KbNufftOp::KbNufftOp(std::shared_ptr<const VisibilityPlan> plan, double gain,
                     Params params)
    : plan_(std::move(plan)), gain_(gain), params_(params) {
  plan_->validate();
  if (params_.width < 2 || params_.width > 16)
    throw ConfigError("kb-nufft: kernel width out of range [2, 16]");
  if (params_.oversampling < 2)
    throw ConfigError("kb-nufft: oversampling must be >= 2");
  const int n1 = plan_->n1;
  nos_ = params_.oversampling * n1;
  beta_ = params_.beta_factor * std::numbers::pi * params_.width *
          (1.0 - 1.0 / (2.0 * params_.oversampling));
  // Interpolation is periodic in chi with period n1 (pixel coordinates are
  // integers), so wrapping stencils are exact; only the oversampled band
  // itself is a hard limit.
  const double kappa_max = params_.oversampling * plan_->max_grid_freq();
  if (kappa_max > nos_ / 2.0)
    throw ConfigError("kb-nufft: frequency outside the oversampled band");
  deapod_.resize(n1);
  for (int j = 0; j < n1; ++j) {
    const double xi = static_cast<double>(signed_coord(j, n1)) / nos_;
    deapod_(j) = 1.0 / kb_fourier(xi, beta_, params_.width);
  }
  fft_ = std::make_shared<Fft2d>(nos_, nos_);

  // Precompute the interpolation stencils (wrapped indices and kernel
  // weights); frequencies are fixed by the plan, so the Bessel evaluations
  // and modular arithmetic happen only here.
  const int w = params_.width;
  const std::size_t total = static_cast<std::size_t>(plan_->total_rows());
  gx_.resize(total * static_cast<std::size_t>(w));
  gy_.resize(total * static_cast<std::size_t>(w));
  wx_.resize(total * static_cast<std::size_t>(w));
  wy_.resize(total * static_cast<std::size_t>(w));
  std::size_t row = 0;
  for (const auto& batch : plan_->batches) {
    for (Eigen::Index r = 0; r < batch.row_freq.cols(); ++r, ++row) {
      const double kx = params_.oversampling * batch.row_freq(0, r);
      const double ky = params_.oversampling * batch.row_freq(1, r);
      const int kx0 = static_cast<int>(std::ceil(kx - 0.5 * w));
      const int ky0 = static_cast<int>(std::ceil(ky - 0.5 * w));
      for (int t = 0; t < w; ++t) {
        gx_[row * w + t] = ((kx0 + t) % nos_ + nos_) % nos_;
        gy_[row * w + t] = ((ky0 + t) % nos_ + nos_) % nos_;
        wx_[row * w + t] = kb_kernel(kx0 + t - kx, beta_, w);
        wy_[row * w + t] = kb_kernel(ky0 + t - ky, beta_, w);
      }
    }
  }
}

void KbNufftOp::apply(const cvec& in, cvec& out) const {
  const int n1 = plan_->n1;
  if (in.size() != plan_->pixel_count())
    throw std::invalid_argument("kb-nufft: image length mismatch");
  // Deapodize and embed signed pixel coordinates into the oversampled grid.
  cvec padded = cvec::Zero(static_cast<Eigen::Index>(nos_) * nos_);
  Eigen::Index n = 0;
  for (int row = 0; row < n1; ++row) {
    const int gy = (signed_coord(row, n1) + nos_) % nos_;
    const Eigen::Index base = static_cast<Eigen::Index>(gy) * nos_;
    for (int col = 0; col < n1; ++col, ++n) {
      const int gx = (signed_coord(col, n1) + nos_) % nos_;
      padded(base + gx) = in(n) * (deapod_(row) * deapod_(col));
    }
  }
  cvec spectrum(padded.size());
  fft_->forward(padded.data(), spectrum.data());

  const int w = params_.width;
  const std::size_t total = wx_.size() / static_cast<std::size_t>(w);
  out.resize(plan_->total_rows());
  const std::complex<double>* spec = spectrum.data();
  for (std::size_t row = 0; row < total; ++row) {
    const int* gx = &gx_[row * w];
    const int* gy = &gy_[row * w];
    const double* wx = &wx_[row * w];
    const double* wy = &wy_[row * w];
    std::complex<double> acc{0.0, 0.0};
    for (int ty = 0; ty < w; ++ty) {
      const std::complex<double>* line =
          spec + static_cast<Eigen::Index>(gy[ty]) * nos_;
      std::complex<double> row_acc{0.0, 0.0};
      for (int tx = 0; tx < w; ++tx) row_acc += wx[tx] * line[gx[tx]];
      acc += wy[ty] * row_acc;
    }
    out(static_cast<Eigen::Index>(row)) = gain_ * acc;
  }
}

void KbNufftOp::apply_adjoint(const cvec& in, cvec& out) const {
  const int n1 = plan_->n1;
  if (in.size() != plan_->total_rows())
    throw std::invalid_argument("kb-nufft adjoint: measurement length mismatch");
  const int w = params_.width;
  cvec grid = cvec::Zero(static_cast<Eigen::Index>(nos_) * nos_);
  std::complex<double>* gdata = grid.data();
  const std::size_t total = wx_.size() / static_cast<std::size_t>(w);
  for (std::size_t row = 0; row < total; ++row) {
    const std::complex<double> yv = gain_ * in(static_cast<Eigen::Index>(row));
    if (yv == std::complex<double>{0.0, 0.0}) continue;
    const int* gx = &gx_[row * w];
    const int* gy = &gy_[row * w];
    const double* wx = &wx_[row * w];
    const double* wy = &wy_[row * w];
    for (int ty = 0; ty < w; ++ty) {
      std::complex<double>* line = gdata + static_cast<Eigen::Index>(gy[ty]) * nos_;
      const std::complex<double> wyv = wy[ty] * yv;
      for (int tx = 0; tx < w; ++tx) line[gx[tx]] += wx[tx] * wyv;
    }
  }
  // Adjoint of the unnormalized forward FFT is the unnormalized backward FFT.
  cvec image_os(grid.size());
  fft_->backward(grid.data(), image_os.data());

  out.resize(plan_->pixel_count());
  Eigen::Index n = 0;
  for (int row = 0; row < n1; ++row) {
    const int gy = (signed_coord(row, n1) + nos_) % nos_;
    const Eigen::Index base = static_cast<Eigen::Index>(gy) * nos_;
    for (int col = 0; col < n1; ++col, ++n) {
      const int gx = (signed_coord(col, n1) + nos_) % nos_;
      out(n) = image_os(base + gx) * (deapod_(row) * deapod_(col));
    }
  }
}

std::shared_ptr<const LinearOp> make_visibility_op(
    std::shared_ptr<const VisibilityPlan> plan, double gain, bool exact,
    KbNufftOp::Params params) {
  if (exact) return std::make_shared<NudftOp>(std::move(plan), gain);
  return std::make_shared<KbNufftOp>(std::move(plan), gain, params);
}

}  // namespace cri
