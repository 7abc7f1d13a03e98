// SPDX-License-Identifier: Apache-2.0
#include "cri/rop_ops.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "cri/grid.hpp"
#include "cri/rng.hpp"

namespace cri {

RopBlockOp::RopBlockOp(std::shared_ptr<const SketchEnsemble> sketches,
                       int batch, bool hollow)
    : sketches_(std::move(sketches)), batch_(batch), hollow_(hollow) {
  sketches_->validate();
  if (batch_ < 0 || batch_ >= sketches_->num_batches)
    throw std::invalid_argument("rop-block: batch index out of range");
}

void RopBlockOp::apply(const cvec& in, cvec& out) const {
  const int q = sketches_->q;
  if (in.size() != static_cast<Eigen::Index>(q) * q)
    throw std::invalid_argument("rop-block: input is not Q^2");
  const auto& a = sketches_->alphas[static_cast<std::size_t>(batch_)];
  const auto& b = sketches_->betas[static_cast<std::size_t>(batch_)];
  Eigen::Map<const cmat> v(in.data(), q, q);
  out.resize(sketches_->p);
  for (int p = 0; p < sketches_->p; ++p) {
    const cvec vb = v * b.col(p);
    std::complex<double> y = a.col(p).dot(vb);  // alpha^* (V beta)
    if (hollow_) {
      std::complex<double> diag{0.0, 0.0};
      for (int i = 0; i < q; ++i)
        diag += std::conj(a(i, p)) * v(i, i) * b(i, p);
      y -= diag;
    }
    out(p) = y;
  }
}

void RopBlockOp::apply_adjoint(const cvec& in, cvec& out) const {
  const int q = sketches_->q;
  if (in.size() != sketches_->p)
    throw std::invalid_argument("rop-block adjoint: input is not P");
  const auto& a = sketches_->alphas[static_cast<std::size_t>(batch_)];
  const auto& b = sketches_->betas[static_cast<std::size_t>(batch_)];
  out.resize(static_cast<Eigen::Index>(q) * q);
  Eigen::Map<cmat> v(out.data(), q, q);
  v.setZero();
  for (int p = 0; p < sketches_->p; ++p)
    v.noalias() += in(p) * (a.col(p) * b.col(p).adjoint());
  if (hollow_) v.diagonal().setZero();
}

BlockRopOp::BlockRopOp(std::shared_ptr<const SketchEnsemble> sketches,
                       bool hollow)
    : sketches_(std::move(sketches)), hollow_(hollow) {
  sketches_->validate();
  blocks_.reserve(static_cast<std::size_t>(sketches_->num_batches));
  for (int b = 0; b < sketches_->num_batches; ++b)
    blocks_.emplace_back(sketches_, b, hollow_);
}

Eigen::Index BlockRopOp::rows() const {
  return static_cast<Eigen::Index>(sketches_->p) * sketches_->num_batches;
}

Eigen::Index BlockRopOp::cols() const {
  return static_cast<Eigen::Index>(sketches_->q) * sketches_->q *
         sketches_->num_batches;
}

void BlockRopOp::apply(const cvec& in, cvec& out) const {
  if (in.size() != cols())
    throw std::invalid_argument("block-rop: input is not Q^2 B");
  const Eigen::Index q2 = static_cast<Eigen::Index>(sketches_->q) * sketches_->q;
  out.resize(rows());
  cvec y;
  for (int b = 0; b < sketches_->num_batches; ++b) {
    blocks_[static_cast<std::size_t>(b)].apply(in.segment(b * q2, q2), y);
    out.segment(static_cast<Eigen::Index>(b) * sketches_->p, sketches_->p) = y;
  }
}

void BlockRopOp::apply_adjoint(const cvec& in, cvec& out) const {
  if (in.size() != rows())
    throw std::invalid_argument("block-rop adjoint: input is not P B");
  const Eigen::Index q2 = static_cast<Eigen::Index>(sketches_->q) * sketches_->q;
  out.resize(cols());
  cvec v;
  for (int b = 0; b < sketches_->num_batches; ++b) {
    blocks_[static_cast<std::size_t>(b)].apply_adjoint(
        in.segment(static_cast<Eigen::Index>(b) * sketches_->p, sketches_->p), v);
    out.segment(b * q2, q2) = v;
  }
}

ModulationOp::ModulationOp(Eigen::MatrixXd gamma, int p)
    : gamma_(std::move(gamma)), p_(p) {
  if (p <= 0) throw std::invalid_argument("modulation: P must be positive");
  if (gamma_.size() == 0) throw std::invalid_argument("modulation: empty Gamma");
  gamma_c_ = gamma_.cast<std::complex<double>>();
}

void ModulationOp::apply(const cvec& in, cvec& out) const {
  if (in.size() != cols())
    throw std::invalid_argument("modulation: input is not P B");
  Eigen::Map<const cmat> y(in.data(), p_, gamma_.rows());
  out.resize(rows());
  Eigen::Map<cmat> z(out.data(), p_, gamma_.cols());
  z.noalias() = y * gamma_c_;
}

void ModulationOp::apply_adjoint(const cvec& in, cvec& out) const {
  if (in.size() != rows())
    throw std::invalid_argument("modulation adjoint: input is not P M");
  Eigen::Map<const cmat> z(in.data(), p_, gamma_.cols());
  out.resize(cols());
  Eigen::Map<cmat> y(out.data(), p_, gamma_.rows());
  y.noalias() = z * gamma_c_.transpose();
}

MropOp::MropOp(std::shared_ptr<const LinearOp> vis,
               std::shared_ptr<const SketchEnsemble> sketches)
    : vis_(std::move(vis)),
      sketches_(std::move(sketches)),
      block_rop_(sketches_, false),
      modulation_(sketches_->gamma, sketches_->p) {
  if (vis_->rows() != block_rop_.cols())
    throw std::invalid_argument(
        "mrop: visibility operator emits a different row count than Q^2 B");
}

Eigen::Index MropOp::rows() const {
  return static_cast<Eigen::Index>(sketches_->p) * sketches_->m;
}

void MropOp::apply(const cvec& in, cvec& out) const {
  cvec v, y;
  vis_->apply(in, v);
  block_rop_.apply(v, y);
  modulation_.apply(y, out);
}

void MropOp::apply_adjoint(const cvec& in, cvec& out) const {
  cvec y, v;
  modulation_.apply_adjoint(in, y);
  block_rop_.apply_adjoint(y, v);
  vis_->apply_adjoint(v, out);
}

IropOp::IropOp(std::shared_ptr<const LinearOp> vis,
               std::shared_ptr<const SketchEnsemble> sketches, bool hollow)
    : vis_(std::move(vis)),
      sketches_(std::move(sketches)),
      hollow_(hollow),
      block_rop_(sketches_, hollow) {
  if (vis_->rows() != block_rop_.cols())
    throw std::invalid_argument(
        "irop: visibility operator emits a different row count than Q^2 B");
}

void IropOp::apply(const cvec& in, cvec& out) const {
  cvec v, y;
  vis_->apply(in, v);
  block_rop_.apply(v, y);
  out = cvec::Zero(sketches_->p);
  for (int b = 0; b < sketches_->num_batches; ++b)
    out += y.segment(static_cast<Eigen::Index>(b) * sketches_->p, sketches_->p);
}

void IropOp::apply_adjoint(const cvec& in, cvec& out) const {
  if (in.size() != sketches_->p)
    throw std::invalid_argument("irop adjoint: input is not P");
  cvec y(static_cast<Eigen::Index>(sketches_->p) * sketches_->num_batches);
  for (int b = 0; b < sketches_->num_batches; ++b)
    y.segment(static_cast<Eigen::Index>(b) * sketches_->p, sketches_->p) = in;
  cvec v;
  block_rop_.apply_adjoint(y, v);
  vis_->apply_adjoint(v, out);
}

cvec dc_template(const LinearOp& forward_img_op, int n1) {
  // F^* e_dc is the constant image with value 1/n1 per pixel.
  cvec constant = cvec::Constant(static_cast<Eigen::Index>(n1) * n1,
                                 std::complex<double>(1.0 / n1, 0.0));
  return forward_img_op.forward(constant);
}

cvec center_measurements(const cvec& z, double dc, const cvec& templ) {
  if (z.size() != templ.size())
    throw std::invalid_argument("center_measurements: template length mismatch");
  return z - dc * templ;
}

cmat steering_matrix(const std::vector<int>& pixels, int n1,
                     const Eigen::Matrix2Xd& antenna_grid) {
  const int q = static_cast<int>(antenna_grid.cols());
  cmat a(q, static_cast<Eigen::Index>(pixels.size()));
  const double two_pi_over_n1 = 2.0 * std::numbers::pi / n1;
  for (std::size_t t = 0; t < pixels.size(); ++t) {
    const Eigen::Vector2d c = pixel_coord(pixels[t], n1);
    for (int row = 0; row < q; ++row) {
      const double phase = two_pi_over_n1 * antenna_grid.col(row).dot(c);
      a(row, static_cast<Eigen::Index>(t)) = {std::cos(phase), std::sin(phase)};
    }
  }
  return a;
}

cmat interferometric_matrix(const Eigen::VectorXd& image, int n1,
                            const Eigen::Matrix2Xd& antenna_grid, double gain) {
  std::vector<int> pixels;
  pixels.reserve(static_cast<std::size_t>(image.size()));
  for (Eigen::Index i = 0; i < image.size(); ++i)
    if (image(i) != 0.0) pixels.push_back(static_cast<int>(i));
  const cmat a = steering_matrix(pixels, n1, antenna_grid);
  cvec d(static_cast<Eigen::Index>(pixels.size()));
  for (std::size_t t = 0; t < pixels.size(); ++t)
    d(static_cast<Eigen::Index>(t)) = gain * image(pixels[t]);
  // Gram form: Hermitian by construction (up to the final symmetrization
  // which removes rounding skew).
  cmat m = a * d.asDiagonal() * a.adjoint();
  return 0.5 * (m + cmat(m.adjoint()));
}

cvec global_rop(const cmat& h, const cmat& a_stack, const cmat& b_stack) {
  if (h.rows() != h.cols() || a_stack.rows() != h.rows() ||
      b_stack.rows() != h.rows() || a_stack.cols() != b_stack.cols())
    throw std::invalid_argument("global_rop: shape mismatch");
  cvec z(a_stack.cols());
  for (Eigen::Index p = 0; p < a_stack.cols(); ++p)
    z(p) = a_stack.col(p).dot(h * b_stack.col(p));
  return z;
}

GaussianPostSensingOp::GaussianPostSensingOp(Eigen::Index input_size, int p,
                                             std::uint64_t seed)
    : input_size_(input_size), p_(p), seed_(seed) {
  if (p <= 0 || input_size <= 0)
    throw std::invalid_argument("gaussian-postsensing: bad shape");
}

cvec GaussianPostSensingOp::row(int p) const {
  Rng rng(derive_seed(seed_, {0x6a55, static_cast<std::uint64_t>(p)}));
  cvec r = rng.cnormal_vector(input_size_);
  r /= std::sqrt(static_cast<double>(p_));
  return r;
}

void GaussianPostSensingOp::apply(const cvec& in, cvec& out) const {
  if (in.size() != input_size_)
    throw std::invalid_argument("gaussian-postsensing: length mismatch");
  out.resize(p_);
  for (int p = 0; p < p_; ++p) out(p) = row(p).conjugate().dot(in);
}

void GaussianPostSensingOp::apply_adjoint(const cvec& in, cvec& out) const {
  if (in.size() != p_)
    throw std::invalid_argument("gaussian-postsensing adjoint: length mismatch");
  out = cvec::Zero(input_size_);
  for (int p = 0; p < p_; ++p) out += in(p) * row(p).conjugate();
}

BaselineAveragingOp::BaselineAveragingOp(
    std::shared_ptr<const VisibilityPlan> plan, double freq_threshold,
    int group_size)
    : plan_(std::move(plan)) {
  if (group_size < 1)
    throw std::invalid_argument("baseline-averaging: group size must be >= 1");
  const Eigen::Index rpb = plan_->rows_per_batch();
  const int b_count = plan_->num_batches();
  // A pair is low-frequency when its baseline norm stays below the threshold
  // in every batch.
  std::vector<bool> low(static_cast<std::size_t>(rpb), true);
  for (Eigen::Index r = 0; r < rpb; ++r) {
    for (int b = 0; b < b_count; ++b) {
      const double nu = plan_->batches[static_cast<std::size_t>(b)]
                            .row_freq.col(r)
                            .norm() /
                        plan_->scale;
      if (nu >= freq_threshold) {
        low[static_cast<std::size_t>(r)] = false;
        break;
      }
    }
  }
  reduced_batches_ = (b_count + group_size - 1) / group_size;
  // Walk the input batch-major; a group-mean row sits at the position of the
  // group's first member, later members are skipped.
  for (int b = 0; b < b_count; ++b) {
    for (Eigen::Index r = 0; r < rpb; ++r) {
      const Eigen::Index input = static_cast<Eigen::Index>(b) * rpb + r;
      if (!low[static_cast<std::size_t>(r)]) {
        rows_.push_back({input, 1, 0});
        continue;
      }
      if (b % group_size != 0) continue;
      const int len = std::min(group_size, b_count - b);
      rows_.push_back({input, len, rpb});
    }
  }
}

void BaselineAveragingOp::apply(const cvec& in, cvec& out) const {
  if (in.size() != cols())
    throw std::invalid_argument("baseline-averaging: length mismatch");
  out.resize(rows());
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    const Row& row = rows_[i];
    std::complex<double> acc{0.0, 0.0};
    for (int t = 0; t < row.count; ++t) acc += in(row.first_input + t * row.stride);
    out(static_cast<Eigen::Index>(i)) = acc / static_cast<double>(row.count);
  }
}

void BaselineAveragingOp::apply_adjoint(const cvec& in, cvec& out) const {
  if (in.size() != rows())
    throw std::invalid_argument("baseline-averaging adjoint: length mismatch");
  out = cvec::Zero(cols());
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    const Row& row = rows_[i];
    const std::complex<double> w =
        in(static_cast<Eigen::Index>(i)) / static_cast<double>(row.count);
    for (int t = 0; t < row.count; ++t) out(row.first_input + t * row.stride) += w;
  }
}

cvec add_visibility_noise(const cvec& v, int q, double sigma,
                          std::uint64_t seed) {
  if (sigma < 0.0)
    throw std::invalid_argument("add_visibility_noise: sigma must be >= 0");
  if (sigma == 0.0) return v;
  const Eigen::Index q2 = static_cast<Eigen::Index>(q) * q;
  if (v.size() % q2 != 0)
    throw std::invalid_argument("add_visibility_noise: length is not Q^2 B");
  const Eigen::Index b_count = v.size() / q2;
  cvec out = v;
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (Eigen::Index b = 0; b < b_count; ++b) {
    Rng rng(derive_seed(seed, {0x401e, static_cast<std::uint64_t>(b)}));
    cmat e(q, q);
    for (Eigen::Index col = 0; col < q; ++col)
      for (Eigen::Index row = 0; row < q; ++row)
        e(row, col) = sigma * rng.cnormal();
    const cmat h = inv_sqrt2 * (e + cmat(e.adjoint()));
    Eigen::Map<const cvec> hv(h.data(), q2);
    out.segment(b * q2, q2) += hv;
  }
  return out;
}

}  // namespace cri
