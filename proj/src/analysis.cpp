// SPDX-License-Identifier: Apache-2.0
#include "cri/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>

#include "cri/acquisition.hpp"
#include "cri/array_geometry.hpp"
#include "cri/grid.hpp"
#include "cri/rng.hpp"
#include "cri/rop_ops.hpp"
#include "cri/sky_model.hpp"
#include "cri/threading.hpp"

namespace cri {

namespace {

// Direct sparse evaluation of the exact sampling path: visibilities of a
// vector supported on `pixels`.
cvec sparse_nudft(const VisibilityPlan& plan, const std::vector<int>& pixels,
                  const cvec& values, double gain) {
  cvec out(plan.total_rows());
  const double two_pi_over_n1 = 2.0 * std::numbers::pi / plan.n1;
  Eigen::Index offset = 0;
  for (const auto& batch : plan.batches) {
    const Eigen::Index rows = batch.row_freq.cols();
    for (Eigen::Index r = 0; r < rows; ++r) {
      std::complex<double> acc{0.0, 0.0};
      for (std::size_t t = 0; t < pixels.size(); ++t) {
        const Eigen::Vector2d c = pixel_coord(pixels[t], plan.n1);
        const double phase = -two_pi_over_n1 * batch.row_freq.col(r).dot(c);
        acc += values(static_cast<Eigen::Index>(t)) *
               std::complex<double>(std::cos(phase), std::sin(phase));
      }
      out(offset + r) = gain * acc;
    }
    offset += rows;
  }
  return out;
}

}  // namespace

RipReport measure_rip_l2l2(const VisibilityPlan& plan, int sparsity, int trials,
                           std::uint64_t seed) {
  if (plan.include_dc_rows)
    throw std::invalid_argument("measure_rip_l2l2: plan must exclude DC rows");
  if (sparsity < 1 || trials < 1)
    throw std::invalid_argument("measure_rip_l2l2: bad arguments");
  const Eigen::Index n = plan.pixel_count();
  RipReport report;
  report.sparsity = sparsity;
  report.trials = trials;
  const double v_count = plan.visibility_count();
  report.scaling_constant =
      static_cast<double>(n) / (plan.varpi() * plan.varpi() * v_count);
  report.ratios.reserve(static_cast<std::size_t>(trials));
  // With rows scaled by 1/sqrt(V) the recorded squared norm equals
  // N/(varpi^2 V) ||G0 F v||^2 of the physically scaled operator.
  const double gain = plan.normalized_gain();
  for (int t = 0; t < trials; ++t) {
    Rng rng(derive_seed(seed, {0x4197, static_cast<std::uint64_t>(t)}));
    const auto support =
        rng.sample_without_replacement(static_cast<int>(n), sparsity);
    cvec values(sparsity);
    const double amp = 1.0 / std::sqrt(static_cast<double>(sparsity));
    for (int i = 0; i < sparsity; ++i) values(i) = amp * rng.rademacher();
    const double ratio = sparse_nudft(plan, support, values, gain).squaredNorm();
    report.ratios.push_back(ratio);
    report.max_distortion = std::max(report.max_distortion, std::abs(ratio - 1.0));
  }
  return report;
}

ConcentrationReport measure_rop_concentration(
    const std::function<cmat(int)>& matrix_source, Eigen::Index dim,
    const std::vector<int>& p_list, int trials, std::uint64_t seed) {
  if (p_list.empty() || trials < 1)
    throw std::invalid_argument("measure_rop_concentration: bad arguments");
  ConcentrationReport report;
  report.trials = trials;
  report.bracket_lo = std::numeric_limits<double>::infinity();
  report.bracket_hi = 0.0;
  for (std::size_t pi = 0; pi < p_list.size(); ++pi) {
    const int p = p_list[pi];
    std::vector<double> ratios;
    ratios.reserve(static_cast<std::size_t>(trials));
    for (int t = 0; t < trials; ++t) {
      const cmat j = matrix_source(t);
      const double jf = j.norm();
      if (jf == 0.0) continue;  // zero matrices carry no ratio
      Rng rng(derive_seed(seed, {0xc04c, static_cast<std::uint64_t>(pi),
                                 static_cast<std::uint64_t>(t)}));
      double l1 = 0.0;
      for (int pp = 0; pp < p; ++pp) {
        const cvec a = rng.unit_phase_vector(dim);
        const cvec b = rng.unit_phase_vector(dim);
        l1 += std::abs(a.dot(j * b));
      }
      ratios.push_back(l1 / (p * jf));
    }
    if (ratios.empty()) continue;
    std::sort(ratios.begin(), ratios.end());
    ConcentrationReport::PerP entry;
    entry.p = p;
    entry.min_ratio = ratios.front();
    entry.max_ratio = ratios.back();
    entry.median_ratio = ratios[ratios.size() / 2];
    report.results.push_back(entry);
    report.bracket_lo = std::min(report.bracket_lo, entry.min_ratio);
    report.bracket_hi = std::max(report.bracket_hi, entry.max_ratio);
  }
  return report;
}

EquivalenceReport verify_appendix_equivalences(int q, int num_batches, int n1,
                                               int p, int m,
                                               std::uint64_t seed) {
  EquivalenceReport report;

  // Random small array over a disc, synthesized over the default span.
  ArrayLayout layout;
  Rng rng(derive_seed(seed, {0xa44a}));
  layout.wavelength = 1.0;
  layout.num_batches = num_batches;
  layout.hour_angle_start = -0.6;
  layout.hour_angle_end = 0.6;
  for (int i = 0; i < q; ++i) {
    const double r = 50.0 * std::sqrt(rng.uniform01());
    const double th = rng.uniform(0.0, 2.0 * std::numbers::pi);
    layout.antennas.emplace_back(r * std::cos(th), r * std::sin(th), 0.0);
  }
  const auto batches = synthesize_batches(layout);
  auto plan = std::make_shared<VisibilityPlan>(make_plan(batches, n1, true));
  auto plan0 = std::make_shared<VisibilityPlan>(make_plan(batches, n1, false, plan->scale));

  const int k = std::max(1, std::min(8, n1 * n1 / 8));
  SkyImage sky = random_sparse_sky(n1, k, derive_seed(seed, {0x5c1e}));
  cvec skyc = sky.values.cast<std::complex<double>>();

  const double gain = plan->quadrature_gain();
  auto nudft = std::make_shared<NudftOp>(plan, gain);
  auto sketches = std::make_shared<SketchEnsemble>(
      draw_sketches(q, p, num_batches, m, derive_seed(seed, {0x6ce7})));

  // Dense per-batch oracles and the block-diagonal total matrix.
  const Eigen::Index qb = static_cast<Eigen::Index>(q) * num_batches;
  cmat total = cmat::Zero(qb, qb);
  const cvec vis = nudft->forward(skyc);
  const Eigen::Index q2 = static_cast<Eigen::Index>(q) * q;
  for (int b = 0; b < num_batches; ++b) {
    const cmat ib = interferometric_matrix(
        sky.values, n1, plan->batches[static_cast<std::size_t>(b)].antenna_grid,
        gain);
    total.block(b * q, b * q, q, q) = ib;
    Eigen::Map<const cvec> ib_vec(ib.data(), q2);
    const double dev = (ib_vec - vis.segment(b * q2, q2)).norm() / ib_vec.norm();
    report.max_entry_dev = std::max(report.max_entry_dev, dev);
  }

  // Stacked sketching vectors spanning all batches.
  cmat a_stack(qb, p), b_stack(qb, p);
  for (int b = 0; b < num_batches; ++b) {
    a_stack.middleRows(b * q, q) = sketches->alphas[static_cast<std::size_t>(b)];
    b_stack.middleRows(b * q, q) = sketches->betas[static_cast<std::size_t>(b)];
  }

  // Integrated ROP == plain global ROP of the block-diagonal matrix.
  IropOp irop(nudft, sketches, false);
  const cvec z_irop = irop.forward(skyc);
  const cvec z_global = global_rop(total, a_stack, b_stack);
  report.max_irop_dev = (z_irop - z_global).norm() / z_global.norm();

  // Modulated ROP == global ROP with sign-structured sketches
  // (epsilon_mb = gamma_mb on the alpha side, all-ones on the beta side).
  MropOp mrop(nudft, sketches);
  const cvec z_mrop = mrop.forward(skyc);
  double mrop_dev = 0.0;
  for (int mm = 0; mm < m; ++mm) {
    cmat a_signed = a_stack;
    for (int b = 0; b < num_batches; ++b)
      a_signed.middleRows(b * q, q) *= sketches->gamma(b, mm);
    const cvec zm = global_rop(total, a_signed, b_stack);
    const cvec got = z_mrop.segment(static_cast<Eigen::Index>(mm) * p, p);
    mrop_dev = std::max(mrop_dev, (got - zm).norm() / zm.norm());
  }
  report.max_mrop_dev = mrop_dev;

  // Hollowed Frobenius norm identity against the DC-excluded sampling.
  cmat hollow = total;
  hollow.diagonal().setZero();
  NudftOp nudft0(plan0, gain);
  const double lhs = hollow.norm();
  const double rhs = nudft0.forward(skyc).norm();
  report.max_frob_dev = std::abs(lhs - rhs) / rhs;

  report.pass = true;
  if (report.max_entry_dev > 1e-12) {
    report.pass = false;
    report.failure = "interferometric-matrix entries";
  } else if (report.max_irop_dev > 1e-10) {
    report.pass = false;
    report.failure = "integrated-rop global equivalence";
  } else if (report.max_mrop_dev > 1e-10) {
    report.pass = false;
    report.failure = "modulated-rop global equivalence";
  } else if (report.max_frob_dev > 1e-10) {
    report.pass = false;
    report.failure = "hollow Frobenius identity";
  }
  return report;
}

double compression_factor(int p, int m, int q, int num_batches) {
  if (p < 1 || m < 1 || q < 2 || num_batches < 1)
    throw std::invalid_argument("compression_factor: bad arguments");
  const double v = static_cast<double>(q) * (q - 1) * num_batches;
  return 100.0 * (1.0 - static_cast<double>(p) * m / v);
}

PhaseDiagram phase_transition_sweep(
    const SweepAxes& axes, std::shared_ptr<const VisibilityPlan> plan,
    bool exact_operator, const SolverConfig& solver_cfg, int trials,
    double threshold_db, std::uint64_t master_seed, unsigned threads,
    const std::map<std::pair<int, int>, double>& resume,
    const CellCallback& on_cell) {
  const bool k_fixed = axes.k_values.size() == 1;
  const bool p_fixed = axes.p_values.size() == 1;
  const bool m_fixed = axes.m_values.size() == 1;
  if (static_cast<int>(k_fixed) + static_cast<int>(p_fixed) +
          static_cast<int>(m_fixed) != 1)
    throw std::invalid_argument(
        "sweep: exactly one of {K, P, M} must be a single fixed value");
  if (trials < 1) throw std::invalid_argument("sweep: trials must be >= 1");

  PhaseDiagram diagram;
  diagram.trials_per_cell = trials;
  diagram.threshold_db = threshold_db;
  diagram.master_seed = master_seed;
  if (k_fixed) {
    diagram.axis1_name = "P";
    diagram.axis2_name = "M";
    diagram.axis1 = axes.p_values;
    diagram.axis2 = axes.m_values;
    diagram.fixed_name = "K";
    diagram.fixed_value = axes.k_values.front();
  } else if (m_fixed) {
    diagram.axis1_name = "K";
    diagram.axis2_name = "P";
    diagram.axis1 = axes.k_values;
    diagram.axis2 = axes.p_values;
    diagram.fixed_name = "M";
    diagram.fixed_value = axes.m_values.front();
  } else {
    diagram.axis1_name = "K";
    diagram.axis2_name = "M";
    diagram.axis1 = axes.k_values;
    diagram.axis2 = axes.m_values;
    diagram.fixed_name = "P";
    diagram.fixed_value = axes.p_values.front();
  }
  const std::size_t n1_cells = diagram.axis1.size();
  const std::size_t n2_cells = diagram.axis2.size();
  diagram.rate.resize(static_cast<Eigen::Index>(n1_cells),
                      static_cast<Eigen::Index>(n2_cells));

  std::shared_ptr<const LinearOp> vis =
      make_visibility_op(plan, plan->normalized_gain(), exact_operator);
  const int n1 = plan->n1;
  const int q = plan->q;
  const int b_count = plan->num_batches();

  std::mutex cell_mutex;
  auto run_cell = [&](std::size_t cell) {
    const std::size_t i1 = cell / n2_cells;
    const std::size_t i2 = cell % n2_cells;
    if (auto it = resume.find({static_cast<int>(i1), static_cast<int>(i2)});
        it != resume.end()) {
      diagram.rate(static_cast<Eigen::Index>(i1), static_cast<Eigen::Index>(i2)) =
          it->second;
      return;
    }
    int k, p, m;
    if (k_fixed) {
      k = diagram.fixed_value;
      p = diagram.axis1[i1];
      m = diagram.axis2[i2];
    } else if (m_fixed) {
      k = diagram.axis1[i1];
      p = diagram.axis2[i2];
      m = diagram.fixed_value;
    } else {
      k = diagram.axis1[i1];
      m = diagram.axis2[i2];
      p = diagram.fixed_value;
    }
    int successes = 0;
    for (int t = 0; t < trials; ++t) {
      const std::uint64_t sky_seed = derive_seed(
          master_seed, {1, static_cast<std::uint64_t>(i1),
                        static_cast<std::uint64_t>(i2), static_cast<std::uint64_t>(t)});
      const std::uint64_t sketch_seed = derive_seed(
          master_seed, {2, static_cast<std::uint64_t>(i1),
                        static_cast<std::uint64_t>(i2), static_cast<std::uint64_t>(t)});
      const SkyImage sky = random_sparse_sky(n1, k, sky_seed);
      auto sketches = std::make_shared<SketchEnsemble>(
          draw_sketches(q, p, b_count, m, sketch_seed));
      auto op = std::make_shared<MropOp>(vis, sketches);
      const cvec z = op->forward(sky.values.cast<std::complex<double>>());
      SolverConfig cfg = solver_cfg;
      cfg.seed = derive_seed(master_seed,
                             {3, static_cast<std::uint64_t>(i1),
                              static_cast<std::uint64_t>(i2), static_cast<std::uint64_t>(t)});
      const SolverResult sol = solve_bpdn(RealMeasOp(op), z, cfg);
      bool success;
      if (sky.values.norm() == 0.0) {
        success = sol.estimate.norm() <= 1e-12;
      } else {
        success = snr_db(sky.values, sol.estimate) >= threshold_db;
      }
      if (success) ++successes;
    }
    const double rate = static_cast<double>(successes) / trials;
    diagram.rate(static_cast<Eigen::Index>(i1), static_cast<Eigen::Index>(i2)) = rate;
    if (on_cell) {
      std::lock_guard<std::mutex> lock(cell_mutex);
      on_cell(static_cast<int>(i1), static_cast<int>(i2), rate);
    }
  };
  parallel_for(n1_cells * n2_cells, threads, run_cell);
  return diagram;
}

std::vector<std::pair<int, double>> frontier_crossings(const PhaseDiagram& d) {
  std::vector<std::pair<int, double>> out;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (Eigen::Index i = 0; i < d.rate.rows(); ++i) {
    double crossing = nan;
    if (d.rate(i, 0) >= 0.5) {
      crossing = d.axis2.front();
    } else {
      for (Eigen::Index j = 0; j + 1 < d.rate.cols(); ++j) {
        const double r0 = d.rate(i, j), r1 = d.rate(i, j + 1);
        if (r0 < 0.5 && r1 >= 0.5) {
          const double x0 = d.axis2[static_cast<std::size_t>(j)];
          const double x1 = d.axis2[static_cast<std::size_t>(j + 1)];
          crossing = x0 + (0.5 - r0) * (x1 - x0) / (r1 - r0);
          break;
        }
      }
    }
    out.emplace_back(d.axis1[static_cast<std::size_t>(i)], crossing);
  }
  return out;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (std::size_t i = 0; i < std::min(x.size(), y.size()); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0) || std::isnan(y[i])) continue;
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++n;
  }
  if (n < 2) return std::numeric_limits<double>::quiet_NaN();
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return (n * sxy - sx * sy) / denom;
}

}  // namespace cri
