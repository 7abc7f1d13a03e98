// SPDX-License-Identifier: Apache-2.0
//
// cri-rop: simulate compressive radio-interferometric acquisition, run the
// matching forward imaging model, reconstruct sparse skies, and map
// phase-transition behavior.

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "cri/acquisition.hpp"
#include "cri/analysis.hpp"
#include "cri/config.hpp"
#include "cri/errors.hpp"
#include "cri/io.hpp"
#include "cri/rng.hpp"
#include "cri/rop_ops.hpp"
#include "cri/sky_model.hpp"
#include "cri/solver.hpp"
#include "cri/threading.hpp"
#include "cri/version.hpp"

namespace fs = std::filesystem;
using namespace cri;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitValidation = 3;
constexpr int kExitResource = 4;

struct Pipeline {
  ArrayLayout layout;
  std::vector<BatchGeometry> batches;
  std::shared_ptr<const VisibilityPlan> plan;   // full Q^2 rows
  std::shared_ptr<const SketchEnsemble> sketches;
};

SketchEnsemble::Distribution sketch_dist(const ExperimentConfig& cfg) {
  return cfg.sensing.sketch_distribution == "gaussian"
             ? SketchEnsemble::Distribution::Gaussian
             : SketchEnsemble::Distribution::UnitPhase;
}

Pipeline build_pipeline(const ExperimentConfig& cfg) {
  Pipeline pipe;
  pipe.layout = cfg.build_layout();
  pipe.batches = synthesize_batches(pipe.layout);
  pipe.plan = std::make_shared<VisibilityPlan>(
      make_plan(pipe.batches, cfg.sky.n1, true, 0.0, cfg.op.rescale_margin));
  pipe.sketches = std::make_shared<SketchEnsemble>(
      draw_sketches(pipe.plan->q, cfg.sensing.p, pipe.plan->num_batches(),
                    cfg.sensing.m, derive_seed(cfg.master_seed, {0x5e33}),
                    sketch_dist(cfg)));
  return pipe;
}

KbNufftOp::Params kb_params(const ExperimentConfig& cfg) {
  KbNufftOp::Params params;
  params.width = cfg.op.kernel_width;
  params.oversampling = cfg.op.oversampling;
  params.beta_factor = cfg.op.beta_factor;
  return params;
}

cmat noise_cov(const ExperimentConfig& cfg, int q) {
  if (cfg.sensing.noise_sigma2 <= 0.0) return {};
  return cfg.sensing.noise_sigma2 * cmat::Identity(q, q);
}

std::uint64_t sky_seed(const ExperimentConfig& cfg) {
  return cfg.sky.seed != 0 ? cfg.sky.seed
                           : derive_seed(cfg.master_seed, {0x5517});
}

// ---------------------------------------------------------------------------
// validate

// Fault-injection fixture: an operator whose adjoint is deliberately wrong.
class BrokenAdjointOp final : public LinearOp {
 public:
  explicit BrokenAdjointOp(std::shared_ptr<const LinearOp> inner)
      : inner_(std::move(inner)) {}
  Eigen::Index rows() const override { return inner_->rows(); }
  Eigen::Index cols() const override { return inner_->cols(); }
  void apply(const cvec& in, cvec& out) const override { inner_->apply(in, out); }
  void apply_adjoint(const cvec& in, cvec& out) const override {
    inner_->apply_adjoint(in, out);
    out *= 1.001;
  }
  std::string name() const override { return inner_->name() + "[broken]"; }

 private:
  std::shared_ptr<const LinearOp> inner_;
};

int cmd_validate(const ExperimentConfig& cfg) {
  json report;
  report["tool"] = "cri-rop validate";
  report["version"] = kVersion;
  bool ok = true;
  std::vector<std::string> failures;

  auto check = [&](const std::string& name, bool pass, const std::string& detail) {
    std::cout << (pass ? "[PASS] " : "[FAIL] ") << name
              << (detail.empty() ? "" : ": " + detail) << "\n";
    report["checks"][name] = {{"pass", pass}, {"detail", detail}};
    if (!pass) {
      ok = false;
      failures.push_back(name);
    }
  };

  // Desk-scale geometry for the property suites.
  const int q = 5, b_count = 3, n1 = 16, p = 6, m = 3;
  ArrayLayout layout = make_vla_like(2, 800.0);
  layout.antennas.pop_back();  // Q = 5
  layout.names.pop_back();
  layout.num_batches = b_count;
  const auto batches = synthesize_batches(layout);
  auto plan = std::make_shared<VisibilityPlan>(
      make_plan(batches, n1, true, 0.0, cfg.op.rescale_margin));
  auto plan0 = std::make_shared<VisibilityPlan>(
      make_plan(batches, n1, false, plan->scale));
  auto sketches = std::make_shared<SketchEnsemble>(draw_sketches(
      q, p, b_count, m, derive_seed(cfg.master_seed, {0x7a11}), sketch_dist(cfg)));

  // Adjoint suite over the operator zoo.
  {
    std::vector<std::shared_ptr<const LinearOp>> zoo;
    zoo.push_back(std::make_shared<Dft2Op>(n1));
    zoo.push_back(std::make_shared<NudftOp>(plan, plan->quadrature_gain()));
    zoo.push_back(std::make_shared<KbNufftOp>(plan, plan->normalized_gain(),
                                              kb_params(cfg)));
    zoo.push_back(std::make_shared<NudftOp>(plan0, plan0->normalized_gain()));
    zoo.push_back(std::make_shared<RopBlockOp>(sketches, 0));
    zoo.push_back(std::make_shared<BlockRopOp>(sketches));
    zoo.push_back(std::make_shared<ModulationOp>(sketches->gamma, p));
    zoo.push_back(std::make_shared<MropOp>(
        std::make_shared<KbNufftOp>(plan, plan->normalized_gain(), kb_params(cfg)),
        sketches));
    zoo.push_back(std::make_shared<IropOp>(
        std::make_shared<NudftOp>(plan, plan->normalized_gain()), sketches, false));
    zoo.push_back(std::make_shared<IropOp>(
        std::make_shared<NudftOp>(plan, plan->normalized_gain()), sketches, true));
    zoo.push_back(std::make_shared<GaussianPostSensingOp>(plan->total_rows(), p,
                                                          cfg.master_seed));
    zoo.push_back(std::make_shared<BaselineAveragingOp>(plan, 1.0, 2));
    if (cfg.validate_opts.break_adjoint)
      zoo.push_back(std::make_shared<BrokenAdjointOp>(zoo.front()));
    double worst = 0.0;
    std::string worst_op;
    bool pass = true;
    for (const auto& op : zoo) {
      const auto res = check_adjoint(*op, 20, 1e-10, cfg.master_seed);
      if (res.max_violation > worst) {
        worst = res.max_violation;
        worst_op = res.op_name;
      }
      pass = pass && res.pass;
    }
    std::ostringstream detail;
    detail << "worst " << worst << " (" << worst_op << ")";
    check("adjoint consistency", pass, detail.str());
  }

  // Appendix equivalence suites.
  {
    bool pass = true;
    double dev = 0.0;
    std::string failure;
    for (int s = 0; s < cfg.validate_opts.seeds; ++s) {
      const auto rep = verify_appendix_equivalences(
          4, 3, 8, 5, 2, derive_seed(cfg.master_seed, {0xe801, (std::uint64_t)s}));
      pass = pass && rep.pass;
      dev = std::max({dev, rep.max_irop_dev, rep.max_mrop_dev, rep.max_frob_dev});
      if (!rep.pass && failure.empty()) failure = rep.failure;
    }
    std::ostringstream detail;
    detail << cfg.validate_opts.seeds << " seeds, max dev " << dev;
    if (!failure.empty()) detail << ", first failure: " << failure;
    check("interferometric-oracle equivalence", pass, detail.str());
  }

  // Concentration: exact single-entry ratio and spread shrinkage.
  {
    auto single = [](int) {
      cmat j = cmat::Zero(8, 8);
      j(2, 5) = 1.0;
      return j;
    };
    const auto rep1 = measure_rop_concentration(single, 8, {7}, 5,
                                                derive_seed(cfg.master_seed, {0xcc01}));
    const bool exact = std::abs(rep1.results.at(0).min_ratio - 1.0) <= 1e-12 &&
                       std::abs(rep1.results.at(0).max_ratio - 1.0) <= 1e-12;
    auto source = [&](int t) {
      const SkyImage sky = random_sparse_sky(8, 4, 9100 + t);
      cmat h = cmat::Zero(q * b_count, q * b_count);
      for (int b = 0; b < b_count; ++b)
        h.block(b * q, b * q, q, q) = interferometric_matrix(
            sky.values, 8, plan->batches[b].antenna_grid, 1.0);
      return h;
    };
    int wins = 0;
    const int reps = 10;
    for (int rep = 0; rep < reps; ++rep) {
      const auto r = measure_rop_concentration(
          source, q * b_count, {10, 200}, 15,
          derive_seed(cfg.master_seed, {0xcc02, (std::uint64_t)rep}));
      const double s10 = r.results.at(0).max_ratio - r.results.at(0).min_ratio;
      const double s200 = r.results.at(1).max_ratio - r.results.at(1).min_ratio;
      if (s200 < s10) ++wins;
    }
    std::ostringstream detail;
    detail << "unit-entry ratio exact: " << (exact ? "yes" : "no") << ", spread wins "
           << wins << "/" << reps;
    check("rop concentration", exact && wins >= reps - 1, detail.str());
  }

  // Gridded-path accuracy against the exact oracle.
  {
    double worst = 0.0;
    for (int inst = 0; inst < 5; ++inst) {
      auto tplan = std::make_shared<VisibilityPlan>(
          make_plan(synthesize_batches(layout), 16, true, 0.0,
                    cfg.op.rescale_margin));
      NudftOp exact(tplan, tplan->quadrature_gain());
      KbNufftOp fast(tplan, tplan->quadrature_gain(), kb_params(cfg));
      Rng rng(derive_seed(cfg.master_seed, {0xacc7, (std::uint64_t)inst}));
      const cvec x = rng.cnormal_vector(tplan->pixel_count());
      const cvec want = exact.forward(x);
      worst = std::max(worst, (fast.forward(x) - want).norm() / want.norm());
    }
    std::ostringstream detail;
    detail << "max rel err " << worst;
    check("gridded-path accuracy", worst <= 1e-6, detail.str());
  }

  report["pass"] = ok;
  fs::create_directories(cfg.output_dir);
  atomic_write_text((fs::path(cfg.output_dir) / "validate_report.json").string(),
                    report.dump(2) + "\n");
  if (!ok) {
    std::cerr << "validation failed:";
    for (const auto& f : failures) std::cerr << " [" << f << "]";
    std::cerr << "\n";
  }
  return ok ? kExitOk : kExitValidation;
}

// ---------------------------------------------------------------------------
// reconstruct

int cmd_reconstruct(const ExperimentConfig& cfg) {
  RunManifest manifest("cri-rop reconstruct", cfg);
  fs::create_directories(cfg.output_dir);
  const Pipeline pipe = build_pipeline(cfg);
  const auto& plan = pipe.plan;

  manifest.set("plan", json{{"scale", plan->scale},
                            {"q", plan->q},
                            {"num_batches", plan->num_batches()},
                            {"visibilities", plan->visibility_count()}});

  const std::uint64_t seed_sky = sky_seed(cfg);
  manifest.record_seed("sky", seed_sky);
  manifest.record_seed("sketches", pipe.sketches->seed);
  SkyImage sky = random_sparse_sky(cfg.sky.n1, cfg.sky.k, seed_sky);
  if (cfg.sky.fov > 0.0) sky.fov = cfg.sky.fov;
  else sky.fov = plan->scale;

  manifest.start_stage("measure");
  std::shared_ptr<const LinearOp> vis = make_visibility_op(
      plan, plan->normalized_gain(), cfg.op.exact, kb_params(cfg));
  auto mrop = std::make_shared<MropOp>(vis, pipe.sketches);
  cvec z;
  if (cfg.sensing.simulate) {
    // Full time-domain acquisition, then rescaled to the solver's operator
    // normalization (the two paths differ by a single scalar gain).
    const cmat noise = noise_cov(cfg, plan->q);
    std::vector<SignalBatch> signal;
    const std::uint64_t seed_sim = derive_seed(cfg.master_seed, {0x51a0});
    manifest.record_seed("simulate", seed_sim);
    for (int b = 0; b < plan->num_batches(); ++b)
      signal.push_back(simulate_batch(sky, *plan, b, cfg.sensing.samples_per_batch,
                                      noise, seed_sim, cfg.sensing.budget));
    z = compressive_acquire(signal, *pipe.sketches, noise);
    z *= plan->normalized_gain() / plan->quadrature_gain();
  } else if (cfg.sensing.visibility_noise_sigma > 0.0) {
    // Noiseless forward model plus Gaussian visibility noise.
    cvec v = vis->forward(sky.values.cast<std::complex<double>>());
    const std::uint64_t seed_vn = derive_seed(cfg.master_seed, {0x4015});
    manifest.record_seed("visibility_noise", seed_vn);
    v = add_visibility_noise(v, plan->q, cfg.sensing.visibility_noise_sigma,
                             seed_vn);
    BlockRopOp block(pipe.sketches);
    ModulationOp mod(pipe.sketches->gamma, pipe.sketches->p);
    z = mod.forward(block.forward(v));
  } else {
    z = mrop->forward(sky.values.cast<std::complex<double>>());
  }
  manifest.end_stage("measure");

  manifest.start_stage("solve");
  SolverConfig solver_cfg = cfg.solver;
  solver_cfg.seed = derive_seed(cfg.master_seed, {0x501e});
  std::ofstream diag((fs::path(cfg.output_dir) / "solver_diagnostics.jsonl"));
  solver_cfg.diagnostics = &diag;
  const SolverResult result = solve_bpdn(RealMeasOp(mrop), z, solver_cfg);
  manifest.end_stage("solve");

  double snr = 300.0;
  if (sky.values.norm() > 0.0) snr = snr_db(sky.values, result.estimate);
  std::cout << "reconstruction: snr_db=" << snr
            << " residual=" << result.residual_l2
            << " converged=" << (result.converged ? "true" : "false")
            << " inner_iterations=" << result.inner_iterations << "\n";

  const fs::path out(cfg.output_dir);
  write_image((out / "sky_truth.bin").string(), sky,
              {{"seed", seed_sky}, {"k", cfg.sky.k}});
  SkyImage est;
  est.n1 = cfg.sky.n1;
  est.fov = sky.fov;
  est.values = result.estimate.cwiseMax(0.0);
  write_image((out / "sky_estimate.bin").string(), est,
              {{"snr_db", snr}, {"converged", result.converged}});
  // Grayscale previews, truth range.
  const double hi = std::max(1e-300, sky.values.maxCoeff());
  Eigen::MatrixXd truth_img = Eigen::Map<const Eigen::Matrix<
      double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      sky.values.data(), cfg.sky.n1, cfg.sky.n1);
  Eigen::MatrixXd est_img = Eigen::Map<const Eigen::Matrix<
      double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      est.values.data(), cfg.sky.n1, cfg.sky.n1);
  write_png_gray((out / "sky_truth.png").string(), truth_img, 0.0, hi, 4);
  write_png_gray((out / "sky_estimate.png").string(), est_img, 0.0, hi, 4);
  write_cvec((out / "measurements.bin").string(), z,
             {{"p", cfg.sensing.p},
              {"m", cfg.sensing.m},
              {"b", plan->num_batches()},
              {"q", plan->q},
              {"gain", "normalized"},
              {"sketch_seed", pipe.sketches->seed},
              {"noise_sigma2", cfg.sensing.noise_sigma2}});

  manifest.set("result", json{{"snr_db", snr},
                              {"residual_l2", result.residual_l2},
                              {"final_lambda", result.final_lambda},
                              {"inner_iterations", result.inner_iterations},
                              {"outer_steps", result.outer_steps},
                              {"converged", result.converged}});
  for (const char* f : {"sky_truth.bin", "sky_estimate.bin", "measurements.bin",
                        "sky_truth.png", "sky_estimate.png"})
    manifest.record_output((out / f).string());
  manifest.write((out / "manifest.json").string());
  return kExitOk;
}

// ---------------------------------------------------------------------------
// phase-diagram

int cmd_phase_diagram(const ExperimentConfig& cfg) {
  RunManifest manifest("cri-rop phase-diagram", cfg);
  fs::create_directories(cfg.output_dir);
  const fs::path out(cfg.output_dir);
  const Pipeline pipe = build_pipeline(cfg);

  SweepAxes axes;
  axes.k_values = cfg.sweep.k_values;
  axes.p_values = cfg.sweep.p_values;
  axes.m_values = cfg.sweep.m_values;

  // Resume from the checkpoint written after each finished cell.
  const fs::path checkpoint = out / "sweep_progress.csv";
  std::map<std::pair<int, int>, double> resume;
  if (fs::exists(checkpoint)) {
    std::ifstream in(checkpoint);
    std::string line;
    while (std::getline(in, line)) {
      int i1, i2;
      double rate;
      if (std::sscanf(line.c_str(), "%d,%d,%lf", &i1, &i2, &rate) == 3)
        resume[{i1, i2}] = rate;
    }
    std::cout << "resuming: " << resume.size() << " cells from checkpoint\n";
  }
  std::ofstream progress(checkpoint, std::ios::app);

  SolverConfig solver_cfg = cfg.solver;
  manifest.start_stage("sweep");
  const PhaseDiagram diagram = phase_transition_sweep(
      axes, pipe.plan, cfg.op.exact, solver_cfg, cfg.sweep.trials,
      cfg.sweep.threshold_db, cfg.master_seed, cfg.threads, resume,
      [&](int i1, int i2, double rate) {
        progress << i1 << ',' << i2 << ',' << rate << '\n';
        progress.flush();
      });
  manifest.end_stage("sweep");

  // Rates CSV.
  {
    std::ostringstream csv;
    csv << diagram.axis1_name << ',' << diagram.axis2_name << ",rate,S\n";
    for (Eigen::Index i = 0; i < diagram.rate.rows(); ++i)
      for (Eigen::Index j = 0; j < diagram.rate.cols(); ++j) {
        csv << diagram.axis1[static_cast<std::size_t>(i)] << ','
            << diagram.axis2[static_cast<std::size_t>(j)] << ',';
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.6f", diagram.rate(i, j));
        csv << buf << ',' << diagram.trials_per_cell << '\n';
      }
    atomic_write_text((out / "phase_diagram.csv").string(), csv.str());
  }
  // 50%-crossing frontier (linear interpolation between cells).
  {
    std::ostringstream csv;
    csv << diagram.axis1_name << ',' << diagram.axis2_name << "_50pct\n";
    for (const auto& [a1, crossing] : frontier_crossings(diagram)) {
      csv << a1 << ',';
      if (std::isnan(crossing)) csv << "nan";
      else {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.4f", crossing);
        csv << buf;
      }
      csv << '\n';
    }
    atomic_write_text((out / "phase_frontier.csv").string(), csv.str());
  }
  write_png_gray((out / "phase_diagram.png").string(), diagram.rate, 0.0, 1.0,
                 cfg.sweep.heatmap_upscale);

  manifest.set("diagram", json{{"axis1", diagram.axis1_name},
                               {"axis2", diagram.axis2_name},
                               {"fixed", diagram.fixed_name},
                               {"fixed_value", diagram.fixed_value},
                               {"trials", diagram.trials_per_cell},
                               {"threshold_db", diagram.threshold_db}});
  for (const char* f : {"phase_diagram.csv", "phase_frontier.csv",
                        "phase_diagram.png"})
    manifest.record_output((out / f).string());
  manifest.write((out / "manifest.json").string());
  std::cout << "phase diagram written to " << (out / "phase_diagram.csv") << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// acquire

int cmd_acquire(const ExperimentConfig& cfg) {
  RunManifest manifest("cri-rop acquire", cfg);
  fs::create_directories(cfg.output_dir);
  const fs::path out(cfg.output_dir);
  const Pipeline pipe = build_pipeline(cfg);
  const auto& plan = pipe.plan;
  const cmat noise = noise_cov(cfg, plan->q);

  const std::uint64_t seed_sky_v = sky_seed(cfg);
  const std::uint64_t seed_sim = derive_seed(cfg.master_seed, {0x51a0});
  manifest.record_seed("sky", seed_sky_v);
  manifest.record_seed("simulate", seed_sim);
  manifest.record_seed("sketches", pipe.sketches->seed);
  SkyImage sky = random_sparse_sky(cfg.sky.n1, cfg.sky.k, seed_sky_v);

  manifest.start_stage("simulate");
  std::vector<SignalBatch> signal;
  for (int b = 0; b < plan->num_batches(); ++b)
    signal.push_back(simulate_batch(sky, *plan, b, cfg.sensing.samples_per_batch,
                                    noise, seed_sim, cfg.sensing.budget));
  manifest.end_stage("simulate");

  manifest.start_stage("compress");
  const cvec z = compressive_acquire(signal, *pipe.sketches, noise);
  manifest.end_stage("compress");

  json sidecar{{"p", cfg.sensing.p},
               {"m", cfg.sensing.m},
               {"b", plan->num_batches()},
               {"q", plan->q},
               {"samples_per_batch", cfg.sensing.samples_per_batch},
               {"sky_seed", seed_sky_v},
               {"simulate_seed", seed_sim},
               {"sketch_seed", pipe.sketches->seed},
               {"gain", "physical"},
               {"noise", cfg.sensing.noise_sigma2 > 0.0
                             ? json{{"type", "scalar"},
                                    {"sigma2", cfg.sensing.noise_sigma2}}
                             : json{{"type", "none"}}}};
  write_cvec((out / "measurements.bin").string(), z, sidecar);
  manifest.record_output((out / "measurements.bin").string());

  // Side-by-side size accounting of the acquisition schemes.
  const double q2b = static_cast<double>(plan->q) * plan->q * plan->num_batches();
  json sizes{{"classical_max", q2b},
             {"postsensing_max", static_cast<double>(plan->q) * plan->q},
             {"compressive_max",
              static_cast<double>(cfg.sensing.p) * cfg.sensing.m},
             {"compression_percent",
              compression_factor(cfg.sensing.p, cfg.sensing.m, plan->q,
                                 plan->num_batches())}};
  std::cout << "size accounting: classical=" << sizes["classical_max"]
            << " postsensing=" << sizes["postsensing_max"]
            << " compressive=" << sizes["compressive_max"] << " (compression "
            << sizes["compression_percent"] << "%)\n";

  if (cfg.acquire.classical) {
    const cvec v = classical_acquire(signal, noise);
    write_cvec((out / "visibilities.bin").string(), v,
               {{"q", plan->q}, {"b", plan->num_batches()}, {"layout",
                 "batch-major column-major Q x Q blocks"}});
    manifest.record_output((out / "visibilities.bin").string());
    if (cfg.acquire.gaussian_p > 0) {
      GaussianPostSensingOp gauss(v.size(), cfg.acquire.gaussian_p,
                                  derive_seed(cfg.master_seed, {0x6a55}));
      write_cvec((out / "postsensing_gaussian.bin").string(), gauss.forward(v),
                 {{"p", cfg.acquire.gaussian_p}});
      manifest.record_output((out / "postsensing_gaussian.bin").string());
    }
    if (cfg.acquire.averaging_group > 1 || cfg.acquire.averaging_threshold > 0.0) {
      BaselineAveragingOp avg(plan, cfg.acquire.averaging_threshold,
                              cfg.acquire.averaging_group);
      write_cvec((out / "postsensing_averaged.bin").string(), avg.forward(v),
                 {{"group", cfg.acquire.averaging_group},
                  {"threshold", cfg.acquire.averaging_threshold},
                  {"reduced_batches", avg.reduced_batches()}});
      manifest.record_output((out / "postsensing_averaged.bin").string());
    }
  }
  manifest.set("sizes", sizes);
  manifest.write((out / "manifest.json").string());
  return kExitOk;
}

// ---------------------------------------------------------------------------
// make-array

int cmd_make_array(const ExperimentConfig& cfg, const std::string& path) {
  const ArrayLayout layout = make_vla_like(cfg.array.per_arm, cfg.array.r_max_m);
  fs::path target = path.empty()
                        ? fs::path(cfg.output_dir) / "antennas.csv"
                        : fs::path(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  save_array_csv(target.string(), layout);
  std::cout << "wrote " << layout.num_antennas() << " antennas to " << target
            << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"compressive radio-interferometry with rank-one projections"};
  app.set_version_flag("--version", kVersion);

  std::string config_path;
  std::uint64_t seed_override = 0;
  bool seed_given = false;
  std::string out_override;
  unsigned threads_override = 0;
  app.add_option("--config", config_path, "TOML experiment configuration");
  app.add_option("--seed", seed_override, "master seed override")
      ->each([&](const std::string&) { seed_given = true; });
  app.add_option("--out", out_override, "output directory override");
  app.add_option("--threads", threads_override,
                 "worker threads (default: machine parallelism, or "
                 "CRI_ROP_THREADS)");

  auto* validate = app.add_subcommand("validate", "run the property suites");
  auto* reconstruct =
      app.add_subcommand("reconstruct", "sky -> measurements -> estimate");
  auto* phase = app.add_subcommand("phase-diagram",
                                   "Monte Carlo success-rate sweep");
  auto* acquire = app.add_subcommand(
      "acquire", "time-domain signal simulation and compressive acquisition");
  auto* make_array = app.add_subcommand("make-array", "write an antenna CSV");
  std::string array_path;
  make_array->add_option("path", array_path, "target CSV path");

  // Per-command overrides mirroring config keys.
  int k_override = -1, p_override = -1, m_override = -1, n1_override = -1;
  bool exact_flag = false;
  for (auto* cmd : {reconstruct, phase, acquire}) {
    cmd->add_option("--k", k_override, "sky sparsity override");
    cmd->add_option("--p", p_override, "projections per batch override");
    cmd->add_option("--m", m_override, "modulations override");
    cmd->add_option("--n1", n1_override, "image side override");
    cmd->add_flag("--exact", exact_flag, "use the exact sampling oracle");
  }

  app.require_subcommand(1);
  CLI11_PARSE(app, argc, argv);

  try {
    ExperimentConfig cfg;
    if (!config_path.empty()) cfg = load_config(config_path);
    if (seed_given) cfg.master_seed = seed_override;
    if (!out_override.empty()) cfg.output_dir = out_override;
    if (threads_override > 0) cfg.threads = threads_override;
    if (k_override >= 0) cfg.sky.k = k_override;
    if (p_override >= 1) cfg.sensing.p = p_override;
    if (m_override >= 1) cfg.sensing.m = m_override;
    if (n1_override >= 2) cfg.sky.n1 = n1_override;
    if (exact_flag) cfg.op.exact = true;
    cfg.validate();

    if (*validate) return cmd_validate(cfg);
    if (*reconstruct) return cmd_reconstruct(cfg);
    if (*phase) return cmd_phase_diagram(cfg);
    if (*acquire) return cmd_acquire(cfg);
    if (*make_array) return cmd_make_array(cfg, array_path);
    return kExitConfig;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ResourceError& e) {
    std::cerr << "resource guard: " << e.what() << "\n";
    return kExitResource;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
