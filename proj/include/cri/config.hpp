// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cri/array_geometry.hpp"
#include "cri/sketch.hpp"
#include "cri/solver.hpp"
#include "cri/toml.hpp"

namespace cri {

using json = nlohmann::json;

// Experiment configuration mirroring the TOML file; every CLI flag overrides
// the matching key.
struct ExperimentConfig {
  std::uint64_t master_seed = 1;
  unsigned threads = 0;  // 0 = auto
  std::string output_dir = "out";

  struct Array {
    std::string csv;  // empty: use the generator below
    int per_arm = 9;
    double r_max_m = 1e4;
    double wavelength_m = 0.21;
    double declination_deg = 45.0;
    double latitude_deg = 34.0784;
    double hours = 5.0;
    int num_batches = 100;
  } array;

  struct Sky {
    int n1 = 100;
    int k = 25;
    double fov = 0.0;  // 0: use the plan's derived scale
    std::uint64_t seed = 0;  // 0: derive from master seed
  } sky;

  struct Sensing {
    int p = 25;
    int m = 12;
    std::string sketch_distribution = "unit-phase";  // or "gaussian"
    bool simulate = false;      // full time-domain acquisition in `reconstruct`
    std::int64_t samples_per_batch = 10000;          // I, acquisition only
    double noise_sigma2 = 0.0;                       // Sigma_n = sigma2 * Id
    double visibility_noise_sigma = 0.0;
    double budget = 1e10;                            // Q*N*I guard
  } sensing;

  struct Operator {
    bool exact = false;  // exact sampling instead of the gridded path
    int kernel_width = 8;
    int oversampling = 2;
    double beta_factor = 0.98;
    double rescale_margin = 0.45;
  } op;

  SolverConfig solver;

  struct Sweep {
    std::vector<int> k_values{25};
    std::vector<int> p_values{5, 10, 15, 20, 25};
    std::vector<int> m_values{12};
    int trials = 20;
    double threshold_db = 40.0;
    int heatmap_upscale = 16;
  } sweep;

  struct Validate {
    bool break_adjoint = false;  // fault-injection fixture
    int seeds = 10;
  } validate_opts;

  struct Acquire {
    bool classical = false;
    int gaussian_p = 0;           // 0: skip the post-sensing baseline
    double averaging_threshold = 0.0;
    int averaging_group = 1;
  } acquire;

  // Throws ConfigError on violated ranges or missing files.
  void validate() const;

  ArrayLayout build_layout() const;

  json to_json() const;
};

ExperimentConfig config_from_toml(const toml::Table& table);
ExperimentConfig load_config(const std::string& path);

// Run metadata: config snapshot, derived seeds, wall-clock per stage and
// digests of emitted files. Written atomically at run end.
class RunManifest {
 public:
  RunManifest(std::string tool, const ExperimentConfig& cfg);

  void record_seed(const std::string& stage, std::uint64_t seed);
  void start_stage(const std::string& stage);
  void end_stage(const std::string& stage);
  void record_output(const std::string& path);  // path + sha256
  void set(const std::string& key, json value);

  void write(const std::string& path) const;
  const json& data() const { return data_; }

 private:
  json data_;
  std::map<std::string, std::chrono::steady_clock::time_point> running_;
};

}  // namespace cri
