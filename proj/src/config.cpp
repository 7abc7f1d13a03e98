// SPDX-License-Identifier: Apache-2.0
#include "cri/config.hpp"

#include <cmath>
#include <filesystem>
#include <numbers>

#include "cri/errors.hpp"
#include "cri/io.hpp"
#include "cri/version.hpp"

namespace cri {

namespace {

double deg2rad(double d) { return d * std::numbers::pi / 180.0; }

template <typename T>
void read_int(const toml::Table& t, const std::string& key, T& out) {
  auto it = t.find(key);
  if (it == t.end()) return;
  if (!it->second.is_int()) throw ConfigError("config: " + key + " must be an integer");
  out = static_cast<T>(it->second.as_int());
}

void read_double(const toml::Table& t, const std::string& key, double& out) {
  auto it = t.find(key);
  if (it == t.end()) return;
  if (!it->second.is_int() && !it->second.is_float())
    throw ConfigError("config: " + key + " must be a number");
  out = it->second.as_float();
}

void read_bool(const toml::Table& t, const std::string& key, bool& out) {
  auto it = t.find(key);
  if (it == t.end()) return;
  if (!it->second.is_bool()) throw ConfigError("config: " + key + " must be a boolean");
  out = it->second.as_bool();
}

void read_string(const toml::Table& t, const std::string& key, std::string& out) {
  auto it = t.find(key);
  if (it == t.end()) return;
  if (!it->second.is_string()) throw ConfigError("config: " + key + " must be a string");
  out = it->second.as_string();
}

void read_int_list(const toml::Table& t, const std::string& key,
                   std::vector<int>& out) {
  auto it = t.find(key);
  if (it == t.end()) return;
  if (!it->second.is_array())
    throw ConfigError("config: " + key + " must be an array");
  std::vector<int> values;
  for (const auto& v : it->second.as_array()) {
    if (!v.is_int()) throw ConfigError("config: " + key + " must hold integers");
    values.push_back(static_cast<int>(v.as_int()));
  }
  out = std::move(values);
}

}  // namespace

void ExperimentConfig::validate() const {
  if (!array.csv.empty() && !std::filesystem::exists(array.csv))
    throw ConfigError("config: array csv does not exist: " + array.csv);
  if (array.csv.empty()) {
    if (array.per_arm < 1) throw ConfigError("config: array.per_arm must be >= 1");
    if (!(array.r_max_m > 0.0)) throw ConfigError("config: array.r_max_m must be > 0");
  }
  if (!(array.wavelength_m > 0.0))
    throw ConfigError("config: array.wavelength_m must be > 0");
  if (array.num_batches < 1)
    throw ConfigError("config: array.num_batches must be >= 1");
  if (sky.n1 < 2 || sky.n1 % 2 != 0)
    throw ConfigError("config: sky.n1 must be even and >= 2");
  if (sky.k < 0 || static_cast<long long>(sky.k) >
                       static_cast<long long>(sky.n1) * sky.n1)
    throw ConfigError("config: sky.k out of range");
  if (sensing.p < 1 || sensing.m < 1)
    throw ConfigError("config: sensing.p and sensing.m must be >= 1");
  if (sensing.sketch_distribution != "unit-phase" &&
      sensing.sketch_distribution != "gaussian")
    throw ConfigError("config: sensing.sketch_distribution must be unit-phase or gaussian");
  if (sensing.samples_per_batch < 1)
    throw ConfigError("config: sensing.samples_per_batch must be >= 1");
  if (sensing.noise_sigma2 < 0.0 || sensing.visibility_noise_sigma < 0.0)
    throw ConfigError("config: noise levels must be >= 0");
  if (op.kernel_width < 2 || op.kernel_width > 16)
    throw ConfigError("config: operator.kernel_width out of [2, 16]");
  if (op.oversampling < 2)
    throw ConfigError("config: operator.oversampling must be >= 2");
  if (!(op.rescale_margin > 0.0) || op.rescale_margin > 0.9)
    throw ConfigError("config: operator.rescale_margin out of (0, 0.9]");
  if (solver.epsilon < 0.0) throw ConfigError("config: solver.epsilon must be >= 0");
  if (solver.max_outer < 1 || solver.max_inner < 1 || solver.power_iters < 1)
    throw ConfigError("config: solver iteration counts must be positive");
  if (!(solver.rel_tol > 0.0))
    throw ConfigError("config: solver.rel_tol must be > 0");
  if (sweep.trials < 1) throw ConfigError("config: sweep.trials must be >= 1");
  if (sweep.k_values.empty() || sweep.p_values.empty() || sweep.m_values.empty())
    throw ConfigError("config: sweep grids must be nonempty");
  for (int k : sweep.k_values)
    if (k < 0) throw ConfigError("config: sweep k_values must be >= 0");
  for (int p : sweep.p_values)
    if (p < 1) throw ConfigError("config: sweep p_values must be >= 1");
  for (int m : sweep.m_values)
    if (m < 1) throw ConfigError("config: sweep m_values must be >= 1");
}

ArrayLayout ExperimentConfig::build_layout() const {
  ArrayLayout layout;
  if (!array.csv.empty()) {
    layout = load_array_csv(array.csv);
  } else {
    layout = make_vla_like(array.per_arm, array.r_max_m);
  }
  layout.wavelength = array.wavelength_m;
  layout.declination = deg2rad(array.declination_deg);
  layout.latitude = deg2rad(array.latitude_deg);
  const double half_span = array.hours * (2.0 * std::numbers::pi / 24.0) / 2.0;
  layout.hour_angle_start = -half_span;
  layout.hour_angle_end = half_span;
  layout.num_batches = array.num_batches;
  layout.validate();
  return layout;
}

json ExperimentConfig::to_json() const {
  json j;
  j["master_seed"] = master_seed;
  j["threads"] = threads;
  j["output_dir"] = output_dir;
  j["array"] = {{"csv", array.csv},
                {"per_arm", array.per_arm},
                {"r_max_m", array.r_max_m},
                {"wavelength_m", array.wavelength_m},
                {"declination_deg", array.declination_deg},
                {"latitude_deg", array.latitude_deg},
                {"hours", array.hours},
                {"num_batches", array.num_batches}};
  j["sky"] = {{"n1", sky.n1}, {"k", sky.k}, {"fov", sky.fov}, {"seed", sky.seed}};
  j["sensing"] = {{"p", sensing.p},
                  {"m", sensing.m},
                  {"sketch_distribution", sensing.sketch_distribution},
                  {"simulate", sensing.simulate},
                  {"samples_per_batch", sensing.samples_per_batch},
                  {"noise_sigma2", sensing.noise_sigma2},
                  {"visibility_noise_sigma", sensing.visibility_noise_sigma},
                  {"budget", sensing.budget}};
  j["operator"] = {{"exact", op.exact},
                   {"kernel_width", op.kernel_width},
                   {"oversampling", op.oversampling},
                   {"beta_factor", op.beta_factor},
                   {"rescale_margin", op.rescale_margin}};
  j["solver"] = {{"epsilon", solver.epsilon},
                 {"max_outer", solver.max_outer},
                 {"max_inner", solver.max_inner},
                 {"rel_tol", solver.rel_tol},
                 {"nonneg", solver.nonneg},
                 {"power_iters", solver.power_iters}};
  j["sweep"] = {{"k_values", sweep.k_values},
                {"p_values", sweep.p_values},
                {"m_values", sweep.m_values},
                {"trials", sweep.trials},
                {"threshold_db", sweep.threshold_db},
                {"heatmap_upscale", sweep.heatmap_upscale}};
  j["validate"] = {{"break_adjoint", validate_opts.break_adjoint},
                   {"seeds", validate_opts.seeds}};
  j["acquire"] = {{"classical", acquire.classical},
                  {"gaussian_p", acquire.gaussian_p},
                  {"averaging_threshold", acquire.averaging_threshold},
                  {"averaging_group", acquire.averaging_group}};
  return j;
}

ExperimentConfig config_from_toml(const toml::Table& t) {
  ExperimentConfig c;
  read_int(t, "master_seed", c.master_seed);
  read_int(t, "threads", c.threads);
  read_string(t, "output_dir", c.output_dir);

  read_string(t, "array.csv", c.array.csv);
  read_int(t, "array.per_arm", c.array.per_arm);
  read_double(t, "array.r_max_m", c.array.r_max_m);
  read_double(t, "array.wavelength_m", c.array.wavelength_m);
  read_double(t, "array.declination_deg", c.array.declination_deg);
  read_double(t, "array.latitude_deg", c.array.latitude_deg);
  read_double(t, "array.hours", c.array.hours);
  read_int(t, "array.num_batches", c.array.num_batches);

  read_int(t, "sky.n1", c.sky.n1);
  read_int(t, "sky.k", c.sky.k);
  read_double(t, "sky.fov", c.sky.fov);
  read_int(t, "sky.seed", c.sky.seed);

  read_int(t, "sensing.p", c.sensing.p);
  read_int(t, "sensing.m", c.sensing.m);
  read_string(t, "sensing.sketch_distribution", c.sensing.sketch_distribution);
  read_bool(t, "sensing.simulate", c.sensing.simulate);
  read_int(t, "sensing.samples_per_batch", c.sensing.samples_per_batch);
  read_double(t, "sensing.noise_sigma2", c.sensing.noise_sigma2);
  read_double(t, "sensing.visibility_noise_sigma", c.sensing.visibility_noise_sigma);
  read_double(t, "sensing.budget", c.sensing.budget);

  read_bool(t, "operator.exact", c.op.exact);
  read_int(t, "operator.kernel_width", c.op.kernel_width);
  read_int(t, "operator.oversampling", c.op.oversampling);
  read_double(t, "operator.beta_factor", c.op.beta_factor);
  read_double(t, "operator.rescale_margin", c.op.rescale_margin);

  read_double(t, "solver.epsilon", c.solver.epsilon);
  read_int(t, "solver.max_outer", c.solver.max_outer);
  read_int(t, "solver.max_inner", c.solver.max_inner);
  read_double(t, "solver.rel_tol", c.solver.rel_tol);
  read_bool(t, "solver.nonneg", c.solver.nonneg);
  read_int(t, "solver.power_iters", c.solver.power_iters);

  read_int_list(t, "sweep.k_values", c.sweep.k_values);
  read_int_list(t, "sweep.p_values", c.sweep.p_values);
  read_int_list(t, "sweep.m_values", c.sweep.m_values);
  read_int(t, "sweep.trials", c.sweep.trials);
  read_double(t, "sweep.threshold_db", c.sweep.threshold_db);
  read_int(t, "sweep.heatmap_upscale", c.sweep.heatmap_upscale);

  read_bool(t, "validate.break_adjoint", c.validate_opts.break_adjoint);
  read_int(t, "validate.seeds", c.validate_opts.seeds);

  read_bool(t, "acquire.classical", c.acquire.classical);
  read_int(t, "acquire.gaussian_p", c.acquire.gaussian_p);
  read_double(t, "acquire.averaging_threshold", c.acquire.averaging_threshold);
  read_int(t, "acquire.averaging_group", c.acquire.averaging_group);
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  if (!std::filesystem::exists(path))
    throw ConfigError("config file does not exist: " + path);
  toml::Table table;
  try {
    table = toml::parse(read_text(path));
  } catch (const toml::ParseError& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return config_from_toml(table);
}

RunManifest::RunManifest(std::string tool, const ExperimentConfig& cfg) {
  data_["tool"] = std::move(tool);
  data_["version"] = kVersion;
  data_["config"] = cfg.to_json();
  data_["master_seed"] = cfg.master_seed;
  data_["seeds"] = json::object();
  data_["stages"] = json::object();
  data_["outputs"] = json::object();
}

void RunManifest::record_seed(const std::string& stage, std::uint64_t seed) {
  data_["seeds"][stage] = seed;
}

void RunManifest::start_stage(const std::string& stage) {
  running_[stage] = std::chrono::steady_clock::now();
}

void RunManifest::end_stage(const std::string& stage) {
  auto it = running_.find(stage);
  if (it == running_.end()) return;
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - it->second)
          .count();
  data_["stages"][stage] = {{"wall_seconds", secs}};
  running_.erase(it);
}

void RunManifest::record_output(const std::string& path) {
  data_["outputs"][path] = {{"sha256", sha256_file(path)}};
}

void RunManifest::set(const std::string& key, json value) {
  data_[key] = std::move(value);
}

void RunManifest::write(const std::string& path) const {
  atomic_write_text(path, data_.dump(2) + "\n");
}

}  // namespace cri
