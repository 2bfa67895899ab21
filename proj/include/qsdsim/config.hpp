// Run configuration: JSON file + environment + command-line overrides, with
// key-level validation, a stable config hash, and manifest emission.
// Precedence: file < environment < command line.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qsdsim/ensemble.hpp"
#include "qsdsim/model.hpp"
#include "qsdsim/qsd.hpp"

namespace qsdsim::config {

struct RunConfig {
  std::string model = "squid"; // squid | duffing

  // circuit (SI); I_c is always derived from beta_squid
  double C = 1e-13;
  double L = 3e-10;
  double R = 100.0;
  double Id = 0.9e-6;
  double omega_d_ratio = 1.0;
  double phi_x = 0.5; // flux-quantum units
  double beta_squid = 2.0;

  double duffing_beta = 0.25;
  double duffing_g = 0.3;
  double duffing_Gamma = 0.125;

  double mu = 0.2;
  int fock_dim = 30;
  int fock_dim_max = 192;
  double scale_a = 1.0;
  double scale_b = 1.0;
  std::string initial_state = "displaced_vacuum"; // displaced_vacuum | vacuum | file
  std::string initial_state_file;
  std::string frame = "bias"; // bias | well | none
  std::optional<double> zeta_override;

  double dt = 1e-3;
  double t_total_periods = 200.0;
  int sample_stride = 100;
  int renormalize_every = 1;

  int n_trajectories = 16;
  std::uint64_t seed = 12345;
  double t_transient_periods = 50.0;
  double convergence_target = 0.01;

  double classifier_power_threshold = 0.95;
  double classifier_freq_window_rel = 0.05;
  int classifier_n_harmonics = 8;
  std::string classifier_mode = "spectral";

  double trunc_warn = 1e-6;
  double trunc_abort = 1e-3;

  std::vector<double> sweep_a_values = {1e-3, 1e-2, 1e-1, 1.0, 1e1, 1e2, 1e3, 1e4};
  std::vector<double> sweep_beta_values = {0.01, 0.1, 0.25, 1.0};

  int workers = 0; // 0 = hardware concurrency
  std::string out_dir = "out";
};

// Load order: defaults, then optional file (a plain config or a manifest
// with "resolved_config"), then QSDSIM_SET / QSDSIM_WORKERS, then --set
// key=value pairs. Unknown or ill-typed keys raise ConfigError naming the key.
RunConfig load(const std::string& config_path, const std::vector<std::string>& set_overrides);

std::string to_json_string(const RunConfig& cfg); // canonical resolved form

// FNV-1a over the canonical form minus execution-environment keys
// (workers, out_dir).
std::string config_hash(const RunConfig& cfg);

// ---- runtime assembly -----------------------------------------------------

model::CircuitParams make_circuit(const RunConfig& cfg);        // scaled by (a, b)
model::NormalizedParams make_normalized(const RunConfig& cfg);  // zeta override applied
model::DuffingParams make_duffing(const RunConfig& cfg);
double drive_period(const RunConfig& cfg); // dimensionless time per drive period

qsd::IntegratorConfig integrator_config(const RunConfig& cfg);
ensemble::EnsembleConfig ensemble_config(const RunConfig& cfg);
ensemble::ClassifierConfig classifier_config(const RunConfig& cfg);
qsd::HealthThresholds health_thresholds(const RunConfig& cfg);
int effective_workers(const RunConfig& cfg);

// CoupledModel for the configured model; for SQUID runs the frame offset
// comes from cfg.frame.
model::CoupledModel build_model(const RunConfig& cfg);

hilbert::StateVector build_initial_state(const RunConfig& cfg, const model::CoupledModel& m);

// Manifest with the resolved config, pinned constants, derived quantities
// and timestamps. Reruns driven by a manifest reproduce outputs bit for bit.
std::string manifest_json(const RunConfig& cfg, const std::string& command);
void write_manifest(const std::string& path, const RunConfig& cfg, const std::string& command);

} // namespace qsdsim::config
